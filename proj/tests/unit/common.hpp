#pragma once

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <stdexcept>
#include <string>

namespace nsdp::unit {

inline const cli::Fixture& fixture(const std::string& name) {
  static const std::vector<cli::Fixture> all = cli::builtin_fixtures();
  const cli::Fixture* f = cli::find_fixture(all, name);
  if (!f) throw std::runtime_error("no fixture " + name);
  return *f;
}

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<int>(v.size()));
  int i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

inline SymMat sym2(double a, double b, double c) {
  SymMat s(2);
  s.set(0, 0, a);
  s.set(0, 1, b);
  s.set(1, 1, c);
  return s;
}

}  // namespace nsdp::unit
