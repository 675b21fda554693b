#pragma once

#include "nsdp/cq.hpp"
#include "nsdp/problem_io.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nsdp::cli {

struct Fixture {
  std::string name;
  ProblemFile file;

  NsdpProblem problem() const { return file.problem(); }
  bool is_nlp() const { return !file.nlp_constraints.empty(); }
  bool has_point() const { return file.x_ref.has_value(); }
  Vec point() const;
  Vec start() const;  // solver_start, else x_ref, else zero
  std::vector<ScalarConstraint> nlp_constraints() const;
  // Budget plus the fixture's witness directions and curves.
  CqOptions cq_options(const CqBudget& budget) const;
};

const std::vector<std::pair<std::string, std::string>>& embedded_fixture_texts();

std::vector<Fixture> builtin_fixtures();
// Every *.json file in the directory, sorted by file name.
std::vector<Fixture> load_fixture_dir(const std::string& dir);
Fixture fixture_from_file(const std::string& path);
const Fixture* find_fixture(const std::vector<Fixture>& all, const std::string& name);

}  // namespace nsdp::cli
