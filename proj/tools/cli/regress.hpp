#pragma once

#include "config.hpp"
#include "fixtures.hpp"

#include "nsdp/trace.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace nsdp::cli {

struct RegressEntry {
  std::string suite;
  std::string name;
  bool passed = true;
  std::string detail;
  std::vector<std::pair<std::string, double>> values;
};

struct RegressOutput {
  std::vector<RegressEntry> entries;
  std::map<std::string, std::string> files;  // path relative to the output directory
  int failures() const;
};

inline const std::vector<std::string>& regress_suites() {
  static const std::vector<std::string> s = {"cq", "solvers", "msr", "properties"};
  return s;
}

// suite is one of regress_suites() or "all".
RegressOutput run_regress(const std::string& suite, const std::vector<Fixture>& fixtures,
                          const RunConfig& cfg);

// Deterministic JSON body; the hash covers exactly these bytes.
std::string report_body(const RegressOutput& out, const std::string& suite, std::uint64_t seed);

// The trace certificate, padded with copies of the final record when the solver
// stopped early at a pair that already meets the target. A constant sequence at
// such a pair is itself an AKKT sequence.
AkktCertificate recovery_certificate(const SolverTrace& t, int min_records, double target_tol);

}  // namespace nsdp::cli
