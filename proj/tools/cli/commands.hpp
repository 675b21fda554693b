#pragma once

#include "config.hpp"
#include "fixtures.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nsdp::cli {

struct SourceArgs {
  std::string fixture;
  std::string problem;
  std::string fixtures_dir;  // replaces the built-in registry when set
  std::string config;
  std::string out_dir;
  std::vector<std::string> budget;
  std::optional<std::uint64_t> seed;
};

struct SolveArgs : SourceArgs {
  std::string solver = "al";
};

struct DiagnoseArgs : SourceArgs {
  std::vector<std::string> checks;  // empty means all
  std::string point;                // comma-separated; defaults to the reference point
};

struct RegressArgs : SourceArgs {
  std::string suite = "all";  // all | cq | solvers | msr | properties
};

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kMismatch = 1;
inline constexpr int kIterationCap = 2;
inline constexpr int kError = 3;
}  // namespace exit_code

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err);
int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out, std::ostream& err);
int cmd_regress(const RegressArgs& a, std::ostream& out, std::ostream& err);

// Shared plumbing.
std::string resolve_out_dir(const std::string& flag);
void write_file(const std::string& path, const std::string& content);
std::vector<Fixture> registry(const SourceArgs& a);
Fixture resolve_source(const SourceArgs& a);
RunConfig resolve_config(const SourceArgs& a);
SolverTrace run_solver(const std::string& solver, const NsdpProblem& p, const Vec& x0,
                       const RunConfig& cfg);
std::string residual_csv(const SolverTrace& t);

}  // namespace nsdp::cli
