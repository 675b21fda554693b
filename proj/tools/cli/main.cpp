#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_source(CLI::App* app, nsdp::cli::SourceArgs& a, bool needs_source) {
  auto* fixture = app->add_option("--fixture", a.fixture, "built-in fixture name (e.g. ex-4.2)");
  auto* problem = app->add_option("--problem", a.problem, "problem file (see docs/problem-format.md)");
  if (needs_source) {
    fixture->excludes(problem);
    problem->excludes(fixture);
  }
  app->add_option("--fixtures-dir", a.fixtures_dir, "load fixtures from this directory instead");
  app->add_option("--config", a.config, "JSON overrides for solver and budget settings");
  app->add_option("--out-dir", a.out_dir, "output directory (default: $NSDP_OUT_DIR or ./nsdp-out)");
  app->add_option("--budget", a.budget, "sampling budget override key=value (repeatable)");
  app->add_option("--seed", a.seed, "sampling seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nsdp: nonlinear semidefinite programming solvers and constraint-qualification diagnostics"};
  app.require_subcommand(1);

  nsdp::cli::SolveArgs solve;
  auto* s = app.add_subcommand("solve", "run penalty, al or sqp and write a trace");
  add_source(s, solve, true);
  s->add_option("--solver", solve.solver, "penalty | al | sqp")
      ->check(CLI::IsMember({"penalty", "al", "sqp"}));

  nsdp::cli::DiagnoseArgs diag;
  auto* d = app.add_subcommand("diagnose", "run constraint-qualification checks at a point");
  add_source(d, diag, true);
  d->add_option("--checks", diag.checks, "comma-separated checks (default: all)")->delimiter(',');
  d->add_option("--point", diag.point, "comma-separated point (default: the file's x_ref)");

  nsdp::cli::RegressArgs reg;
  auto* r = app.add_subcommand("regress", "run the fixture regression suite");
  add_source(r, reg, false);
  r->add_option("--suite", reg.suite, "all | cq | solvers | msr | properties")
      ->check(CLI::IsMember({"all", "cq", "solvers", "msr", "properties"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), nsdp::cli::exit_code::kError);
  }
  if (s->parsed()) return nsdp::cli::cmd_solve(solve, std::cout, std::cerr);
  if (d->parsed()) return nsdp::cli::cmd_diagnose(diag, std::cout, std::cerr);
  return nsdp::cli::cmd_regress(reg, std::cout, std::cerr);
}
