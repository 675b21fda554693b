#include "commands.hpp"

#include "nsdp/errors.hpp"
#include "nsdp/verdict_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nsdp::cli {

namespace fs = std::filesystem;

std::string resolve_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("NSDP_OUT_DIR"); env && *env) return env;
  return "nsdp-out";
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, p);
}

std::vector<Fixture> registry(const SourceArgs& a) {
  return a.fixtures_dir.empty() ? builtin_fixtures() : load_fixture_dir(a.fixtures_dir);
}

Fixture resolve_source(const SourceArgs& a) {
  if (!a.fixture.empty() && !a.problem.empty())
    throw Error("give either --fixture or --problem, not both");
  if (!a.problem.empty()) return fixture_from_file(a.problem);
  if (a.fixture.empty()) throw Error("a problem source is required (--fixture or --problem)");
  const auto all = registry(a);
  if (const Fixture* f = find_fixture(all, a.fixture)) return *f;
  std::string names;
  for (const auto& f : all) names += (names.empty() ? "" : ", ") + f.name;
  throw Error("unknown fixture '" + a.fixture + "' (known: " + names + ")");
}

RunConfig resolve_config(const SourceArgs& a) {
  RunConfig c = a.config.empty() ? RunConfig{} : load_config(a.config);
  for (const auto& kv : a.budget) apply_budget_override(c.budget, kv);
  if (a.seed) c.budget.seed = *a.seed;
  return c;
}

SolverTrace run_solver(const std::string& solver, const NsdpProblem& p, const Vec& x0,
                       const RunConfig& cfg) {
  if (solver == "penalty") return solve_external_penalty(p, x0, penalty_config(cfg));
  if (solver == "al") return solve_augmented_lagrangian(p, x0, cfg.al, cfg.target_tol, cfg.max_outer);
  if (solver == "sqp")
    return solve_sqp(p, x0, SymMat::zero(p.m), cfg.sqp, cfg.target_tol, cfg.max_outer);
  throw Error("unknown solver '" + solver + "' (penalty, al, sqp)");
}

std::string residual_csv(const SolverTrace& t) {
  std::ostringstream o;
  o << std::setprecision(17);
  o << "k,rho,v_norm,stationarity,feasibility,complementarity,dual_feasibility,y_norm,x_norm\n";
  for (const auto& r : t.records)
    o << r.k << ',' << r.rho << ',' << r.v_norm << ',' << r.residual.stationarity << ','
      << r.residual.feasibility << ',' << r.residual.complementarity << ','
      << r.residual.dual_feasibility << ',' << r.y.fro() << ',' << r.x.norm() << '\n';
  return o.str();
}

namespace {

std::string fmt_vec(const Vec& v) {
  std::ostringstream o;
  o << std::setprecision(10) << '[';
  for (int i = 0; i < v.size(); ++i) o << (i ? ", " : "") << v(i);
  o << ']';
  return o.str();
}

Vec parse_point(const std::string& s, int n) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(tok, &used));
      if (tok.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error("--point: cannot read '" + tok + "' as a number");
    }
  }
  if (static_cast<int>(vals.size()) != n)
    throw DimensionError("--point: expected " + std::to_string(n) + " coordinates");
  return Eigen::Map<Vec>(vals.data(), n);
}

}  // namespace

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const Fixture fx = resolve_source(a);
    const RunConfig cfg = resolve_config(a);
    const NsdpProblem p = fx.problem();
    const SolverTrace tr = run_solver(a.solver, p, fx.start(), cfg);

    const std::string dir = resolve_out_dir(a.out_dir);
    const std::string stem = dir + "/" + fx.name + "." + a.solver;
    write_file(stem + ".trace.jsonl", trace_to_jsonl(tr));
    write_file(stem + ".residuals.csv", residual_csv(tr));

    std::ostringstream s;
    s << std::setprecision(10);
    const auto& last = tr.last();
    s << "problem: " << fx.name << "\n"
      << "solver: " << a.solver << "\n"
      << "termination: " << tr.termination << "\n";
    if (!tr.message.empty()) s << "message: " << tr.message << "\n";
    s << "outer_iterations: " << tr.records.size() << "\n"
      << "x: " << fmt_vec(last.x) << "\n"
      << "rho: " << last.rho << "\n"
      << "multiplier_norm: " << last.y.fro() << "\n"
      << "stationarity: " << last.residual.stationarity << "\n"
      << "feasibility: " << last.residual.feasibility << "\n"
      << "complementarity: " << last.residual.complementarity << "\n"
      << "dual_feasibility: " << last.residual.dual_feasibility << "\n"
      << "kkt_max: " << last.residual.max() << "\n";
    const AkktCertificate cert = tr.certificate();
    if (static_cast<int>(cert.records.size()) >= RecoveryConfig{}.min_records) {
      const MultiplierRecovery rec = recover_multiplier(p, cert, last.x);
      s << "multiplier_recovery: " << to_string(rec.status) << "\n";
      if (rec.status == RecoveryStatus::Diverged)
        s << "note: multiplier divergence; the limit carries no bounded multiplier sequence\n";
      if (rec.status == RecoveryStatus::Success)
        s << "recovered_kkt_max: " << rec.residual.max() << "\n";
      if (!rec.note.empty()) s << "recovery_note: " << rec.note << "\n";
    }
    write_file(stem + ".summary.txt", s.str());
    out << s.str();
    if (tr.converged()) return exit_code::kOk;
    if (tr.termination == termination::kMaxIter) return exit_code::kIterationCap;
    return exit_code::kError;
  } catch (const std::exception& e) {
    err << "nsdp solve: " << e.what() << "\n";
    return exit_code::kError;
  }
}

int cmd_diagnose(const DiagnoseArgs& a, std::ostream& out, std::ostream& err) {
  try {
    const Fixture fx = resolve_source(a);
    const RunConfig cfg = resolve_config(a);
    const NsdpProblem p = fx.problem();
    const bool at_ref = a.point.empty();
    const Vec x = at_ref ? fx.point() : parse_point(a.point, p.n);

    std::vector<CqKind> kinds;
    if (a.checks.empty()) {
      kinds = all_cq_kinds();
    } else {
      for (const auto& c : a.checks) {
        const auto k = cq_kind_from_string(c);
        if (!k) throw Error("unknown check '" + c + "'");
        kinds.push_back(*k);
      }
    }
    const CqOptions opt = fx.cq_options(cfg.budget);
    const std::string dir = resolve_out_dir(a.out_dir);
    bool mismatch = false;
    for (CqKind k : kinds) {
      const CqVerdict v = check_cq(p, x, k, opt);
      write_file(dir + "/" + fx.name + "." + to_string(k) + ".verdict.json", verdict_to_json(v) + "\n");
      out << std::left << std::setw(20) << to_string(k) << std::setw(20) << to_string(v.status);
      const auto& exp = fx.file.meta.expected;
      if (at_ref && exp.count(to_string(k))) {
        const bool ok = exp.at(to_string(k)) == to_string(v.status);
        mismatch = mismatch || !ok;
        out << (ok ? "matches expected" : "MISMATCH, expected " + exp.at(to_string(k)));
      }
      out << "\n";
    }
    return mismatch ? exit_code::kMismatch : exit_code::kOk;
  } catch (const InfeasiblePointError& e) {
    err << "nsdp diagnose: " << e.what() << " (measured infeasibility " << e.infeasibility() << ")\n";
    return exit_code::kError;
  } catch (const std::exception& e) {
    err << "nsdp diagnose: " << e.what() << "\n";
    return exit_code::kError;
  }
}

}  // namespace nsdp::cli
