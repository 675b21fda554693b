#include "regress.hpp"

#include "commands.hpp"

#include "nsdp/caratheodory.hpp"
#include "nsdp/errors.hpp"
#include "nsdp/verdict_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <future>
#include <iomanip>
#include <sstream>

namespace nsdp::cli {

using nlohmann::json;

int RegressOutput::failures() const {
  int n = 0;
  for (const auto& e : entries) n += e.passed ? 0 : 1;
  return n;
}

AkktCertificate recovery_certificate(const SolverTrace& t, int min_records, double target_tol) {
  AkktCertificate c = t.certificate();
  if (c.records.empty() || static_cast<int>(c.records.size()) >= min_records) return c;
  if (!t.converged() || t.last().residual.max() > target_tol) return c;
  const AkktRecord last = c.records.back();
  while (static_cast<int>(c.records.size()) < min_records) c.records.push_back(last);
  return c;
}

namespace {

constexpr double kAkktTol = 1e-4;
constexpr double kZeroPolicyTol = 1e-12;
constexpr double kFeasibleLimit = 1e-4;
constexpr double kInfeasStationarity = 1e-5;

RegressEntry entry(const std::string& suite, std::string name, bool ok, std::string detail = {}) {
  RegressEntry e;
  e.suite = suite;
  e.name = std::move(name);
  e.passed = ok;
  e.detail = std::move(detail);
  return e;
}

std::string g17(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

// ---------------------------------------------------------------- cq suite

struct CqFixtureResult {
  std::vector<RegressEntry> entries;
  std::map<std::string, std::string> files;
};

std::string msr_csv(const CqVerdict& v) {
  std::ostringstream o;
  o << std::setprecision(17) << "radius,sample,distance,infeasibility,dist,ratio,counted,solve_ok\n";
  for (const auto& est : v.msr)
    for (size_t s = 0; s < est.samples.size(); ++s) {
      const auto& smp = est.samples[s];
      o << est.radius << ',' << s << ',' << (smp.x - v.x_bar).norm() << ',' << smp.infeasibility
        << ',' << smp.dist << ',' << smp.ratio << ',' << (smp.counted ? 1 : 0) << ','
        << (smp.solve_ok ? 1 : 0) << '\n';
    }
  return o.str();
}

CqFixtureResult cq_fixture(const Fixture& fx, const RunConfig& cfg) {
  CqFixtureResult out;
  const std::string S = "cq";
  if (!fx.has_point()) return out;
  const NsdpProblem p = fx.problem();
  const Vec x = fx.point();
  const CqOptions opt = fx.cq_options(cfg.budget);
  const auto& expected = fx.file.meta.expected;

  std::map<CqKind, CqStatus> actual;
  for (CqKind k : all_cq_kinds()) {
    const std::string kn = to_string(k);
    const std::string name = "verdict/" + fx.name + "/" + kn;
    CqVerdict v;
    try {
      v = check_cq(p, x, k, opt);
    } catch (const std::exception& e) {
      out.entries.push_back(entry(S, name, false, std::string("error: ") + e.what()));
      continue;
    }
    actual[k] = v.status;
    out.files["verdicts/" + fx.name + "." + kn + ".verdict.json"] = verdict_to_json(v) + "\n";
    if (k == CqKind::Msr) out.files["series/" + fx.name + ".msr.csv"] = msr_csv(v);

    const std::string got = to_string(v.status);
    RegressEntry e = entry(S, name, true, got);
    e.values.emplace_back("rank", v.rank);
    if (auto it = expected.find(kn); it != expected.end()) {
      e.passed = it->second == got;
      if (!e.passed) e.detail = "MISMATCH: got " + got + ", expected " + it->second;
    }
    out.entries.push_back(e);

    if (v.status == CqStatus::Violated && v.witness) {
      std::string why;
      const bool ok = replay_witness(p, v, &why);
      out.entries.push_back(entry(S, "replay/" + fx.name + "/" + kn, ok, ok ? v.witness->kind : why));
    }
  }

  auto conflict_text = [](const std::vector<ImplicationConflict>& cs) {
    std::string s;
    for (const auto& c : cs)
      s += std::string(s.empty() ? "" : "; ") + to_string(c.stronger) + " is " +
           to_string(c.stronger_status) + " while " + to_string(c.weaker) + " is VIOLATED";
    return s;
  };
  const auto conflicts = implication_conflicts(actual);
  out.entries.push_back(entry(S, "implication/" + fx.name, conflicts.empty(), conflict_text(conflicts)));

  std::map<CqKind, CqStatus> table;
  for (const auto& [k, s] : expected)
    if (auto kind = cq_kind_from_string(k); kind)
      if (auto st = cq_status_from_string(s); st) table[*kind] = *st;
  const auto tconf = implication_conflicts(table);
  out.entries.push_back(entry(S, "expected-table/" + fx.name, tconf.empty(), conflict_text(tconf)));

  if (fx.is_nlp()) {
    const auto g = fx.nlp_constraints();
    for (const auto& [kind, positive] :
         {std::pair{CqKind::WeakCrcq, false}, std::pair{CqKind::WeakCpld, true}}) {
      const std::string name = std::string("nlp-equivalence/") + fx.name + "/" + to_string(kind);
      if (!actual.count(kind)) {
        out.entries.push_back(entry(S, name, false, "SDP-side verdict missing"));
        continue;
      }
      const NlpCqResult nlp = check_nlp_cq(g, x, positive, opt);
      const bool ok = nlp.status == actual[kind];
      out.entries.push_back(entry(S, name, ok,
                                  std::string("nlp ") + to_string(nlp.status) + ", sdp " +
                                      to_string(actual[kind])));
    }
  }
  return out;
}

void run_cq(const std::vector<Fixture>& fixtures, const RunConfig& cfg, RegressOutput& out) {
  // Fixtures are independent and every sampler seeds itself from the budget,
  // so running them concurrently leaves the results unchanged.
  std::vector<std::future<CqFixtureResult>> jobs;
  for (const auto& fx : fixtures)
    jobs.push_back(std::async(std::launch::async, [&fx, &cfg] { return cq_fixture(fx, cfg); }));
  for (auto& j : jobs) {
    CqFixtureResult r = j.get();
    out.entries.insert(out.entries.end(), r.entries.begin(), r.entries.end());
    out.files.insert(r.files.begin(), r.files.end());
  }
}

// ----------------------------------------------------------- solvers suite

double infeasibility_stationarity(const NsdpProblem& p, const Vec& x) {
  return adjoint_dg(p, x, proj_psd(-p.g_eval(x))).norm();
}

void solvers_fixture(const Fixture& fx, const RunConfig& cfg, RegressOutput& out) {
  const std::string S = "solvers";
  const NsdpProblem p = fx.problem();
  const Vec x0 = fx.start();
  std::map<std::string, SolverTrace> traces;

  for (const std::string solver : {"penalty", "al", "sqp"}) {
    const std::string name = "solve/" + fx.name + "/" + solver;
    try {
      SolverTrace t = run_solver(solver, p, x0, cfg);
      out.files["series/" + fx.name + "." + solver + ".residuals.csv"] = residual_csv(t);
      RegressEntry e = entry(S, name, true, t.termination);
      e.values.emplace_back("iterations", static_cast<double>(t.records.size()));
      e.values.emplace_back("kkt_max", t.last().residual.max());
      if (t.converged()) {
        const AkktCheck ak = akkt_check(p, t.certificate(), kAkktTol);
        e.passed = ak.passed;
        if (!ak.passed) e.detail += ": akkt_check failed at " + std::to_string(ak.first_failure) + " (" + ak.reason + ")";
      }
      out.entries.push_back(e);
      traces.emplace(solver, std::move(t));
    } catch (const std::exception& ex) {
      out.entries.push_back(entry(S, name, false, std::string("error: ") + ex.what()));
    }
  }

  // AL with the zero safeguard is the external penalty method run on the AL's
  // own ρ and ε schedules.
  try {
    RunConfig zc = cfg;
    zc.al.policy = SafeguardPolicy::Zero;
    const SolverTrace al = solve_augmented_lagrangian(p, x0, zc.al, zc.target_tol, zc.max_outer);
    std::vector<double> rho, eps;
    for (const auto& r : al.records) {
      rho.push_back(r.rho);
      eps.push_back(r.inner_tol);
    }
    const SolverTrace pen = solve_external_penalty(p, x0, rho, eps, static_cast<int>(rho.size()));
    const size_t n = std::min(al.records.size(), pen.records.size());
    double worst = 0.0;
    for (size_t k = 0; k < n; ++k)
      worst = std::max(worst, (al.records[k].x - pen.records[k].x).lpNorm<Eigen::Infinity>());
    const bool ok = n > 0 && al.records.size() == pen.records.size() && worst <= kZeroPolicyTol;
    RegressEntry e = entry(S, "zero-safeguard/" + fx.name, ok,
                           ok ? "" : "iterates differ by " + g17(worst) + " over " + std::to_string(n) + " records");
    e.values.emplace_back("max_iterate_gap", worst);
    out.entries.push_back(e);
  } catch (const std::exception& ex) {
    out.entries.push_back(entry(S, "zero-safeguard/" + fx.name, false, std::string("error: ") + ex.what()));
  }

  auto al_it = traces.find("al");
  if (al_it == traces.end()) return;
  const SolverTrace& al = al_it->second;
  const IterationRecord& last = al.last();

  // A limit that stays infeasible must at least be stationary for the infeasibility.
  // SQP stops where its linearization fails, which is not a limit point.
  for (const auto& [solver, t] : traces) {
    if (solver == "sqp" || t.last().residual.feasibility <= kFeasibleLimit) continue;
    const double s = infeasibility_stationarity(p, t.last().x);
    RegressEntry e = entry(S, "infeasible-limit/" + fx.name + "/" + solver, s <= kInfeasStationarity,
                           "gradient of the squared infeasibility " + g17(s));
    e.values.emplace_back("stationarity", s);
    out.entries.push_back(e);
  }

  // Multipliers at the AL limit: bounded where seq-CPLD is not refuted,
  // divergent where weak-CPLD fails.
  if (!fx.has_point() || last.residual.feasibility > kFeasibleLimit) return;
  const std::string name = "recovery/" + fx.name;
  try {
    const CqVerdict seq = check_cq(p, fx.point(), CqKind::SeqCpld, fx.cq_options(cfg.budget));
    const auto& exp = fx.file.meta.expected;
    const bool weak_cpld_fails = exp.count("weak-cpld") && exp.at("weak-cpld") == "VIOLATED";
    const RecoveryConfig rc;
    const AkktCertificate cert = recovery_certificate(al, rc.min_records, cfg.target_tol);
    if (static_cast<int>(cert.records.size()) < rc.min_records) {
      out.entries.push_back(entry(S, name, seq.status == CqStatus::Violated, "trace too short for recovery"));
      return;
    }
    const MultiplierRecovery rec = recover_multiplier(p, cert, last.x, rc);
    const std::string got = to_string(rec.status);
    RegressEntry e = entry(S, name, true, "seq-cpld " + std::string(to_string(seq.status)) + ", recovery " + got);
    if (weak_cpld_fails) {
      e.passed = rec.status == RecoveryStatus::Diverged;
    } else if (seq.status != CqStatus::Violated) {
      e.passed = rec.status == RecoveryStatus::Success && rec.residual.max() <= rc.residual_tol;
      e.values.emplace_back("recovered_kkt_max", rec.residual.max());
    }
    out.entries.push_back(e);
  } catch (const std::exception& ex) {
    out.entries.push_back(entry(S, name, false, std::string("error: ") + ex.what()));
  }
}

// --------------------------------------------------------------- msr suite

void run_msr(const std::vector<Fixture>& fixtures, const RunConfig& cfg, RegressOutput& out) {
  const std::string S = "msr";
  for (const auto& fx : fixtures) {
    if (!fx.has_point()) continue;
    const std::string name = "ratio-curve/" + fx.name;
    try {
      const NsdpProblem p = fx.problem();
      const Vec xb = fx.point();
      const MsrEstimate est = estimate_msr_modulus(p, xb, cfg.budget.msr_radius, cfg.budget.msr_samples,
                                                   derive_seed(cfg.budget.seed, 0x4d5352));
      std::ostringstream o;
      o << std::setprecision(17) << "sample,distance,infeasibility,dist,ratio,counted,solve_ok\n";
      for (size_t s = 0; s < est.samples.size(); ++s) {
        const auto& smp = est.samples[s];
        o << s << ',' << (smp.x - xb).norm() << ',' << smp.infeasibility << ',' << smp.dist << ','
          << smp.ratio << ',' << (smp.counted ? 1 : 0) << ',' << (smp.solve_ok ? 1 : 0) << '\n';
      }
      out.files["series/" + fx.name + ".ratio-curve.csv"] = o.str();
      RegressEntry e = entry(S, name, !est.unreliable, "gamma_hat " + g17(est.gamma_hat));
      // The half-plane pair of the diagonal example has ratio exactly one.
      if (fx.name == "ex-4.3") {
        e.passed = e.passed && est.gamma_hat >= 0.99 && est.gamma_hat <= 1.01;
        if (!e.passed) e.detail += " outside [0.99, 1.01]";
      }
      if (est.unreliable) e.detail += ", too many projection failures";
      e.values.emplace_back("gamma_hat", est.gamma_hat);
      e.values.emplace_back("failures", est.failures);
      out.entries.push_back(e);
    } catch (const std::exception& ex) {
      out.entries.push_back(entry(S, name, false, std::string("error: ") + ex.what()));
    }
  }
}

// -------------------------------------------------------- properties suite

constexpr int kPropertyCases = 100;

SymMat random_sym(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Mat a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = N(rng);
  return SymMat::from_upper(a + a.transpose());
}

template <class F>
void property(RegressOutput& out, const std::string& name, std::uint64_t seed, F&& check) {
  std::mt19937_64 rng(seed);
  int bad = -1;
  std::string why;
  for (int c = 0; c < kPropertyCases && bad < 0; ++c)
    if (!check(rng, why)) bad = c;
  out.entries.push_back(entry("properties", name, bad < 0,
                              bad < 0 ? std::to_string(kPropertyCases) + " cases"
                                      : "case " + std::to_string(bad) + ": " + why));
}

void run_properties(const RunConfig& cfg, RegressOutput& out) {
  const std::uint64_t seed = cfg.budget.seed;
  std::uniform_int_distribution<int> dim(1, 6);

  property(out, "moreau", derive_seed(seed, 1), [&](std::mt19937_64& rng, std::string& why) {
    const SymMat m = random_sym(dim(rng), rng);
    const MoreauParts mp = moreau_split(m);
    const double scale = 1.0 + m.fro();
    why = "Moreau identity";
    if ((m - (mp.plus - mp.minus)).fro() > 1e-10 * scale) return false;
    why = "orthogonality";
    if (std::abs(inner(mp.plus, mp.minus)) > 1e-10 * scale * scale) return false;
    why = "parts not PSD";
    return lambda_min(mp.plus) >= -1e-10 * scale && lambda_min(mp.minus) >= -1e-10 * scale;
  });

  property(out, "projection-optimality", derive_seed(seed, 2), [&](std::mt19937_64& rng, std::string& why) {
    const int m = dim(rng);
    const SymMat a = random_sym(m, rng);
    const SymMat pa = proj_psd(a);
    const double best = (a - pa).fro();
    for (int t = 0; t < 20; ++t) {
      const SymMat b = random_sym(m, rng);
      const SymMat z = SymMat::from_upper(b.mat() * b.mat().transpose());
      if ((a - z).fro() < best - 1e-10 * (1.0 + best)) {
        why = "a PSD matrix beats the projection";
        return false;
      }
    }
    return true;
  });

  property(out, "caratheodory", derive_seed(seed, 3), [&](std::mt19937_64& rng, std::string& why) {
    std::normal_distribution<double> N;
    std::uniform_real_distribution<double> U(0.1, 2.0);
    const int n = dim(rng);
    const int q = dim(rng) + 1;
    ConicCombination c;
    Vec target = Vec::Zero(n);
    for (int i = 0; i < q; ++i) {
      Vec z(n);
      for (int l = 0; l < n; ++l) z(l) = N(rng);
      c.vectors.push_back(z);
      c.coeffs.push_back(U(rng));
      target += c.coeffs.back() * z;
    }
    const Reduction r = reduce(c);
    Vec sum = Vec::Zero(n);
    std::vector<Vec> chosen;
    for (size_t t = 0; t < r.subset.size(); ++t) {
      if (!(r.coeffs[t] > 0)) {
        why = "coefficient lost its sign";
        return false;
      }
      sum += r.coeffs[t] * c.vectors[r.subset[t]];
      chosen.push_back(c.vectors[r.subset[t]]);
    }
    why = "combination not reproduced";
    if ((sum - target).norm() > 1e-8 * (1.0 + target.norm())) return false;
    why = "reduced family dependent";
    return !lin_dependent(chosen);
  });

  property(out, "linear-dependence", derive_seed(seed, 4), [&](std::mt19937_64& rng, std::string& why) {
    std::normal_distribution<double> N;
    const int n = dim(rng) + 1;
    std::uniform_int_distribution<int> cnt(1, n);
    const int q = cnt(rng);
    std::vector<Vec> fam;
    for (int i = 0; i < q; ++i) {
      Vec z(n);
      for (int l = 0; l < n; ++l) z(l) = N(rng);
      fam.push_back(z);
    }
    why = "generic family reported dependent";
    if (lin_dependent(fam)) return false;
    Vec extra = Vec::Zero(n);
    for (const auto& z : fam) extra += N(rng) * z;
    fam.push_back(extra);
    why = "explicit combination reported independent";
    if (!lin_dependent(fam)) return false;
    fam.push_back(-fam.front());
    why = "opposite pair reported positively independent";
    return pos_lin_dependent(fam);
  });

  property(out, "al-gradient", derive_seed(seed, 5), [&](std::mt19937_64& rng, std::string& why) {
    std::normal_distribution<double> N;
    const int n = dim(rng);
    const int m = dim(rng);
    MatrixPolyProblem mp = MatrixPolyProblem::empty(n, m);
    for (int l = 0; l < n; ++l) mp.objective.c_lin(l) = N(rng);
    mp.a0 = random_sym(m, rng);
    for (int l = 0; l < n; ++l) mp.a_lin[l] = random_sym(m, rng);
    mp.b_quad.push_back({0, n - 1, random_sym(m, rng)});
    const NsdpProblem p = mp.to_problem();
    Vec x(n);
    for (int l = 0; l < n; ++l) x(l) = N(rng);
    const SymMat b = random_sym(m, rng);
    const SymMat yt = SymMat::from_upper(b.mat() * b.mat().transpose());
    const double rho = 0.5 + std::abs(N(rng));
    const Vec g = al_gradient(p, x, rho, yt);
    const Vec fd = fd_grad([&](const Vec& z) { return al_value(p, z, rho, yt); }, x);
    why = "gradient differs from central differences by " + g17((g - fd).norm());
    return (g - fd).norm() <= 1e-5 * (1.0 + g.norm());
  });
}

void append_entry_json(json& arr, const RegressEntry& e) {
  json j = {{"suite", e.suite}, {"name", e.name}, {"passed", e.passed}, {"detail", e.detail}};
  json vals = json::object();
  for (const auto& [k, v] : e.values) vals[k] = v;
  j["values"] = vals;
  arr.push_back(j);
}

}  // namespace

RegressOutput run_regress(const std::string& suite, const std::vector<Fixture>& fixtures,
                          const RunConfig& cfg) {
  auto wanted = [&](const std::string& s) { return suite == "all" || suite == s; };
  if (suite != "all" && std::find(regress_suites().begin(), regress_suites().end(), suite) == regress_suites().end())
    throw Error("unknown suite '" + suite + "' (all, cq, solvers, msr, properties)");
  RegressOutput out;
  if (wanted("cq")) run_cq(fixtures, cfg, out);
  if (wanted("solvers"))
    for (const auto& fx : fixtures) solvers_fixture(fx, cfg, out);
  if (wanted("msr")) run_msr(fixtures, cfg, out);
  if (wanted("properties")) run_properties(cfg, out);
  return out;
}

std::string report_body(const RegressOutput& out, const std::string& suite, std::uint64_t seed) {
  json doc;
  doc["format"] = "nsdp-report/1";
  doc["suite"] = suite;
  doc["seed"] = seed;
  doc["entries"] = json::array();
  for (const auto& e : out.entries) append_entry_json(doc["entries"], e);
  doc["passed"] = static_cast<int>(out.entries.size()) - out.failures();
  doc["failed"] = out.failures();
  json files = json::array();
  for (const auto& [path, content] : out.files) files.push_back({{"path", path}, {"fnv1a64", hex64(fnv1a64(content))}});
  doc["files"] = files;
  return doc.dump(2) + "\n";
}

int cmd_regress(const RegressArgs& a, std::ostream& out, std::ostream& err) {
  try {
    if (!a.problem.empty()) throw Error("regress runs on the fixture registry; --problem is not accepted");
    std::vector<Fixture> fixtures = registry(a);
    if (!a.fixture.empty()) {
      const Fixture* f = find_fixture(fixtures, a.fixture);
      if (!f) throw Error("unknown fixture '" + a.fixture + "'");
      fixtures = {*f};
    }
    const RunConfig cfg = resolve_config(a);
    const RegressOutput res = run_regress(a.suite, fixtures, cfg);

    const std::string dir = resolve_out_dir(a.out_dir);
    for (const auto& [path, content] : res.files) write_file(dir + "/" + path, content);
    const std::string body = report_body(res, a.suite, cfg.budget.seed);
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream header;
    header << "# nsdp regress report generated " << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << "\n";
    write_file(dir + "/report.json", header.str() + body);
    const std::string hash = hex64(fnv1a64(body));
    write_file(dir + "/report.hash", hash + "\n");

    for (const auto& e : res.entries)
      if (!e.passed) out << "FAIL " << e.suite << " " << e.name << ": " << e.detail << "\n";
    out << res.entries.size() - res.failures() << " passed, " << res.failures() << " failed\n"
        << "report " << dir << "/report.json (hash " << hash << ")\n";
    return res.failures() == 0 ? exit_code::kOk : exit_code::kMismatch;
  } catch (const std::exception& e) {
    err << "nsdp regress: " << e.what() << "\n";
    return exit_code::kError;
  }
}

}  // namespace nsdp::cli
