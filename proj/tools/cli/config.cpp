#include "config.hpp"

#include "nsdp/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nsdp::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error("config: " + where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw Error("config: unknown key '" + k + "' in " + where);
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_budget_json(CqBudget& b, const json& j) {
  only_keys(j,
            {"n_q", "t0", "levels", "random_directions", "sequence_hits", "robinson_iters",
             "robinson_restarts", "zero_search_starts", "perturbation_samples",
             "neighborhood_random_directions", "msr_samples", "msr_radius", "msr_shrink",
             "msr_growth", "max_kernel_dim", "seed"},
            "budget");
  get(j, "n_q", b.n_q);
  get(j, "t0", b.t0);
  get(j, "levels", b.levels);
  get(j, "random_directions", b.random_directions);
  get(j, "sequence_hits", b.sequence_hits);
  get(j, "robinson_iters", b.robinson_iters);
  get(j, "robinson_restarts", b.robinson_restarts);
  get(j, "zero_search_starts", b.zero_search_starts);
  get(j, "perturbation_samples", b.perturbation_samples);
  get(j, "neighborhood_random_directions", b.neighborhood_random_directions);
  get(j, "msr_samples", b.msr_samples);
  get(j, "msr_radius", b.msr_radius);
  get(j, "msr_shrink", b.msr_shrink);
  get(j, "msr_growth", b.msr_growth);
  get(j, "max_kernel_dim", b.max_kernel_dim);
  get(j, "seed", b.seed);
}

void apply_al_json(AlConfig& a, const json& j) {
  only_keys(j,
            {"eps0", "eps_ratio", "safeguard_radius", "theta", "gamma", "rho1", "policy",
             "inner_max_iter"},
            "al");
  get(j, "eps0", a.eps0);
  get(j, "eps_ratio", a.eps_ratio);
  get(j, "safeguard_radius", a.safeguard_radius);
  get(j, "theta", a.theta);
  get(j, "gamma", a.gamma);
  get(j, "rho1", a.rho1);
  get(j, "inner_max_iter", a.inner_max_iter);
  if (j.contains("policy")) {
    const std::string p = j.at("policy");
    if (p == "projection") a.policy = SafeguardPolicy::Projection;
    else if (p == "zero") a.policy = SafeguardPolicy::Zero;
    else if (p == "hold") a.policy = SafeguardPolicy::Hold;
    else throw Error("config: al.policy must be projection, zero or hold");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  try {
    only_keys(j, {"target_tol", "max_outer", "penalty", "al", "sqp", "budget"}, "config");
    get(j, "target_tol", c.target_tol);
    get(j, "max_outer", c.max_outer);
    if (j.contains("penalty")) {
      only_keys(j["penalty"], {"rho1", "factor"}, "penalty");
      get(j["penalty"], "rho1", c.penalty_rho1);
      get(j["penalty"], "factor", c.penalty_factor);
    }
    if (j.contains("al")) apply_al_json(c.al, j["al"]);
    if (j.contains("sqp")) {
      const json& s = j["sqp"];
      only_keys(s, {"armijo_sigma", "max_halvings", "h_policy", "h_cap", "sub_target_factor",
                    "sub_max_outer"},
                "sqp");
      get(s, "armijo_sigma", c.sqp.armijo_sigma);
      get(s, "max_halvings", c.sqp.max_halvings);
      get(s, "h_cap", c.sqp.h_cap);
      get(s, "sub_target_factor", c.sqp.sub_target_factor);
      get(s, "sub_max_outer", c.sqp.sub_max_outer);
      if (s.contains("h_policy")) {
        const std::string h = s.at("h_policy");
        if (h == "bfgs") c.sqp.h_policy = HessianPolicy::DampedBfgs;
        else if (h == "identity") c.sqp.h_policy = HessianPolicy::Identity;
        else throw Error("config: sqp.h_policy must be bfgs or identity");
      }
    }
    if (j.contains("budget")) apply_budget_json(c.budget, j["budget"]);
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  if (!(c.target_tol > 0.0)) throw Error("config: target_tol must be positive");
  if (c.max_outer < 1) throw Error("config: max_outer must be at least 1");
  c.al.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_budget_override(CqBudget& b, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("--budget expects key=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq);
  json value;
  try {
    value = json::parse(kv.substr(eq + 1));
  } catch (const json::parse_error&) {
    throw Error("--budget: value for " + key + " is not a number");
  }
  try {
    apply_budget_json(b, json{{key, value}});
  } catch (const json::exception& e) {
    throw Error(std::string("--budget: ") + e.what());
  }
}

PenaltyConfig penalty_config(const RunConfig& c) {
  PenaltyConfig p = PenaltyConfig::geometric(c.max_outer, c.target_tol, c.penalty_rho1, c.penalty_factor);
  p.inner_max_iter = c.al.inner_max_iter;
  p.inner = c.al.inner;
  return p;
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace nsdp::cli
