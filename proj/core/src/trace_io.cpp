#include "nsdp/errors.hpp"
#include "nsdp/trace.hpp"

#include <json.hpp>

#include <sstream>

namespace nsdp {

using nlohmann::json;

AkktCertificate SolverTrace::certificate() const {
  AkktCertificate c;
  for (const auto& r : records) c.records.push_back({r.x, r.y, r.delta, r.delta_x});
  return c;
}

namespace {

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<int>(v.size()));
}

}  // namespace

std::string trace_to_jsonl(const SolverTrace& t) {
  std::ostringstream os;
  os << json{{"type", "header"}, {"format", "nsdp-trace/1"}, {"solver", t.solver}, {"n", t.n},
             {"m", t.m}}
            .dump()
     << "\n";
  for (const auto& r : t.records) {
    json j;
    j["type"] = "iterate";
    j["k"] = r.k;
    j["x"] = vec_json(r.x);
    j["Y"] = r.y.upper();
    j["Y_tilde"] = r.y_tilde.upper();
    j["Delta"] = r.delta.upper();
    j["delta"] = vec_json(r.delta_x);
    j["rho"] = r.rho;
    j["V_norm"] = r.v_norm;
    j["rho_frozen"] = r.rho_frozen;
    j["inner_tol"] = r.inner_tol;
    j["step"] = r.step;
    j["inner"] = {{"iterations", r.inner.iterations},
                  {"grad_norm", r.inner.grad_norm},
                  {"status", r.inner.status}};
    j["residual"] = {{"stationarity", r.residual.stationarity},
                     {"feasibility", r.residual.feasibility},
                     {"complementarity", r.residual.complementarity},
                     {"dual_feasibility", r.residual.dual_feasibility}};
    os << j.dump() << "\n";
  }
  os << json{{"type", "end"}, {"termination", t.termination}, {"message", t.message}}.dump()
     << "\n";
  return os.str();
}

SolverTrace trace_from_jsonl(const std::string& text) {
  SolverTrace t;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("malformed trace record", lineno, static_cast<int>(e.byte));
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        t.solver = j.at("solver").get<std::string>();
        t.n = j.at("n").get<int>();
        t.m = j.at("m").get<int>();
      } else if (type == "iterate") {
        IterationRecord r;
        r.k = j.at("k").get<int>();
        r.x = json_vec(j.at("x"));
        r.y = SymMat::from_upper_list(t.m, j.at("Y").get<std::vector<double>>());
        r.y_tilde = SymMat::from_upper_list(t.m, j.at("Y_tilde").get<std::vector<double>>());
        r.delta = SymMat::from_upper_list(t.m, j.at("Delta").get<std::vector<double>>());
        r.delta_x = json_vec(j.at("delta"));
        r.rho = j.at("rho").get<double>();
        r.v_norm = j.at("V_norm").get<double>();
        r.rho_frozen = j.at("rho_frozen").get<bool>();
        r.inner_tol = j.at("inner_tol").get<double>();
        r.step = j.value("step", 1.0);
        const json& in = j.at("inner");
        r.inner = {in.at("iterations").get<int>(), in.at("grad_norm").get<double>(),
                   in.at("status").get<std::string>()};
        const json& res = j.at("residual");
        r.residual = {res.at("stationarity").get<double>(), res.at("feasibility").get<double>(),
                      res.at("complementarity").get<double>(),
                      res.at("dual_feasibility").get<double>()};
        t.records.push_back(std::move(r));
      } else if (type == "end") {
        t.termination = j.at("termination").get<std::string>();
        t.message = j.value("message", std::string{});
      } else {
        throw ParseError("unknown record type '" + type + "'", lineno, 1);
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad trace record: ") + e.what(), lineno, 1);
    } catch (const DimensionError& e) {
      throw ParseError(std::string("bad trace record: ") + e.what(), lineno, 1);
    }
  }
  return t;
}

}  // namespace nsdp
