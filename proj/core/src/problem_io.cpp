#include "nsdp/problem_io.hpp"

#include "nsdp/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace nsdp {

using nlohmann::json;

namespace {

struct Locator {
  const std::string& text;

  std::pair<int, int> at_offset(size_t off) const {
    int line = 1, col = 1;
    for (size_t i = 0; i < off && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

  // Position of the first occurrence of "key", or 1:1 when absent.
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const size_t off = text.find("\"" + key + "\"");
    const auto [l, c] = off == std::string::npos ? std::pair{1, 1} : at_offset(off);
    throw ParseError(key + ": " + msg, l, c);
  }
};

Vec read_vec(const json& j, int len, const std::string& key, const Locator& loc) {
  if (!j.is_array()) loc.fail(key, "expected an array of numbers");
  if (len >= 0 && static_cast<int>(j.size()) != len)
    loc.fail(key, "expected " + std::to_string(len) + " entries, got " + std::to_string(j.size()));
  Vec v(static_cast<int>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) loc.fail(key, "entry " + std::to_string(i) + " is not a number");
    v(static_cast<int>(i)) = j[i].get<double>();
  }
  return v;
}

// Flat row-major upper triangle, or a full nested array that must be symmetric.
Mat read_sym(const json& j, int k, const std::string& key, const Locator& loc) {
  if (!j.is_array()) loc.fail(key, "expected a matrix");
  Mat a(k, k);
  if (!j.empty() && j[0].is_array()) {
    if (static_cast<int>(j.size()) != k) loc.fail(key, "expected " + std::to_string(k) + " rows");
    for (int r = 0; r < k; ++r) {
      const Vec row = read_vec(j[r], k, key, loc);
      a.row(r) = row.transpose();
    }
    for (int r = 0; r < k; ++r)
      for (int c = r + 1; c < k; ++c)
        if (a(r, c) != a(c, r))
          loc.fail(key, "matrix is not symmetric at (" + std::to_string(r) + "," +
                            std::to_string(c) + ")");
    return a;
  }
  const Vec up = read_vec(j, k * (k + 1) / 2, key, loc);
  int t = 0;
  for (int r = 0; r < k; ++r)
    for (int c = r; c < k; ++c) a(r, c) = a(c, r) = up(t++);
  return a;
}

QuadraticFunction read_quadratic(const json& j, int n, const std::string& where,
                                 const Locator& loc) {
  QuadraticFunction q = QuadraticFunction::zero(n);
  if (!j.is_object()) loc.fail(where, "expected an object");
  if (j.contains("c0")) {
    if (!j["c0"].is_number()) loc.fail("c0", "expected a number");
    q.c0 = j["c0"].get<double>();
  }
  if (j.contains("c_lin")) q.c_lin = read_vec(j["c_lin"], n, "c_lin", loc);
  if (j.contains("C_quad")) q.c_quad = read_sym(j["C_quad"], n, "C_quad", loc);
  return q;
}

int read_int(const json& doc, const std::string& key, const Locator& loc) {
  if (!doc.contains(key)) loc.fail(key, "missing required key");
  if (!doc[key].is_number_integer() || doc[key].get<int>() < 1)
    loc.fail(key, "expected a positive integer");
  return doc[key].get<int>();
}

json sym_json(const SymMat& s) { return s.upper(); }

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json quad_json(const QuadraticFunction& q) {
  json j;
  j["c0"] = q.c0;
  j["c_lin"] = vec_json(q.c_lin);
  j["C_quad"] = sym_json(SymMat::from_upper(q.c_quad));
  return j;
}

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    Locator loc{text};
    const auto [l, c] = loc.at_offset(e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("malformed problem file", l, c);
  }
  Locator loc{text};
  if (!doc.is_object()) throw ParseError("top level must be an object", 1, 1);

  ProblemFile pf;
  const int n = read_int(doc, "n", loc);
  const int m = read_int(doc, "m", loc);
  pf.name = doc.value("name", std::string{});
  pf.poly = MatrixPolyProblem::empty(n, m);
  pf.poly.objective = read_quadratic(doc, n, "objective", loc);

  if (doc.contains("nlp_constraints")) {
    const json& g = doc["nlp_constraints"];
    if (!g.is_array() || static_cast<int>(g.size()) != m)
      loc.fail("nlp_constraints", "expected m constraint objects");
    for (const char* k : {"A0", "A_lin", "B_quad"})
      if (doc.contains(k)) loc.fail(k, "not allowed together with nlp_constraints");
    for (const auto& gi : g) pf.nlp_constraints.push_back(read_quadratic(gi, n, "nlp_constraints", loc));
    pf.poly = embed_diagonal_poly(pf.nlp_constraints, pf.poly.objective);
  } else {
    if (doc.contains("A0")) pf.poly.a0 = SymMat::from_upper(read_sym(doc["A0"], m, "A0", loc));
    if (doc.contains("A_lin")) {
      const json& a = doc["A_lin"];
      if (!a.is_array() || static_cast<int>(a.size()) != n)
        loc.fail("A_lin", "expected n matrices");
      for (int i = 0; i < n; ++i)
        pf.poly.a_lin[i] = SymMat::from_upper(read_sym(a[i], m, "A_lin", loc));
    }
    if (doc.contains("B_quad")) {
      const json& b = doc["B_quad"];
      if (!b.is_array()) loc.fail("B_quad", "expected a list of {i, j, coeff}");
      for (const auto& t : b) {
        if (!t.is_object() || !t.contains("i") || !t.contains("j") || !t.contains("coeff"))
          loc.fail("B_quad", "each term needs i, j and coeff");
        if (!t["i"].is_number_integer() || !t["j"].is_number_integer())
          loc.fail("B_quad", "indices must be integers");
        QuadTerm q;
        q.i = t["i"].get<int>();
        q.j = t["j"].get<int>();
        if (q.i > q.j) std::swap(q.i, q.j);
        if (q.i < 0 || q.j >= n) loc.fail("B_quad", "index out of range (0-based, < n)");
        q.coeff = SymMat::from_upper(read_sym(t["coeff"], m, "coeff", loc));
        pf.poly.b_quad.push_back(q);
      }
    }
  }

  if (doc.contains("x_ref")) pf.x_ref = read_vec(doc["x_ref"], n, "x_ref", loc);

  if (doc.contains("meta")) {
    const json& mj = doc["meta"];
    if (!mj.is_object()) loc.fail("meta", "expected an object");
    pf.meta.description = mj.value("description", std::string{});
    if (mj.contains("expected")) {
      if (!mj["expected"].is_object()) loc.fail("expected", "expected an object");
      for (const auto& [k, v] : mj["expected"].items()) {
        if (!v.is_string()) loc.fail("expected", "verdicts must be strings");
        const std::string s = v.get<std::string>();
        if (s != "CERTIFIED_HOLDS" && s != "NO_VIOLATION_FOUND" && s != "VIOLATED")
          loc.fail("expected", "unknown verdict '" + s + "'");
        pf.meta.expected[k] = s;
      }
    }
    if (mj.contains("witness_directions")) {
      if (!mj["witness_directions"].is_array()) loc.fail("witness_directions", "expected a list");
      for (const auto& d : mj["witness_directions"])
        pf.meta.witness_directions.push_back(read_vec(d, n, "witness_directions", loc));
    }
    if (mj.contains("witness_curves")) {
      if (!mj["witness_curves"].is_array()) loc.fail("witness_curves", "expected a list");
      for (const auto& c : mj["witness_curves"]) {
        if (!c.is_string()) loc.fail("witness_curves", "curve names must be strings");
        pf.meta.witness_curves.push_back(c.get<std::string>());
      }
    }
    if (mj.contains("solver_start"))
      pf.meta.solver_start = read_vec(mj["solver_start"], n, "solver_start", loc);
  }
  pf.poly.validate();
  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file '" + path + "'", 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string dump_problem(const ProblemFile& pf) {
  json doc;
  if (!pf.name.empty()) doc["name"] = pf.name;
  doc["n"] = pf.poly.n;
  doc["m"] = pf.poly.m;
  const json obj = quad_json(pf.poly.objective);
  doc["c0"] = obj["c0"];
  doc["c_lin"] = obj["c_lin"];
  doc["C_quad"] = obj["C_quad"];
  if (!pf.nlp_constraints.empty()) {
    doc["nlp_constraints"] = json::array();
    for (const auto& g : pf.nlp_constraints) doc["nlp_constraints"].push_back(quad_json(g));
  } else {
    doc["A0"] = sym_json(pf.poly.a0);
    doc["A_lin"] = json::array();
    for (const auto& a : pf.poly.a_lin) doc["A_lin"].push_back(sym_json(a));
    doc["B_quad"] = json::array();
    for (const auto& b : pf.poly.b_quad)
      doc["B_quad"].push_back({{"i", b.i}, {"j", b.j}, {"coeff", sym_json(b.coeff)}});
  }
  if (pf.x_ref) doc["x_ref"] = vec_json(*pf.x_ref);
  json meta = json::object();
  if (!pf.meta.description.empty()) meta["description"] = pf.meta.description;
  if (!pf.meta.expected.empty()) meta["expected"] = pf.meta.expected;
  if (!pf.meta.witness_directions.empty()) {
    meta["witness_directions"] = json::array();
    for (const auto& d : pf.meta.witness_directions) meta["witness_directions"].push_back(vec_json(d));
  }
  if (!pf.meta.witness_curves.empty()) meta["witness_curves"] = pf.meta.witness_curves;
  if (pf.meta.solver_start) meta["solver_start"] = vec_json(*pf.meta.solver_start);
  if (!meta.empty()) doc["meta"] = meta;
  return doc.dump(2) + "\n";
}

}  // namespace nsdp
