#include "fixtures.hpp"

#include "nsdp/errors.hpp"

#include <algorithm>
#include <filesystem>

namespace nsdp::cli {

Vec Fixture::point() const {
  if (!file.x_ref) throw Error("fixture " + name + " has no reference point");
  return *file.x_ref;
}

Vec Fixture::start() const {
  if (file.meta.solver_start) return *file.meta.solver_start;
  if (file.x_ref) return *file.x_ref;
  return Vec::Zero(file.poly.n);
}

std::vector<ScalarConstraint> Fixture::nlp_constraints() const {
  std::vector<ScalarConstraint> out;
  for (const auto& q : file.nlp_constraints) out.push_back(ScalarConstraint::from_quadratic(q));
  return out;
}

CqOptions Fixture::cq_options(const CqBudget& budget) const {
  CqOptions opt;
  opt.budget = budget;
  opt.witness_directions = file.meta.witness_directions;
  for (const auto& c : file.meta.witness_curves) {
    auto curve = registered_curve(c);
    if (!curve) throw Error("fixture " + name + " names an unknown curve '" + c + "'");
    opt.curves.push_back(*curve);
  }
  return opt;
}

namespace {

Fixture make(const std::string& stem, ProblemFile pf) {
  Fixture f;
  f.name = pf.name.empty() ? stem : pf.name;
  f.file = std::move(pf);
  if (f.file.name.empty()) f.file.name = f.name;
  return f;
}

}  // namespace

std::vector<Fixture> builtin_fixtures() {
  std::vector<Fixture> out;
  for (const auto& [stem, text] : embedded_fixture_texts()) {
    try {
      out.push_back(make(stem, parse_problem(text)));
    } catch (const ParseError& e) {
      throw Error("built-in fixture " + stem + ": " + e.what());
    }
  }
  return out;
}

Fixture fixture_from_file(const std::string& path) {
  return make(std::filesystem::path(path).stem().string(), load_problem(path));
}

std::vector<Fixture> load_fixture_dir(const std::string& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Fixture> out;
  for (const auto& p : files) out.push_back(fixture_from_file(p.string()));
  return out;
}

const Fixture* find_fixture(const std::vector<Fixture>& all, const std::string& name) {
  for (const auto& f : all)
    if (f.name == name) return &f;
  return nullptr;
}

}  // namespace nsdp::cli
