#pragma once

#include "nsdp/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nsdp {

struct FixtureMeta {
  std::string description;
  // check name -> CERTIFIED_HOLDS | NO_VIOLATION_FOUND | VIOLATED
  std::map<std::string, std::string> expected;
  std::vector<Vec> witness_directions;
  std::vector<std::string> witness_curves;
  std::optional<Vec> solver_start;
};

struct ProblemFile {
  std::string name;
  MatrixPolyProblem poly;
  std::optional<Vec> x_ref;
  FixtureMeta meta;
  // Non-empty when the file describes an NLP; poly is then its diagonal embedding.
  std::vector<QuadraticFunction> nlp_constraints;

  NsdpProblem problem() const { return poly.to_problem(name); }
};

// Throws ParseError carrying a 1-based line and column.
ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);
std::string dump_problem(const ProblemFile& pf);

}  // namespace nsdp
