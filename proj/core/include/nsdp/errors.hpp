#pragma once

#include <stdexcept>
#include <string>

namespace nsdp {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

// Carries the off-diagonal (or gradient) residual at the point of giving up.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line), column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  int line_;
  int column_;
};

class InfeasiblePointError : public Error {
public:
  InfeasiblePointError(const std::string& what, double infeasibility)
      : Error(what), infeasibility_(infeasibility) {}
  double infeasibility() const noexcept { return infeasibility_; }

private:
  double infeasibility_;
};

}  // namespace nsdp
