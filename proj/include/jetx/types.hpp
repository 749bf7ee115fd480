#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace jetx {

/// Largest ambient dimension handled by the library.
inline constexpr int kMaxDim = 4;

/// Point or gradient in R^n, n <= kMaxDim. Stack-allocated.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a modulus function (negative or non-finite).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numeric supremum was attained at the edge of the sampled range.
class RangeExceeded : public Error {
 public:
  using Error::Error;
};

/// Input data violates a structural requirement (lengths, dimensions, ordering).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Malformed JSON input. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// The jet admits no finite extension constant within the searched bracket.
class NotExtendable : public Error {
 public:
  using Error::Error;
};

/// Grid construction or snapping failure (point off-grid, colliding nodes, too many nodes).
class GridError : public Error {
 public:
  using Error::Error;
};

/// Iteration did not reach its fixed point, or produced a non-monotone iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace jetx
