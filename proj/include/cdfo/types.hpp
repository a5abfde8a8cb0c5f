#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cdfo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Feasibility yardstick shared by every module: a point is feasible when its
// distance to the projection is at most this value.
inline constexpr double kFeasibilityTol = 1e-10;

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by iterative projections that hit their iteration cap.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, Vector last_iterate, double residual)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

  const Vector& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  Vector last_iterate_;
  double residual_;
};

// Interpolation directions are (numerically) linearly dependent.
class GeometryDegenerate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cdfo
