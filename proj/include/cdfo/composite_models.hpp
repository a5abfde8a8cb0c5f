#pragma once

#include "cdfo/interpolation.hpp"
#include "cdfo/subproblem.hpp"

namespace cdfo {

/// r(y) ~ c + J (y - y_0)
struct ResidualModel {
  Vector constant;  // r(y_0), length N
  Matrix jacobian;  // N x n
  Vector base;

  Vector operator()(const Vector& y) const { return constant + jacobian * (y - base); }
};

/// Smooth outer function F of a composite objective f = F(r(x)).
struct OuterFunction {
  enum class Kind { kLeastSquares };  // F(r) = 1/2 ||r||^2
  Kind kind = Kind::kLeastSquares;

  double value(const Vector& r) const;
  Vector gradient(const Vector& r) const;
  Matrix hessian(const Vector& r) const;

  static OuterFunction least_squares() { return {}; }
};

/// Solves M [c^T; J^T] = [r(y_0)^T; ...; r(y_n)^T] with one factorization
/// shared by all N residual components.
ResidualModel build_residual_model(const InterpolationSet& set);

/// c = F(c_r), g = J^T grad F(c_r), H = J^T hess F(c_r) J.
QuadraticModel gauss_newton_model(const ResidualModel& rm, const OuterFunction& outer = {});

}  // namespace cdfo
