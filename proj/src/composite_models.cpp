#include "cdfo/composite_models.hpp"

namespace cdfo {

double OuterFunction::value(const Vector& r) const { return 0.5 * r.squaredNorm(); }

Vector OuterFunction::gradient(const Vector& r) const { return r; }

Matrix OuterFunction::hessian(const Vector& r) const {
  return Matrix::Identity(r.size(), r.size());
}

ResidualModel build_residual_model(const InterpolationSet& set) {
  if (!set.fully_evaluated()) throw InvalidArgument("build_residual_model: unevaluated points");
  const Index n = set.dim();
  const Matrix& values = set.values();
  // Rows t = 1..n: (y_t - y_0)^T J^T = r(y_t)^T - r(y_0)^T.
  const Matrix rhs = values.bottomRows(n).rowwise() - values.row(0);
  const Matrix jt = set.solve_directions(rhs);
  ResidualModel rm;
  rm.constant = values.row(0).transpose();
  rm.jacobian = jt.transpose();
  rm.base = set.base();
  return rm;
}

QuadraticModel gauss_newton_model(const ResidualModel& rm, const OuterFunction& outer) {
  QuadraticModel m;
  m.constant = outer.value(rm.constant);
  m.gradient = rm.jacobian.transpose() * outer.gradient(rm.constant);
  if (outer.kind == OuterFunction::Kind::kLeastSquares) {
    m.hessian = rm.jacobian.transpose() * rm.jacobian;
  } else {
    m.hessian = rm.jacobian.transpose() * outer.hessian(rm.constant) * rm.jacobian;
  }
  m.hessian = 0.5 * (m.hessian + m.hessian.transpose()).eval();
  m.base = rm.base;
  return m;
}

}  // namespace cdfo
