#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdfo/convex_sets.hpp"
#include "cdfo/subproblem.hpp"

namespace cdfo {

/// n+1 points {y_0, ..., y_n} in R^n with linearly independent directions
/// y_t - y_0. Column t of points() is y_t. Row t of values() holds the
/// objective value (one column) or residual vector at y_t; NaN marks a point
/// that has not been evaluated yet.
class InterpolationSet {
 public:
  /// Throws GeometryDegenerate when the direction matrix is rank deficient.
  InterpolationSet(Matrix points, Matrix values);
  /// Points only; values start out unevaluated with `value_dim` columns.
  static InterpolationSet from_points(Matrix points, Index value_dim = 1);

  Index dim() const { return points_.rows(); }
  Index size() const { return points_.cols(); }
  Index value_dim() const { return values_.cols(); }

  const Matrix& points() const { return points_; }
  const Matrix& values() const { return values_; }
  Vector base() const { return points_.col(0); }
  Vector point(Index t) const { return points_.col(t); }

  /// Rows are (y_t - y_0)^T, t = 1..n.
  const Matrix& directions() const { return directions_; }
  double abs_det() const;
  bool evaluated(Index t) const;
  bool fully_evaluated() const;
  double max_distance() const;

  /// Solves L x = rhs with the cached factorization.
  Matrix solve_directions(const Matrix& rhs) const;

  InterpolationSet with_point(Index t, const Vector& y, const Vector& value) const;
  InterpolationSet with_value(Index t, const Vector& value) const;

 private:
  Matrix points_;
  Matrix values_;
  Matrix directions_;
  Eigen::PartialPivLU<Matrix> lu_;
};

/// True when the smallest singular value of `rows` is at least 1e-10 times the
/// largest (and the largest is nonzero).
bool full_rank(const Matrix& rows);

/// m(y) = c + g^T (y - y_0)
struct LinearModel {
  double constant = 0.0;
  Vector gradient;
  Vector base;

  double operator()(const Vector& y) const { return constant + gradient.dot(y - base); }
};

LinearModel build_linear_model(const InterpolationSet& set);

struct LagrangePolynomial {
  Index index = 0;
  double constant = 0.0;
  Vector gradient;
  Vector base;

  double operator()(const Vector& y) const { return constant + gradient.dot(y - base); }
};

std::vector<LagrangePolynomial> lagrange_polynomials(const InterpolationSet& set);

struct PoisednessReport {
  std::vector<double> lambdas;     // max |l_t| over region ∩ B(y_0, min(delta, 1)), t = 0..n
  std::vector<Vector> maximizers;  // argmax for each t
  bool certified = true;

  double overall() const;
  /// max over t >= 1; the base point is never swapped out.
  double nonbase() const;
};

PoisednessReport poisedness_constant(const InterpolationSet& set, const ConvexRegion& region,
                                     double delta, const FistaSettings& settings = {});

/// Feasible points in region ∩ B(y_0, r) with independent directions. Candidate
/// directions are +e_1..+e_n, -e_1..-e_n, then seeded Gaussian unit vectors,
/// up to 500 n candidates in total.
InterpolationSet initial_feasible_set(const ConvexRegion& region, const Vector& y0, double r,
                                      std::uint64_t seed, Index value_dim = 1);

struct GeometryResult {
  InterpolationSet set;
  std::vector<Index> replaced;  // indices whose points changed (values unevaluated)
  int swaps = 0;                // poisedness-driven swaps
  int relocations = 0;          // points pulled in from outside beta * min(delta, 1)
  bool certified = true;
  PoisednessReport report;       // for the returned set
  std::vector<double> abs_dets;  // |det L| before the first swap and after each swap
  std::string diagnostic;
};

/// Swaps points until every l_t, t >= 1, is bounded by lambda on
/// region ∩ B(y_0, min(delta, 1)). Each swap replaces the index with the
/// largest Lambda_t (ties to the smallest index) by that polynomial's
/// maximizer. Points farther than beta * min(delta, 1) from y_0 are first
/// moved to their polynomial's maximizer. At most 10 n swaps.
GeometryResult improve_geometry(const InterpolationSet& set, const ConvexRegion& region, double delta,
                                double lambda, double beta, const FistaSettings& settings = {});

/// Plain-text table of points, values, Lambda_t and |det L|.
std::string format_geometry(const InterpolationSet& set, const PoisednessReport& report);

}  // namespace cdfo
