#pragma once

#include <optional>

#include "cdfo/convex_sets.hpp"

namespace cdfo {

/// m(y) = c + g^T (y - x) + 1/2 (y - x)^T H (y - x)
struct QuadraticModel {
  double constant = 0.0;
  Vector gradient;
  Matrix hessian;  // symmetric; may be identically zero
  Vector base;

  Index dim() const { return gradient.size(); }
  /// Model value at base + step.
  double value_at_step(const Vector& step) const;
  /// m(x) - m(x + step)
  double decrease(const Vector& step) const;

  static QuadraticModel linear(double constant, Vector gradient, Vector base);
};

struct FistaSettings {
  double step_tolerance = 1e-12;
  int max_iterations_factor = 100;  // iteration cap = factor * n^2
  DykstraSettings dykstra{};

  int iteration_cap(Index n) const { return max_iterations_factor * static_cast<int>(n * n); }
};

struct TrustRegionStep {
  Vector step;
  bool certified = true;  // false when the iteration cap was reached
  int iterations = 0;
};

/// Approximate minimizer of the model over {s : x+s in region, ||s|| <= delta}
/// by accelerated projected gradient. The best iterate by model value is
/// returned, so the step never increases the model; x+s is projected back onto
/// the region and pulled inside the ball along the segment from x.
TrustRegionStep solve_trust_region(const QuadraticModel& model, const ConvexRegion& region,
                                   double delta, const FistaSettings& settings = {});

struct Criticality {
  double value = 0.0;  // pi >= 0
  Vector direction;    // feasible minimizer d of g^T d, ||d|| <= 1
  bool certified = true;
};

/// pi = |min { g^T d : x + d in region, ||d|| <= 1 }|
Criticality criticality_measure(const Vector& gradient, const ConvexRegion& region, const Vector& x,
                                const FistaSettings& settings = {});

/// Minimizes g^T (y - center) over region ∩ B(center, radius). With
/// `stop_below`, returns as soon as an iterate attains a value below it.
struct LinearMinimum {
  Vector point;
  double value = 0.0;
  bool certified = true;
};
LinearMinimum minimize_linear(const Vector& gradient, const ConvexRegion& region,
                              const Vector& center, double radius, const FistaSettings& settings = {},
                              std::optional<double> stop_below = std::nullopt);

/// Spectral-norm estimate used as the FISTA Lipschitz constant: 30 power
/// iterations from a fixed start, replaced by the Frobenius norm when the
/// iteration has not settled.
double lipschitz_estimate(const Matrix& hessian);

/// Exact spectral norm of a symmetric matrix.
double spectral_norm(const Matrix& hessian);

/// m(x) - m(x+s) >= c1 * pi * min(pi / (1 + ||H||), delta, 1)
bool cauchy_decrease_holds(const QuadraticModel& model, const Vector& step, double pi, double delta,
                           double c1);
double cauchy_threshold(const QuadraticModel& model, double pi, double delta, double c1);

/// Backtracking projected-gradient step s(t) = P(x - t g) - x over the capped
/// region, t in {1, 1/2, ..., 2^-20}. The first step meeting the Cauchy
/// condition is returned; otherwise the criticality direction scaled by the
/// curvature along it (which meets the condition for c1 <= 1/2) is compared
/// with the best backtracking step.
Vector fallback_cauchy_step(const QuadraticModel& model, const ConvexRegion& region, double delta,
                            const FistaSettings& settings = {}, double c1 = 0.1,
                            const Criticality* criticality = nullptr);

}  // namespace cdfo
