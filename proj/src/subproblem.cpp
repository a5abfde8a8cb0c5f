#include "cdfo/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cdfo {

namespace {

bool is_zero(const Matrix& h) { return h.size() == 0 || h.isZero(0.0); }

double quadratic_part(const Vector& g, const Matrix& h, const Vector& d) {
  double v = g.dot(d);
  if (!is_zero(h)) v += 0.5 * d.dot(h * d);
  return v;
}

// Exactly feasible point: project onto the region, then move toward the
// (feasible) center until inside the ball. Convexity keeps the region.
Vector pull_inside(const ConvexRegion& region, const Vector& center, double radius,
                   const Vector& point, const DykstraSettings& dykstra) {
  Vector w;
  if (region.kind() == RegionKind::kIntersection) {
    try {
      w = dykstra_project(region.members(), point, dykstra);
    } catch (const ConvergenceFailure& e) {
      w = e.last_iterate();
    }
  } else {
    w = project(region, point);
  }
  const Vector d = w - center;
  const double norm = d.norm();
  if (norm > radius) w = center + (radius / norm) * d;
  return w;
}

struct FistaResult {
  Vector point;
  double value = 0.0;  // objective without the constant term
  bool certified = true;
  int iterations = 0;
};

// Minimizer of g^T (y - c) over region ∩ B(c, r). Along the projected path
// y(t) = P_C(c - t g) both ||y(t) - c|| and g^T y(t) are monotone in t, and
// y(t) is optimal once it reaches the sphere, so a bracketing search on t
// replaces iterative minimization.
FistaResult linear_path(const Vector& g, const ConvexRegion& region, const Vector& center, double radius,
                        const DykstraSettings& dykstra) {
  FistaResult out;
  out.point = center;
  const double gnorm = g.norm();
  if (gnorm == 0.0) return out;

  auto path = [&](double t) -> Vector {
    const Vector z = center - t * g;
    if (region.kind() != RegionKind::kIntersection) return project(region, z);
    try {
      return dykstra_project(region.members(), z, dykstra);
    } catch (const ConvergenceFailure& e) {
      out.certified = false;
      return e.last_iterate();
    }
  };
  auto inside = [&](const Vector& y) { return (y - center).norm() <= radius; };

  double lo = 0.0;
  Vector y_lo = center;
  double hi = radius / gnorm;  // non-expansiveness keeps y(hi) in the ball
  Vector y_hi = path(hi);
  int evals = 1;
  bool bracketed = false;
  for (int grow = 0; grow < 200; ++grow) {
    if (!inside(y_hi)) {
      bracketed = true;
      break;
    }
    const bool settled = (y_hi - y_lo).norm() <= 1e-15 * (1.0 + y_hi.norm());
    lo = hi;
    y_lo = y_hi;
    if (settled && grow > 0) break;  // the path has stopped moving
    hi *= 2.0;
    y_hi = path(hi);
    ++evals;
  }
  const auto kind = region.kind();
  const bool direct = kind == RegionKind::kBox || kind == RegionKind::kBall || kind == RegionKind::kHalfspace;
  if (bracketed && direct) {
    // The capped projection of the bracketing point is the sphere crossing.
    y_lo = project_capped(region, center, radius, center - hi * g, dykstra);
    ++evals;
  } else if (bracketed) {
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      Vector y = path(mid);
      ++evals;
      if (inside(y)) {
        lo = mid;
        y_lo = std::move(y);
      } else {
        hi = mid;
      }
    }
  }
  out.point = pull_inside(region, center, radius, y_lo, dykstra);
  out.value = g.dot(out.point - center);
  out.iterations = evals;
  if (out.value > 0.0) {
    out.point = center;
    out.value = 0.0;
  }
  return out;
}

// Accelerated projected gradient on q(y) = g^T(y-c) + 1/2 (y-c)^T H (y-c)
// over region ∩ B(c, radius), started from the center c.
FistaResult fista(const Vector& g, const Matrix& h, const ConvexRegion& region, const Vector& center,
                  double radius, const FistaSettings& settings, std::optional<double> stop_below) {
  const Index n = g.size();
  if (is_zero(h)) return linear_path(g, region, center, radius, settings.dykstra);

  FistaResult out;
  out.point = center;
  out.value = 0.0;
  double lipschitz = lipschitz_estimate(h);
  if (!(lipschitz > 0.0)) lipschitz = g.norm() / radius;
  if (!(lipschitz > 0.0)) return out;

  auto project_d = [&](const Vector& p, bool& ok) -> Vector {
    try {
      return project_capped(region, center, radius, p, settings.dykstra);
    } catch (const ConvergenceFailure& e) {
      ok = false;
      return e.last_iterate();
    }
  };

  bool projections_ok = true;
  Vector y = center;
  Vector grad_y = g;  // model gradient at y
  Vector x_prev = center;
  Vector best = center;
  double best_value = 0.0;
  double t = 1.0;
  const int cap = std::max(1, settings.iteration_cap(n));
  bool converged = false;
  int j = 0;
  for (; j < cap; ++j) {
    Vector x_next = project_d(y - grad_y / lipschitz, projections_ok);
    const double value = quadratic_part(g, h, x_next - center);
    if (value < best_value) {
      best_value = value;
      best = x_next;
    }
    if (stop_below && value < *stop_below) {
      converged = true;
      ++j;
      break;
    }
    if ((x_next - x_prev).norm() <= settings.step_tolerance) {
      converged = true;
      ++j;
      break;
    }
    // Gradient-based adaptive restart: drop momentum when it points uphill.
    if ((y - x_next).dot(x_next - x_prev) > 0.0) t = 1.0;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    Vector y_next = x_next + ((t - 1.0) / t_next) * (x_next - x_prev);
    grad_y += h * (y_next - y);
    y = std::move(y_next);
    x_prev = std::move(x_next);
    t = t_next;
  }

  out.iterations = j;
  out.certified = converged && projections_ok;
  out.point = pull_inside(region, center, radius, best, settings.dykstra);
  out.value = quadratic_part(g, h, out.point - center);
  if (out.value > 0.0) {
    out.point = center;
    out.value = 0.0;
  }
  return out;
}

}  // namespace

double QuadraticModel::value_at_step(const Vector& step) const {
  return constant + quadratic_part(gradient, hessian, step);
}

double QuadraticModel::decrease(const Vector& step) const {
  return -quadratic_part(gradient, hessian, step);
}

QuadraticModel QuadraticModel::linear(double constant, Vector gradient, Vector base) {
  QuadraticModel m;
  m.constant = constant;
  m.hessian = Matrix::Zero(gradient.size(), gradient.size());
  m.gradient = std::move(gradient);
  m.base = std::move(base);
  return m;
}

double lipschitz_estimate(const Matrix& hessian) {
  if (is_zero(hessian)) return 0.0;
  const Index n = hessian.rows();
  // Deterministic start with no special alignment to coordinate axes.
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = 1.0 + 0.1 * static_cast<double>(i);
  v.normalize();
  double estimate = 0.0;
  double change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    Vector w = hessian * v;
    const double norm = w.norm();
    if (norm == 0.0) break;
    change = std::abs(norm - estimate) / norm;
    estimate = norm;
    v = w / norm;
  }
  if (!(change <= 1e-8)) return hessian.norm();  // Frobenius upper bound
  return estimate;
}

double spectral_norm(const Matrix& hessian) {
  if (is_zero(hessian)) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hessian, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

TrustRegionStep solve_trust_region(const QuadraticModel& model, const ConvexRegion& region,
                                   double delta, const FistaSettings& settings) {
  if (!(delta > 0.0)) throw InvalidArgument("solve_trust_region: delta must be positive");
  if (model.base.size() != region.dim() || model.gradient.size() != region.dim()) {
    throw InvalidArgument("solve_trust_region: model dimension does not match region");
  }
  const auto r = fista(model.gradient, model.hessian, region, model.base, delta, settings, std::nullopt);
  TrustRegionStep step;
  step.step = r.point - model.base;
  step.certified = r.certified;
  step.iterations = r.iterations;
  return step;
}

LinearMinimum minimize_linear(const Vector& gradient, const ConvexRegion& region,
                              const Vector& center, double radius, const FistaSettings& settings,
                              std::optional<double> stop_below) {
  if (!(radius > 0.0)) throw InvalidArgument("minimize_linear: radius must be positive");
  if (gradient.size() != region.dim() || center.size() != region.dim()) {
    throw InvalidArgument("minimize_linear: dimension mismatch");
  }
  const Matrix none;
  const auto r = fista(gradient, none, region, center, radius, settings, stop_below);
  return {r.point, r.value, r.certified};
}

Criticality criticality_measure(const Vector& gradient, const ConvexRegion& region, const Vector& x,
                                const FistaSettings& settings) {
  const auto r = minimize_linear(gradient, region, x, 1.0, settings);
  Criticality c;
  c.value = std::max(0.0, -r.value);
  c.direction = r.point - x;
  c.certified = r.certified;
  return c;
}

double cauchy_threshold(const QuadraticModel& model, double pi, double delta, double c1) {
  const double hnorm = spectral_norm(model.hessian);
  return c1 * pi * std::min({pi / (1.0 + hnorm), delta, 1.0});
}

bool cauchy_decrease_holds(const QuadraticModel& model, const Vector& step, double pi, double delta,
                           double c1) {
  if (!(c1 > 0.0 && c1 < 1.0)) throw InvalidArgument("cauchy_decrease_holds: c1 must lie in (0,1)");
  return model.decrease(step) >= cauchy_threshold(model, pi, delta, c1);
}

Vector fallback_cauchy_step(const QuadraticModel& model, const ConvexRegion& region, double delta,
                            const FistaSettings& settings, double c1, const Criticality* criticality) {
  const Index n = model.dim();
  const Vector& x = model.base;
  if (model.gradient.norm() == 0.0) return Vector::Zero(n);

  Criticality local;
  if (criticality == nullptr) {
    local = criticality_measure(model.gradient, region, x, settings);
    criticality = &local;
  }
  const double pi = criticality->value;
  const double required = cauchy_threshold(model, pi, delta, c1);

  Vector best = Vector::Zero(n);
  double best_decrease = 0.0;
  double t = 1.0;
  for (int halving = 0; halving <= 20; ++halving, t *= 0.5) {
    const Vector target = x - t * model.gradient;
    Vector trial;
    try {
      trial = project_capped(region, x, delta, target, settings.dykstra);
    } catch (const ConvergenceFailure& e) {
      trial = e.last_iterate();
    }
    trial = pull_inside(region, x, delta, trial, settings.dykstra);
    const Vector s = trial - x;
    const double dec = model.decrease(s);
    if (dec > best_decrease) {
      best_decrease = dec;
      best = s;
    }
    if (dec >= required && dec > 0.0) return s;
  }

  // Step along the criticality direction d (feasible, ||d|| <= 1, g^T d = -pi):
  // alpha = min(delta, 1, pi / d^T H d) gives a decrease of at least
  // (pi / 2) * min(pi / ||H||, delta, 1).
  const Vector& d = criticality->direction;
  if (pi > 0.0 && d.size() == n) {
    const double curvature = is_zero(model.hessian) ? 0.0 : d.dot(model.hessian * d);
    double alpha = std::min(1.0, delta / std::max(d.norm(), 1e-300));
    if (curvature > 0.0) alpha = std::min(alpha, pi / curvature);
    const Vector s = pull_inside(region, x, delta, x + alpha * d, settings.dykstra) - x;
    const double dec = model.decrease(s);
    if (dec > best_decrease) {
      best_decrease = dec;
      best = s;
    }
  }
  return best;
}

}  // namespace cdfo
