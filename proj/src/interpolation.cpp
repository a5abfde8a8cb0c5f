#include "cdfo/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

namespace cdfo {

namespace {

constexpr double kRankTol = 1e-10;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

bool full_rank(const Matrix& rows) {
  if (rows.rows() == 0) return true;
  if (rows.rows() > rows.cols()) return false;
  Eigen::JacobiSVD<Matrix> svd(rows);
  const auto& sv = svd.singularValues();
  const double largest = sv(0);
  const double smallest = sv(sv.size() - 1);
  return largest > 0.0 && std::isfinite(largest) && smallest >= kRankTol * largest;
}

InterpolationSet::InterpolationSet(Matrix points, Matrix values)
    : points_(std::move(points)), values_(std::move(values)) {
  const Index n = points_.rows();
  if (n < 1 || points_.cols() != n + 1) {
    throw InvalidArgument("interpolation set: need n+1 points in R^n");
  }
  if (values_.rows() != n + 1 || values_.cols() < 1) {
    throw InvalidArgument("interpolation set: values must have one row per point");
  }
  directions_ = (points_.rightCols(n).colwise() - points_.col(0)).transpose();
  if (!full_rank(directions_)) {
    throw GeometryDegenerate("interpolation set: directions y_t - y_0 are linearly dependent");
  }
  lu_.compute(directions_);
}

InterpolationSet InterpolationSet::from_points(Matrix points, Index value_dim) {
  const Index rows = points.cols();
  return InterpolationSet(std::move(points), Matrix::Constant(rows, value_dim, nan()));
}

double InterpolationSet::abs_det() const { return std::abs(lu_.determinant()); }

bool InterpolationSet::evaluated(Index t) const { return values_.row(t).allFinite(); }

bool InterpolationSet::fully_evaluated() const { return values_.allFinite(); }

double InterpolationSet::max_distance() const {
  return directions_.rowwise().norm().maxCoeff();
}

Matrix InterpolationSet::solve_directions(const Matrix& rhs) const { return lu_.solve(rhs); }

InterpolationSet InterpolationSet::with_point(Index t, const Vector& y, const Vector& value) const {
  if (t < 0 || t >= size()) throw InvalidArgument("interpolation set: index out of range");
  Matrix pts = points_;
  pts.col(t) = y;
  Matrix vals = values_;
  vals.row(t) = value.transpose();
  return InterpolationSet(std::move(pts), std::move(vals));
}

InterpolationSet InterpolationSet::with_value(Index t, const Vector& value) const {
  InterpolationSet copy = *this;
  copy.values_.row(t) = value.transpose();
  return copy;
}

LinearModel build_linear_model(const InterpolationSet& set) {
  if (set.value_dim() != 1) throw InvalidArgument("build_linear_model: scalar values required");
  if (!set.fully_evaluated()) throw InvalidArgument("build_linear_model: unevaluated points");
  const Index n = set.dim();
  const Vector& f = set.values().col(0);
  const Vector rhs = f.tail(n).array() - f(0);
  LinearModel m;
  m.constant = f(0);
  m.gradient = set.solve_directions(rhs);
  m.base = set.base();
  return m;
}

std::vector<LagrangePolynomial> lagrange_polynomials(const InterpolationSet& set) {
  const Index n = set.dim();
  // L g_0 = -1 and L g_t = e_t, t = 1..n.
  Matrix rhs(n, n + 1);
  rhs.col(0).setConstant(-1.0);
  rhs.rightCols(n).setIdentity();
  const Matrix grads = set.solve_directions(rhs);
  std::vector<LagrangePolynomial> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  const Vector base = set.base();
  for (Index t = 0; t <= n; ++t) {
    out.push_back({t, t == 0 ? 1.0 : 0.0, grads.col(t), base});
  }
  return out;
}

double PoisednessReport::overall() const {
  return lambdas.empty() ? 0.0 : *std::max_element(lambdas.begin(), lambdas.end());
}

double PoisednessReport::nonbase() const {
  return lambdas.size() < 2 ? 0.0 : *std::max_element(lambdas.begin() + 1, lambdas.end());
}

PoisednessReport poisedness_constant(const InterpolationSet& set, const ConvexRegion& region,
                                     double delta, const FistaSettings& settings) {
  if (!(delta > 0.0)) throw InvalidArgument("poisedness_constant: delta must be positive");
  if (region.dim() != set.dim()) throw InvalidArgument("poisedness_constant: dimension mismatch");
  const double radius = std::min(delta, 1.0);
  const Vector y0 = set.base();
  PoisednessReport report;
  for (const auto& poly : lagrange_polynomials(set)) {
    // Two convex problems: minimize +l_t and -l_t.
    const auto lo = minimize_linear(poly.gradient, region, y0, radius, settings);
    const auto hi = minimize_linear(-poly.gradient, region, y0, radius, settings);
    const double at_lo = std::abs(poly.constant + lo.value);
    const double at_hi = std::abs(poly.constant - hi.value);
    if (at_lo >= at_hi) {
      report.lambdas.push_back(at_lo);
      report.maximizers.push_back(lo.point);
    } else {
      report.lambdas.push_back(at_hi);
      report.maximizers.push_back(hi.point);
    }
    report.certified = report.certified && lo.certified && hi.certified;
  }
  return report;
}

InterpolationSet initial_feasible_set(const ConvexRegion& region, const Vector& y0, double r,
                                      std::uint64_t seed, Index value_dim) {
  const Index n = region.dim();
  if (y0.size() != n) throw InvalidArgument("initial_feasible_set: dimension mismatch");
  if (!(r > 0.0)) throw InvalidArgument("initial_feasible_set: radius must be positive");
  if (!contains(region, y0)) throw InvalidArgument("initial_feasible_set: base point is infeasible");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Matrix accepted(0, n);
  Matrix points(n, n + 1);
  points.col(0) = y0;
  const Index budget = 500 * n;
  for (Index k = 0; k < budget; ++k) {
    Vector d = Vector::Zero(n);
    if (k < n) {
      d(k) = 1.0;
    } else if (k < 2 * n) {
      d(k - n) = -1.0;
    } else {
      for (Index i = 0; i < n; ++i) d(i) = normal(rng);
      const double norm = d.norm();
      if (norm == 0.0) continue;
      d /= norm;
    }
    const Vector y = project(region, Vector(y0 + r * d));
    const Vector dir = y - y0;
    if (dir.norm() <= kRankTol * r) continue;
    Matrix trial(accepted.rows() + 1, n);
    trial.topRows(accepted.rows()) = accepted;
    trial.row(accepted.rows()) = dir.transpose();
    if (!full_rank(trial)) continue;
    accepted = std::move(trial);
    points.col(accepted.rows()) = y;
    if (accepted.rows() == n) return InterpolationSet::from_points(std::move(points), value_dim);
  }
  throw GeometryDegenerate("initial_feasible_set: no independent feasible directions after " +
                           std::to_string(budget) +
                           " candidates; the region may lack interior near the base point");
}

GeometryResult improve_geometry(const InterpolationSet& set, const ConvexRegion& region, double delta,
                                double lambda, double beta, const FistaSettings& settings) {
  if (!(lambda > 1.0)) throw InvalidArgument("improve_geometry: lambda must exceed 1");
  if (!(delta > 0.0)) throw InvalidArgument("improve_geometry: delta must be positive");
  if (!(beta >= 1.0)) throw InvalidArgument("improve_geometry: beta must be at least 1");

  const Index n = set.dim();
  const double radius = std::min(delta, 1.0);
  const double point_radius = beta * radius;
  const Vector y0 = set.base();
  const Vector unevaluated = Vector::Constant(set.value_dim(), nan());

  GeometryResult result{set, {}, 0, 0, true, {}, {}, {}};
  auto mark = [&](Index t) {
    if (std::find(result.replaced.begin(), result.replaced.end(), t) == result.replaced.end()) {
      result.replaced.push_back(t);
    }
  };

  for (Index t = 1; t <= n; ++t) {
    if ((result.set.point(t) - y0).norm() <= point_radius * (1.0 + 1e-12)) continue;
    const auto polys = lagrange_polynomials(result.set);
    const auto& poly = polys[static_cast<std::size_t>(t)];
    const auto lo = minimize_linear(poly.gradient, region, y0, radius, settings);
    const auto hi = minimize_linear(-poly.gradient, region, y0, radius, settings);
    const Vector& y = (-lo.value >= -hi.value) ? lo.point : hi.point;
    try {
      result.set = result.set.with_point(t, y, unevaluated);
      mark(t);
      ++result.relocations;
    } catch (const GeometryDegenerate&) {
      result.certified = false;
      result.diagnostic = "relocation of point " + std::to_string(t) + " lost independence";
    }
  }

  result.abs_dets.push_back(result.set.abs_det());
  const int cap = static_cast<int>(10 * n);
  while (true) {
    result.report = poisedness_constant(result.set, region, delta, settings);
    Index worst = 1;
    for (Index t = 2; t <= n; ++t) {
      if (result.report.lambdas[static_cast<std::size_t>(t)] >
          result.report.lambdas[static_cast<std::size_t>(worst)]) {
        worst = t;
      }
    }
    if (result.report.lambdas[static_cast<std::size_t>(worst)] <= lambda) {
      result.certified = result.certified && result.report.certified;
      return result;
    }
    if (result.swaps >= cap) {
      result.certified = false;
      result.diagnostic = "swap cap of " + std::to_string(cap) + " reached with Lambda_t = " +
                          std::to_string(result.report.nonbase());
      return result;
    }
    try {
      result.set = result.set.with_point(worst, result.report.maximizers[static_cast<std::size_t>(worst)],
                                         unevaluated);
    } catch (const GeometryDegenerate&) {
      result.certified = false;
      result.diagnostic = "swap at index " + std::to_string(worst) + " lost independence";
      return result;
    }
    mark(worst);
    ++result.swaps;
    result.abs_dets.push_back(result.set.abs_det());
  }
}

std::string format_geometry(const InterpolationSet& set, const PoisednessReport& report) {
  std::ostringstream out;
  char buf[64];
  out << "# t  point  value  Lambda_t\n";
  for (Index t = 0; t < set.size(); ++t) {
    out << t;
    for (Index i = 0; i < set.dim(); ++i) {
      std::snprintf(buf, sizeof buf, " %.10g", set.points()(i, t));
      out << buf;
    }
    out << " |";
    for (Index j = 0; j < set.value_dim(); ++j) {
      std::snprintf(buf, sizeof buf, " %.10g", set.values()(t, j));
      out << buf;
    }
    const auto idx = static_cast<std::size_t>(t);
    std::snprintf(buf, sizeof buf, " | %.10g\n", idx < report.lambdas.size() ? report.lambdas[idx] : nan());
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "|det L| = %.10g\n", set.abs_det());
  out << buf;
  std::snprintf(buf, sizeof buf, "Lambda (all t) = %.10g\n", report.overall());
  out << buf;
  std::snprintf(buf, sizeof buf, "Lambda (t >= 1) = %.10g\n", report.nonbase());
  out << buf;
  out << "certified = " << (report.certified ? "yes" : "no") << "\n";
  return out.str();
}

}  // namespace cdfo
