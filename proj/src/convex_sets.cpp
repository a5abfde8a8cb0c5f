#include "cdfo/convex_sets.hpp"

#include <algorithm>
#include <cmath>

namespace cdfo {

namespace {

void require_dim(const ConvexRegion& region, const Vector& x) {
  if (x.size() != region.dim()) {
    throw InvalidArgument("dimension mismatch: region has dimension " +
                          std::to_string(region.dim()) + ", point has " +
                          std::to_string(x.size()));
  }
}

Vector project_ball(const Vector& center, double radius, const Vector& x) {
  const Vector offset = x - center;
  const double norm = offset.norm();
  if (norm <= radius) return x;
  return center + (radius / norm) * offset;
}

Vector project_simple(const ConvexRegion& region, const Vector& x) {
  switch (region.kind()) {
    case RegionKind::kWholeSpace:
      return x;
    case RegionKind::kBox:
      return x.cwiseMax(region.lower()).cwiseMin(region.upper());
    case RegionKind::kBall:
      return project_ball(region.center(), region.radius(), x);
    case RegionKind::kHalfspace: {
      const Vector& a = region.normal();
      const double violation = a.dot(x) - region.offset();
      if (violation <= 0.0) return x;
      return x - (violation / a.squaredNorm()) * a;
    }
    case RegionKind::kIntersection:
      break;
  }
  return dykstra_project(region.members(), x);
}

void append_flat(const ConvexRegion& region, std::vector<ConvexRegion>& out) {
  if (region.kind() == RegionKind::kIntersection) {
    for (const auto& m : region.members()) append_flat(m, out);
  } else if (region.kind() != RegionKind::kWholeSpace) {
    out.push_back(region);
  }
}

// Capped projections for a single member. In each, when neither single-set
// projection lies in the other set, both constraints are active at the answer.

Vector project_ball_halfspace(const Vector& c, double r, const ConvexRegion& half, const Vector& x) {
  const Vector& a = half.normal();
  const double b = half.offset();
  Vector z = project_ball(c, r, x);
  if (a.dot(z) <= b) return z;
  const double a2 = a.squaredNorm();
  const Vector w = x - ((a.dot(x) - b) / a2) * a;  // x violates, so w is on the plane
  if ((w - c).norm() <= r) return w;
  // Circle where the plane cuts the sphere.
  const Vector ch = c - ((a.dot(c) - b) / a2) * a;
  const double rho = std::sqrt(std::max(0.0, r * r - (c - ch).squaredNorm()));
  const Vector u = w - ch;
  const double un = u.norm();
  if (un == 0.0) return ch;
  return ch + (rho / un) * u;
}

Vector project_ball_ball(const Vector& c, double r, const ConvexRegion& other, const Vector& x) {
  const Vector& c2 = other.center();
  const double r2 = other.radius();
  Vector z = project_ball(c, r, x);
  if ((z - c2).norm() <= r2) return z;
  z = project_ball(c2, r2, x);
  if ((z - c).norm() <= r) return z;
  // Both spheres active: their intersection is a sphere of radius h centred on
  // the axis, in the plane orthogonal to it.
  const Vector axis = c2 - c;
  const double d = axis.norm();
  const Vector e = axis / d;
  const double along = (r * r - r2 * r2 + d * d) / (2.0 * d);
  const double h = std::sqrt(std::max(0.0, r * r - along * along));
  const Vector m = c + along * e;
  Vector u = x - m;
  u -= u.dot(e) * e;
  const double un = u.norm();
  if (un == 0.0) return m;
  return m + (h / un) * u;
}

// P_box(c + s (x - c)) at the largest s in [0, 1] that stays in the ball.
// Each coordinate moves linearly in s until it meets its bound, so
// ||P_box(c + s d) - c||^2 is piecewise quadratic with breakpoints where
// coordinates clamp; the crossing is solved exactly on the right segment.
Vector project_ball_box(const Vector& c, double r, const ConvexRegion& box, const Vector& x) {
  const Vector& lower = box.lower();
  const Vector& upper = box.upper();
  const Index n = x.size();
  const Vector d = x - c;
  Vector y = d;
  for (Index i = 0; i < n; ++i) y(i) = std::clamp(x(i), lower(i), upper(i));
  if ((y - c).squaredNorm() <= r * r) return y;

  std::vector<std::pair<double, Index>> breaks;
  breaks.reserve(static_cast<std::size_t>(n));
  double moving = 0.0;  // sum of d_i^2 over coordinates not yet clamped
  for (Index i = 0; i < n; ++i) {
    if (d(i) == 0.0) continue;
    const double bound = d(i) > 0.0 ? upper(i) : lower(i);
    const double s = (bound - c(i)) / d(i);
    moving += d(i) * d(i);
    if (s < 1.0) breaks.emplace_back(std::max(s, 0.0), i);
  }
  std::sort(breaks.begin(), breaks.end());
  double fixed = 0.0;  // squared offsets of clamped coordinates
  double s_star = 1.0;
  std::size_t k = 0;
  while (true) {
    const double seg_end = k < breaks.size() ? breaks[k].first : 1.0;
    // On this segment ||.||^2 = fixed + s^2 * moving.
    if (fixed + seg_end * seg_end * moving >= r * r) {
      s_star = moving > 0.0 ? std::sqrt(std::max(0.0, (r * r - fixed) / moving)) : seg_end;
      break;
    }
    if (k == breaks.size()) break;
    const Index i = breaks[k].second;
    const double off = (d(i) > 0.0 ? upper(i) : lower(i)) - c(i);
    fixed += off * off;
    moving -= d(i) * d(i);
    ++k;
  }
  for (Index i = 0; i < n; ++i) y(i) = std::clamp(c(i) + s_star * d(i), lower(i), upper(i));
  const double norm = (y - c).norm();
  if (norm > r) y = c + (r / norm) * (y - c);  // rounding guard
  return y;
}

}  // namespace

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::kWholeSpace: return "whole-space";
    case RegionKind::kBox: return "box";
    case RegionKind::kBall: return "ball";
    case RegionKind::kHalfspace: return "halfspace";
    case RegionKind::kIntersection: return "intersection";
  }
  return "unknown";
}

ConvexRegion ConvexRegion::whole_space(Index dim) {
  if (dim < 1) throw InvalidArgument("whole-space: dimension must be positive");
  return ConvexRegion(RegionKind::kWholeSpace, dim);
}

ConvexRegion ConvexRegion::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size() || lower.size() < 1) {
    throw InvalidArgument("box: bound vectors must be nonempty and of equal length");
  }
  if (!(lower.array() < upper.array()).all()) {
    throw InvalidArgument("box: lower < upper must hold componentwise");
  }
  ConvexRegion r(RegionKind::kBox, lower.size());
  r.a_ = std::move(lower);
  r.b_ = std::move(upper);
  return r;
}

ConvexRegion ConvexRegion::ball(Vector center, double radius) {
  if (center.size() < 1) throw InvalidArgument("ball: empty center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("ball: radius must be positive");
  }
  ConvexRegion r(RegionKind::kBall, center.size());
  r.a_ = std::move(center);
  r.scalar_ = radius;
  return r;
}

ConvexRegion ConvexRegion::halfspace(Vector normal, double offset) {
  if (normal.size() < 1) throw InvalidArgument("halfspace: empty normal");
  if (!(normal.norm() > 0.0)) throw InvalidArgument("halfspace: normal must be nonzero");
  if (!std::isfinite(offset)) throw InvalidArgument("halfspace: offset must be finite");
  ConvexRegion r(RegionKind::kHalfspace, normal.size());
  r.a_ = std::move(normal);
  r.scalar_ = offset;
  return r;
}

ConvexRegion ConvexRegion::intersection(std::vector<ConvexRegion> members) {
  if (members.empty()) throw InvalidArgument("intersection: needs at least one member");
  const Index dim = members.front().dim();
  for (const auto& m : members) {
    if (m.dim() != dim) throw InvalidArgument("intersection: member dimensions differ");
    if (m.kind() == RegionKind::kIntersection) {
      throw InvalidArgument("intersection: members may not be intersections");
    }
  }
  ConvexRegion r(RegionKind::kIntersection, dim);
  r.members_ = std::move(members);
  return r;
}

Vector project(const ConvexRegion& region, const Vector& x) {
  require_dim(region, x);
  return project_simple(region, x);
}

double distance(const ConvexRegion& region, const Vector& x) {
  return (project(region, x) - x).norm();
}

bool contains(const ConvexRegion& region, const Vector& x, double tol) {
  if (tol < 0.0) throw InvalidArgument("contains: tolerance must be nonnegative");
  return distance(region, x) <= tol;
}

Vector dykstra_project(std::span<const ConvexRegion> members, const Vector& x,
                       const DykstraSettings& settings) {
  if (members.empty()) throw InvalidArgument("dykstra_project: no members");
  if (!(settings.tolerance > 0.0)) throw InvalidArgument("dykstra_project: tolerance must be positive");
  for (const auto& m : members) require_dim(m, x);
  if (members.size() == 1) return project_simple(members.front(), x);

  auto near_all = [&](const Vector& y) {
    for (const auto& m : members) {
      if ((project_simple(m, y) - y).norm() > kFeasibilityTol) return false;
    }
    return true;
  };
  if (near_all(x)) return x;  // feasible up to the membership tolerance: fixed point

  const std::size_t p = members.size();
  std::vector<Vector> increments(p, Vector::Zero(x.size()));
  Vector current = x;
  const double tol = settings.tolerance * std::max(1.0, x.norm());
  const int cap = settings.iteration_cap(x.size());

  double residual = 0.0;
  for (int iter = 0; iter < cap; ++iter) {
    residual = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const Vector shifted = current + increments[i];
      current = project_simple(members[i], shifted);
      Vector updated = shifted - current;
      residual += (updated - increments[i]).squaredNorm();
      increments[i] = std::move(updated);
    }
    // The increment test alone can stop slightly outside the earlier members.
    if (std::sqrt(residual) <= tol && near_all(current)) return current;
  }
  throw ConvergenceFailure("dykstra_project: no convergence within " + std::to_string(cap) +
                               " cycles (intersection may be empty)",
                           current, std::sqrt(residual));
}

Vector project_capped(const ConvexRegion& region, const Vector& center, double radius,
                      const Vector& x, const DykstraSettings& settings) {
  require_dim(region, x);
  require_dim(region, center);
  if (!(radius > 0.0)) throw InvalidArgument("project_capped: radius must be positive");

  // A single constraining member has a direct capped projection.
  const ConvexRegion* simple = nullptr;
  int constraining = 0;
  if (region.kind() == RegionKind::kIntersection) {
    for (const auto& m : region.members()) {
      if (m.kind() != RegionKind::kWholeSpace) {
        simple = &m;
        ++constraining;
      }
    }
  } else if (region.kind() != RegionKind::kWholeSpace) {
    simple = &region;
    constraining = 1;
  }
  if (constraining == 0) return project_ball(center, radius, x);
  if (constraining == 1) {
    switch (simple->kind()) {
      case RegionKind::kHalfspace: return project_ball_halfspace(center, radius, *simple, x);
      case RegionKind::kBall: return project_ball_ball(center, radius, *simple, x);
      case RegionKind::kBox: return project_ball_box(center, radius, *simple, x);
      default: break;
    }
  }
  std::vector<ConvexRegion> members;
  members.push_back(ConvexRegion::ball(center, radius));
  append_flat(region, members);
  return dykstra_project(members, x, settings);
}

}  // namespace cdfo
