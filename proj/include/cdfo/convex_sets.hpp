#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdfo/types.hpp"

namespace cdfo {

enum class RegionKind { kWholeSpace, kBox, kBall, kHalfspace, kIntersection };

std::string_view to_string(RegionKind kind);

/// A closed convex set with nonempty interior, known only through its
/// Euclidean projection. Values are immutable once built.
class ConvexRegion {
 public:
  static ConvexRegion whole_space(Index dim);
  static ConvexRegion box(Vector lower, Vector upper);
  static ConvexRegion ball(Vector center, double radius);
  /// {x : normal^T x <= offset}
  static ConvexRegion halfspace(Vector normal, double offset);
  /// Members must share a dimension and may not themselves be intersections.
  static ConvexRegion intersection(std::vector<ConvexRegion> members);

  RegionKind kind() const { return kind_; }
  Index dim() const { return dim_; }

  const Vector& lower() const { return a_; }
  const Vector& upper() const { return b_; }
  const Vector& center() const { return a_; }
  double radius() const { return scalar_; }
  const Vector& normal() const { return a_; }
  double offset() const { return scalar_; }
  const std::vector<ConvexRegion>& members() const { return members_; }

 private:
  ConvexRegion(RegionKind kind, Index dim) : kind_(kind), dim_(dim) {}

  RegionKind kind_;
  Index dim_;
  Vector a_;
  Vector b_;
  double scalar_ = 0.0;
  std::vector<ConvexRegion> members_;
};

struct DykstraSettings {
  double tolerance = 1e-10;
  // 0 selects the default cap of 1000 * dimension.
  int max_iterations = 0;

  int iteration_cap(Index dim) const {
    return max_iterations > 0 ? max_iterations : static_cast<int>(1000 * dim);
  }
};

/// Euclidean projection. Intersections are projected with Dykstra's algorithm
/// under default settings.
Vector project(const ConvexRegion& region, const Vector& x);

/// ||project(x) - x||
double distance(const ConvexRegion& region, const Vector& x);

bool contains(const ConvexRegion& region, const Vector& x, double tol = kFeasibilityTol);

/// Projection onto the intersection of `members` by Dykstra's algorithm,
/// stopped with the Birgin-Raydan increment criterion once the iterate is also
/// within kFeasibilityTol of every member. Points already that close are
/// returned unchanged. The returned point lies exactly in the last member.
/// Throws ConvergenceFailure on hitting the cap.
Vector dykstra_project(std::span<const ConvexRegion> members, const Vector& x,
                       const DykstraSettings& settings = {});

/// Projection onto region ∩ B(center, radius); `center` must lie in the region.
/// For a single box, ball or halfspace the result is computed directly (the
/// point where the projected path from the center meets the sphere) and is
/// feasible for both sets. Otherwise
/// Dykstra's algorithm is used with the region's members last in the sweep, so
/// the result is exactly feasible for the final member.
Vector project_capped(const ConvexRegion& region, const Vector& center, double radius,
                      const Vector& x, const DykstraSettings& settings = {});

}  // namespace cdfo
