#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cdfo/convex_sets.hpp"

namespace cdfo {

// Constraint definition files are JSON objects tagged by "kind":
//   {"kind": "whole-space", "dim": 3}
//   {"kind": "box", "lower": [..], "upper": [..]}              (null: unbounded side)
//   {"kind": "ball", "center": [..], "radius": r}
//   {"kind": "halfspace", "normal": [..], "offset": b}        (normal^T x <= offset)
//   {"kind": "intersection", "members": [<non-intersection region>, ...]}
ConvexRegion parse_region(std::string_view text);
ConvexRegion load_region(const std::filesystem::path& path);
std::string format_region(const ConvexRegion& region);

}  // namespace cdfo
