#include "cdfo/region_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cdfo {

namespace {

using nlohmann::json;

// `unbounded` replaces null entries (box sides only); NaN means nulls are errors.
Vector to_vector(const json& j, const char* field, double unbounded = std::nan("")) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw InvalidArgument(std::string("region file: missing numeric array '") + field + "'");
  }
  const auto& arr = j.at(field);
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (arr[i].is_null() && !std::isnan(unbounded)) {
      v(static_cast<Index>(i)) = unbounded;
    } else {
      v(static_cast<Index>(i)) = arr[i].get<double>();
    }
  }
  return v;
}

double to_scalar(const json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_number()) {
    throw InvalidArgument(std::string("region file: missing number '") + field + "'");
  }
  return j.at(field).get<double>();
}

ConvexRegion from_json(const json& j, bool allow_intersection) {
  if (!j.is_object() || !j.contains("kind")) throw InvalidArgument("region file: object with 'kind' expected");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "whole-space") {
    return ConvexRegion::whole_space(static_cast<Index>(to_scalar(j, "dim")));
  }
  if (kind == "box") {
    const double inf = std::numeric_limits<double>::infinity();
    return ConvexRegion::box(to_vector(j, "lower", -inf), to_vector(j, "upper", inf));
  }
  if (kind == "ball") return ConvexRegion::ball(to_vector(j, "center"), to_scalar(j, "radius"));
  if (kind == "halfspace") return ConvexRegion::halfspace(to_vector(j, "normal"), to_scalar(j, "offset"));
  if (kind == "intersection") {
    if (!allow_intersection) throw InvalidArgument("region file: intersections nest one level deep");
    if (!j.contains("members") || !j.at("members").is_array()) {
      throw InvalidArgument("region file: intersection needs a 'members' array");
    }
    std::vector<ConvexRegion> members;
    for (const auto& m : j.at("members")) members.push_back(from_json(m, false));
    return ConvexRegion::intersection(std::move(members));
  }
  throw InvalidArgument("region file: unknown kind '" + kind + "'");
}

json to_json(const ConvexRegion& r) {
  auto vec = [](const Vector& v) {
    json arr = json::array();
    for (Index i = 0; i < v.size(); ++i) {
      if (std::isinf(v(i))) {
        arr.push_back(nullptr);
      } else {
        arr.push_back(v(i));
      }
    }
    return arr;
  };
  json j;
  j["kind"] = std::string(to_string(r.kind()));
  switch (r.kind()) {
    case RegionKind::kWholeSpace: j["dim"] = r.dim(); break;
    case RegionKind::kBox: j["lower"] = vec(r.lower()); j["upper"] = vec(r.upper()); break;
    case RegionKind::kBall: j["center"] = vec(r.center()); j["radius"] = r.radius(); break;
    case RegionKind::kHalfspace: j["normal"] = vec(r.normal()); j["offset"] = r.offset(); break;
    case RegionKind::kIntersection:
      j["members"] = json::array();
      for (const auto& m : r.members()) j["members"].push_back(to_json(m));
      break;
  }
  return j;
}

}  // namespace

ConvexRegion parse_region(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("region file: ") + e.what());
  }
  try {
    return from_json(j, true);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("region file: ") + e.what());
  }
}

ConvexRegion load_region(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open region file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_region(buffer.str());
}

std::string format_region(const ConvexRegion& region) { return to_json(region).dump(); }

}  // namespace cdfo
