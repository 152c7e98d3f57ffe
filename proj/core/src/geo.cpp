#include "roadtrace/geo.hpp"

#include <algorithm>
#include <cstdio>

#include "roadtrace/error.hpp"

namespace roadtrace {

namespace {

constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;
constexpr double kWarnDistanceM = 100000.0;

}  // namespace

double point_segment_distance(XY p, XY a, XY b) {
  const XY ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

XY rotate(XY p, double deg, XY center) {
  const double r = deg * kDegToRad;
  const double c = std::cos(r);
  const double s = std::sin(r);
  const XY d = p - center;
  return {center.x + c * d.x - s * d.y, center.y + s * d.x + c * d.y};
}

bool is_valid(LonLat p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 &&
         p.lon <= 180.0 && p.lat > -90.0 && p.lat < 90.0;
}

Projection::Projection(LonLat origin) : origin_(origin) {
  if (!is_valid(origin)) {
    throw InvalidCoordinate("invalid projection origin");
  }
  cos_lat0_ = std::cos(origin.lat * kDegToRad);
}

XY Projection::project(LonLat p) const {
  if (!is_valid(p)) {
    throw InvalidCoordinate("invalid coordinate (" + std::to_string(p.lon) +
                            ", " + std::to_string(p.lat) + ")");
  }
  const XY xy{kEarthRadiusM * cos_lat0_ * (p.lon - origin_.lon) * kDegToRad,
              kEarthRadiusM * (p.lat - origin_.lat) * kDegToRad};
  if (norm(xy) > kWarnDistanceM) {
    static bool warned = false;
    if (!warned) {
      warned = true;
      std::fprintf(stderr,
                   "warning: coordinate more than 100 km from projection "
                   "origin; planar accuracy degrades\n");
    }
  }
  return xy;
}

LonLat Projection::unproject(XY p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw InvalidCoordinate("non-finite planar coordinate");
  }
  return {origin_.lon + p.x / (kEarthRadiusM * cos_lat0_) * kRadToDeg,
          origin_.lat + p.y / kEarthRadiusM * kRadToDeg};
}

XY project(LonLat p, const Projection& proj) { return proj.project(p); }
LonLat unproject(XY p, const Projection& proj) { return proj.unproject(p); }

double normalize_degrees(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0.0) d += 360.0;
  // fmod of a tiny negative value can round back up to exactly 360.
  if (d >= 360.0) d = 0.0;
  return d;
}

double bearing(XY from, XY to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (dx == 0.0 && dy == 0.0) {
    throw DegenerateDirection("bearing between coincident points");
  }
  return normalize_degrees(std::atan2(dy, dx) * kRadToDeg);
}

double angular_difference(double a, double b) {
  const double d = normalize_degrees(a - b);
  return d > 180.0 ? 360.0 - d : d;
}

BinIndex angle_to_bin(double deg, int n_bins) {
  const double width = 360.0 / n_bins;
  auto bin = static_cast<BinIndex>(std::floor(normalize_degrees(deg) / width));
  return ((bin % n_bins) + n_bins) % n_bins;
}

double bin_center(BinIndex bin, int n_bins) {
  return (bin + 0.5) * (360.0 / n_bins);
}

}  // namespace roadtrace
