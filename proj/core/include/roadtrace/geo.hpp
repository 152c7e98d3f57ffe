#pragma once

#include <cmath>
#include <cstddef>

namespace roadtrace {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;

struct LonLat {
  double lon = 0.0;  // degrees, [-180, 180]
  double lat = 0.0;  // degrees, (-90, 90)

  friend bool operator==(const LonLat&, const LonLat&) = default;
};

// Planar position in meters relative to a projection origin (x east, y north).
struct XY {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const XY&, const XY&) = default;
  XY operator+(XY o) const { return {x + o.x, y + o.y}; }
  XY operator-(XY o) const { return {x - o.x, y - o.y}; }
  XY operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(XY a, XY b) { return a.x * b.x + a.y * b.y; }
inline double norm(XY a) { return std::hypot(a.x, a.y); }
inline double distance(XY a, XY b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Exact distance from p to the closed segment [a, b].
double point_segment_distance(XY p, XY a, XY b);

// Rotates p counterclockwise about center by deg degrees.
XY rotate(XY p, double deg, XY center = {});

bool is_valid(LonLat p);

// Local equirectangular projection about a fixed origin.
class Projection {
 public:
  Projection() = default;
  explicit Projection(LonLat origin);

  const LonLat& origin() const { return origin_; }

  // Throws InvalidCoordinate for non-finite or out-of-range input. Points
  // farther than 100 km from the origin are accepted with reduced accuracy.
  XY project(LonLat p) const;
  LonLat unproject(XY p) const;

  friend bool operator==(const Projection& a, const Projection& b) {
    return a.origin_ == b.origin_;
  }

 private:
  LonLat origin_{};
  double cos_lat0_ = 1.0;
};

XY project(LonLat p, const Projection& proj);
LonLat unproject(XY p, const Projection& proj);

// Direction from -> to in degrees, 0 = east, counterclockwise, in [0, 360).
// Throws DegenerateDirection when the points coincide.
double bearing(XY from, XY to);

// Maps any angle to [0, 360).
double normalize_degrees(double deg);

// Smallest absolute difference between two angles, in [0, 180].
double angular_difference(double a, double b);

using BinIndex = int;

BinIndex angle_to_bin(double deg, int n_bins = 64);
double bin_center(BinIndex bin, int n_bins = 64);

}  // namespace roadtrace
