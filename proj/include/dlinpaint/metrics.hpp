#pragma once

#include <span>

#include "dlinpaint/mesh.hpp"

namespace dlinpaint {

struct DistanceStats {
  double rms = 0.0;
  double max = 0.0;
  int count = 0;
};

/// Distance from p to the closed triangle (a, b, c).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Unsigned distance of every point to the nearest face of `surface`
/// (brute force over faces).
DistanceStats point_to_mesh(std::span<const Vec3> points, const Mesh& surface);

/// | |p - center| - radius | per point.
DistanceStats radial_deviation(std::span<const Vec3> points, const Vec3& center, double radius);

/// |<p - origin, normal>| per point; `normal` need not be unit.
DistanceStats plane_deviation(std::span<const Vec3> points, const Vec3& origin, const Vec3& normal);

}  // namespace dlinpaint
