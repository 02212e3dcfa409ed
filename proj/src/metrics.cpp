#include "dlinpaint/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dlinpaint/error.hpp"

namespace dlinpaint {

namespace {

template <typename F>
DistanceStats summarize(std::span<const Vec3> points, F&& distance) {
  DistanceStats s;
  double sum_sq = 0.0;
  for (const Vec3& p : points) {
    const double d = distance(p);
    sum_sq += d * d;
    s.max = std::max(s.max, d);
  }
  s.count = static_cast<int>(points.size());
  if (s.count > 0) s.rms = std::sqrt(sum_sq / s.count);
  return s;
}

}  // namespace

// Closest point by Voronoi region of the triangle (vertex, edge, interior).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return bp.norm();

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double t = d1 / (d1 - d3);
    return (p - (a + t * ab)).norm();
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.norm();

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double t = d2 / (d2 - d6);
    return (p - (a + t * ac)).norm();
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + t * (c - b))).norm();
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return (p - (a + v * ab + w * ac)).norm();
}

DistanceStats point_to_mesh(std::span<const Vec3> points, const Mesh& surface) {
  if (surface.num_faces() == 0) {
    throw Error(ErrorKind::invalid_argument, "reference mesh has no faces");
  }
  std::vector<double> dist(points.size());
#pragma omp parallel for schedule(dynamic, 32)
  for (long i = 0; i < static_cast<long>(points.size()); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const Face& f : surface.faces()) {
      best = std::min(best, point_triangle_distance(points[i], surface.position(f[0]),
                                                    surface.position(f[1]),
                                                    surface.position(f[2])));
    }
    dist[i] = best;
  }
  std::size_t k = 0;
  return summarize(points, [&](const Vec3&) { return dist[k++]; });
}

DistanceStats radial_deviation(std::span<const Vec3> points, const Vec3& center, double radius) {
  return summarize(points, [&](const Vec3& p) { return std::abs((p - center).norm() - radius); });
}

DistanceStats plane_deviation(std::span<const Vec3> points, const Vec3& origin, const Vec3& normal) {
  const Vec3 n = normal.normalized();
  return summarize(points, [&](const Vec3& p) { return std::abs((p - origin).dot(n)); });
}

}  // namespace dlinpaint
