#pragma once

// Constructed test scenes shared by the unit tests and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dlinpaint/error.hpp"
#include "dlinpaint/mesh.hpp"
#include "dlinpaint/primitives.hpp"

namespace dlinpaint::testing {

// Collects library warnings while alive. Tests otherwise run with warnings
// dropped.
inline std::mutex warning_mutex;
inline std::vector<std::string> warning_log;

inline void record_warning(const std::string& msg) {
  std::lock_guard lock(warning_mutex);
  warning_log.push_back(msg);
}
inline void drop_warning(const std::string&) {}

class WarningCapture {
 public:
  WarningCapture() {
    warning_log.clear();
    set_warning_sink(record_warning);
  }
  ~WarningCapture() { set_warning_sink(drop_warning); }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  bool any(const std::string& needle) const {
    std::lock_guard lock(warning_mutex);
    return std::any_of(warning_log.begin(), warning_log.end(),
                       [&](const std::string& w) { return w.find(needle) != std::string::npos; });
  }
  std::size_t count() const {
    std::lock_guard lock(warning_mutex);
    return warning_log.size();
  }
};

/// Sphere with the `count` faces whose centroids lie closest to `pole` removed.
inline Submesh sphere_with_cap(int subdivisions, int count, const Vec3& pole = Vec3(0.3, 0.2, 1.0)) {
  const Mesh sphere = make_icosphere(subdivisions);
  const Vec3 dir = pole.normalized();
  std::vector<int> order(sphere.num_faces());
  std::iota(order.begin(), order.end(), 0);
  auto centroid_dot = [&](int f) {
    const Face& t = sphere.faces()[f];
    return (sphere.position(t[0]) + sphere.position(t[1]) + sphere.position(t[2])).dot(dir);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return centroid_dot(a) > centroid_dot(b); });
  std::vector<char> drop(sphere.num_faces(), 0);
  for (int k = 0; k < count; ++k) drop[order[k]] = 1;
  return remove_faces(sphere, [&](int f) { return drop[f] != 0; });
}

/// nx x ny grid with the cells [x0, x0 + w) x [y0, y0 + h) removed.
inline Submesh grid_with_hole(int nx, int ny, int x0, int y0, int w, int h) {
  const Mesh grid = make_grid(nx, ny);
  return remove_faces(grid, [&](int f) {
    Vec3 c = Vec3::Zero();
    for (int v : grid.faces()[f]) c += grid.position(v);
    c /= 3.0;
    return c.x() > x0 && c.x() < x0 + w && c.y() > y0 && c.y() < y0 + h;
  });
}

/// Planar strip around a random star-shaped polygon with n vertices. The
/// polygon (vertices 0 .. n-1) is the hole; vertices n .. 2n-1 form the
/// outer rim.
inline Mesh star_annulus(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> radius(0.5, 1.0);
  std::uniform_real_distribution<double> jitter(0.0, 0.45);
  std::vector<Vec3> pts(2 * n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * (i + jitter(rng)) / n;
    const double r = radius(rng);
    pts[i] = Vec3(r * std::cos(a), r * std::sin(a), 0.0);
    pts[n + i] = Vec3((r + 0.6) * std::cos(a), (r + 0.6) * std::sin(a), 0.0);
  }
  std::vector<Face> faces;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    faces.push_back({i, n + i, n + j});
    faces.push_back({i, n + j, j});
  }
  return Mesh(std::move(pts), std::move(faces));
}

}  // namespace dlinpaint::testing
