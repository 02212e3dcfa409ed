#include "dlinpaint/frames.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Geometry>

#include "dlinpaint/error.hpp"

namespace dlinpaint {

namespace {

constexpr double kDegenerateTangent = 1e-8;

Vec3 project_to_plane(const Vec3& d, const Vec3& n) { return d - d.dot(n) * n; }

}  // namespace

Vec3 max_curvature_direction(const Mesh& mesh, std::span<const Vec3> normals, int v) {
  const auto ring = mesh.neighbors(v);
  if (ring.size() < 2) {
    throw Error(ErrorKind::invalid_argument,
                "vertex " + std::to_string(v) + " has fewer than 2 neighbours");
  }
  const Vec3& n = normals[v];
  const Vec3& p = mesh.position(v);
  double best = -1.0;
  double lowest = std::numeric_limits<double>::infinity();
  double mean_length = 0.0;
  int best_neighbor = ring.front();
  for (int u : ring) {
    const Vec3 e = mesh.position(u) - p;
    const double len2 = e.squaredNorm();
    mean_length += std::sqrt(len2);
    const double kappa = len2 > 0.0 ? std::abs(2.0 * n.dot(e) / len2) : 0.0;
    if (kappa > best) {
      best = kappa;
      best_neighbor = u;
    }
    lowest = std::min(lowest, kappa);
  }
  mean_length /= static_cast<double>(ring.size());
  const double tolerance = 1e-9 * std::max(best, mean_length > 0.0 ? 1.0 / mean_length : 1.0);
  if (best - lowest <= tolerance) best_neighbor = ring.front();

  const Vec3 e = mesh.position(best_neighbor) - p;
  const Vec3 t = project_to_plane(e, n);
  const double tn = t.norm();
  if (tn >= kDegenerateTangent * e.norm() && tn > 0.0) return t / tn;
  return e.normalized();
}

Frame make_frame(const Vec3& origin, const Vec3& normal, const Vec3& direction) {
  const Vec3 n = normal.normalized();
  Vec3 t = project_to_plane(direction, n);
  if (t.norm() < kDegenerateTangent) {
    int axis = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
    }
    t = project_to_plane(Vec3::Unit(axis), n);
  }
  t.normalize();
  const Vec3 r = n.cross(t);
  Frame frame;
  frame.origin = origin;
  frame.axes.row(0) = t.transpose();
  frame.axes.row(1) = r.transpose();
  frame.axes.row(2) = n.transpose();
  return frame;
}

Frame build_frame(const Mesh& mesh, std::span<const Vec3> normals, const Patch& patch) {
  const int s = patch.seed;
  return make_frame(mesh.position(s), normals[s], max_curvature_direction(mesh, normals, s));
}

HeightMapSignal to_height_map(const Mesh& mesh, const Patch& patch, const Frame& frame) {
  HeightMapSignal signal;
  const int n = static_cast<int>(patch.vertices.size());
  signal.vertex_ids = patch.vertices;
  signal.uv.resize(n, 2);
  signal.z.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 local = frame.axes * (mesh.position(patch.vertices[i]) - frame.origin);
    signal.uv(i, 0) = local.x();
    signal.uv(i, 1) = local.y();
    signal.z(i) = local.z();
  }
  return signal;
}

std::vector<Vec3> from_height_map(const HeightMapSignal& signal, const Eigen::VectorXd& z,
                                  const Frame& frame) {
  if (z.size() != signal.uv.rows() || signal.uv.rows() != signal.size()) {
    throw Error(ErrorKind::invalid_argument, "height map: dimension mismatch");
  }
  std::vector<Vec3> out(signal.size());
  for (int i = 0; i < signal.size(); ++i) {
    out[i] = frame.origin + frame.axes.transpose() * Vec3(signal.uv(i, 0), signal.uv(i, 1), z(i));
  }
  return out;
}

std::vector<Vec3> from_height_map(const HeightMapSignal& signal, const Frame& frame) {
  return from_height_map(signal, signal.z, frame);
}

}  // namespace dlinpaint
