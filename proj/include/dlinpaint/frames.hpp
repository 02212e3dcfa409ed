#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "dlinpaint/mesh.hpp"
#include "dlinpaint/sampling.hpp"

namespace dlinpaint {

/// Local orthonormal frame of a patch. Rows of `axes` are the projected
/// maximum-curvature direction, its in-plane complement (normal x tangent)
/// and the seed normal; det(axes) = +1.
struct Frame {
  Vec3 origin = Vec3::Zero();
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();

  Vec3 tangent() const { return axes.row(0).transpose(); }
  Vec3 bitangent() const { return axes.row(1).transpose(); }
  Vec3 normal() const { return axes.row(2).transpose(); }
};

/// Patch geometry as heights over the seed's tangent plane.
struct HeightMapSignal {
  std::vector<int> vertex_ids;                // mesh vertex per row
  Eigen::Matrix<double, Eigen::Dynamic, 2> uv;  // in-plane coordinates
  Eigen::VectorXd z;                          // heights along the frame normal

  int size() const { return static_cast<int>(vertex_ids.size()); }
};

/// Unit tangent direction of maximal |normal curvature| among the one-ring
/// edges, using kappa(e) = 2 <N, e> / |e|^2. When all one-ring curvatures
/// agree (flat or umbilic) the edge to the lowest-index neighbour is used.
/// Throws invalid_argument when `v` has fewer than 2 neighbours.
Vec3 max_curvature_direction(const Mesh& mesh, std::span<const Vec3> normals, int v);

/// Frame from an origin, a unit normal and a direction to project into the
/// tangent plane. A direction (nearly) parallel to the normal is replaced by
/// the projected coordinate axis least aligned with the normal.
Frame make_frame(const Vec3& origin, const Vec3& normal, const Vec3& direction);

Frame build_frame(const Mesh& mesh, std::span<const Vec3> normals, const Patch& patch);

/// Local coordinates E (p - origin) of every patch vertex.
HeightMapSignal to_height_map(const Mesh& mesh, const Patch& patch, const Frame& frame);

/// origin + E^T (u, v, z) for every row; `z` overrides signal.z when given.
/// Throws invalid_argument on a size mismatch.
std::vector<Vec3> from_height_map(const HeightMapSignal& signal, const Frame& frame);
std::vector<Vec3> from_height_map(const HeightMapSignal& signal, const Eigen::VectorXd& z,
                                  const Frame& frame);

}  // namespace dlinpaint
