#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace dlinpaint {

using Vec3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

inline constexpr int kNoHalfedge = -1;

/// Triangle mesh in compact half-edge form.
///
/// Half-edge `h` belongs to face `h / 3` and runs from corner `h % 3` to the
/// following corner, so `next` and `prev` are arithmetic and only the twin
/// table is stored. Boundary half-edges have twin `kNoHalfedge`.
///
/// Construction validates the input: every face is a proper triangle, every
/// edge has at most two incident faces and the orientation is consistent.
/// If faces can be re-oriented consistently by flipping whole faces the
/// repair is applied (with a warning); otherwise construction throws.
/// A Mesh is immutable afterwards.
class Mesh {
 public:
  Mesh() = default;
  Mesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_halfedges() const { return 3 * num_faces(); }
  int num_edges() const { return num_edges_; }
  int num_boundary_halfedges() const { return num_boundary_; }
  bool empty() const { return vertices_.empty(); }

  const Vec3& position(int v) const { return vertices_[v]; }
  const std::vector<Vec3>& positions() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }

  static int face_of(int h) { return h / 3; }
  static int next(int h) { return h - h % 3 + (h % 3 + 1) % 3; }
  static int prev(int h) { return h - h % 3 + (h % 3 + 2) % 3; }
  int twin(int h) const { return twin_[h]; }
  int tail(int h) const { return faces_[h / 3][h % 3]; }
  int head(int h) const { return faces_[h / 3][(h % 3 + 1) % 3]; }
  bool is_boundary(int h) const { return twin_[h] == kNoHalfedge; }

  /// One-ring neighbours of `v`, sorted ascending.
  std::span<const int> neighbors(int v) const {
    return {adjacency_.data() + adjacency_offsets_[v],
            adjacency_.data() + adjacency_offsets_[v + 1]};
  }
  std::span<const int> incident_faces(int v) const {
    return {vertex_faces_.data() + vertex_face_offsets_[v],
            vertex_faces_.data() + vertex_face_offsets_[v + 1]};
  }

  /// Number of faces flipped by the orientation repair during construction.
  int repaired_faces() const { return repaired_faces_; }

  /// Euler characteristic V - E + F.
  int euler_characteristic() const { return num_vertices() - num_edges() + num_faces(); }

  double mean_edge_length() const;
  double max_edge_length() const;
  double bounding_box_diagonal() const;

  /// Same connectivity with new positions (no re-validation needed).
  Mesh with_positions(std::vector<Vec3> positions) const;

 private:
  void build_connectivity();

  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
  std::vector<int> twin_;
  std::vector<int> adjacency_offsets_{0};
  std::vector<int> adjacency_;
  std::vector<int> vertex_face_offsets_{0};
  std::vector<int> vertex_faces_;
  int num_edges_ = 0;
  int num_boundary_ = 0;
  int repaired_faces_ = 0;
};

/// Area-weighted unit vertex normals.
/// Throws ErrorKind::invalid_argument naming the first isolated vertex.
std::vector<Vec3> vertex_normals(const Mesh& mesh);

Vec3 face_normal(const Mesh& mesh, int f);  // unit
double face_area(const Mesh& mesh, int f);

}  // namespace dlinpaint
