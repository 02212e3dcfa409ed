#pragma once

#include <array>
#include <span>
#include <vector>

#include "dlinpaint/mesh.hpp"

namespace dlinpaint {

/// Closed boundary loop in "hole orientation": for consecutive vertices
/// (a, b) the half-edge a -> b is missing, i.e. the hole lies to the left
/// when walking the loop with the surface normal pointing up.
struct HoleLoop {
  std::vector<int> vertices;
  bool outer = false;  // longest loop of a mesh with several loops

  int length() const { return static_cast<int>(vertices.size()); }
};

/// Every boundary half-edge lands in exactly one loop. Loops start at their
/// lowest vertex index and are ordered by that vertex. When there are two or
/// more loops the longest (first on ties) is flagged `outer`.
/// Throws validation when a vertex carries two boundary fans (non-simple loop).
std::vector<HoleLoop> detect_holes(const Mesh& mesh);

/// Splits a loop along bridge edges (i, j) where |p_i - p_j| < beta times
/// the shorter along-loop distance, recursively; the bridge with the smallest
/// ratio is taken first. Pairs already joined by a mesh edge are skipped.
std::vector<HoleLoop> split_complex_hole(const HoleLoop& loop, const Mesh& mesh,
                                         double beta = 0.5);

struct FrontOptions {
  double snap_factor = 0.3;  // x mean boundary edge length
};

struct FillResult {
  Mesh mesh;
  std::vector<int> new_vertices;
  std::vector<int> new_faces;
  std::array<int, 3> rule_counts{};  // ear / one vertex / two vertices
  std::vector<int> rule_log;         // rule (1-3) applied at each step
  double target_edge_length = 0.0;
};

/// Advancing-front triangulation of one or more sub-loops of a hole.
///
/// Repeatedly picks the front vertex with the smallest interior angle theta
/// (measured in the plane orthogonal to its estimated normal) and applies
///   theta <= 75 deg        -> close the ear with one triangle,
///   75 < theta <= 135 deg  -> one new vertex on the bisector, two triangles,
///   theta > 135 deg        -> two new vertices on the trisectors, three triangles.
/// New edges target the mean boundary edge length. A new vertex within
/// snap_factor * target of another front vertex is merged with it, which
/// splits the front. Steps that would fold or cross the front fall back to a
/// simpler rule or the next vertex. Throws infeasible if the front fails to
/// close within |loop|^2 steps.
FillResult advancing_front_fill(const Mesh& mesh, std::span<const HoleLoop> loops,
                                const FrontOptions& options = {});
FillResult advancing_front_fill(const Mesh& mesh, const HoleLoop& loop,
                                const FrontOptions& options = {});

struct HoleFillOptions {
  double beta = 0.5;
  int fair_order = 2;
  int large_hole_threshold = 8;  // fair holes with more boundary edges than this
  bool fill_outer = false;
  FrontOptions front;
};

struct FilledHole {
  int loop_length = 0;
  int sub_loops = 0;
  int vertices_added = 0;
  int faces_added = 0;
  bool faired = false;
  std::vector<int> border;  // original loop vertices
};

struct HoleFillResult {
  Mesh mesh;                       // original vertices keep their indices
  int original_vertex_count = 0;   // vertices >= this index are new
  std::vector<FilledHole> holes;
  std::vector<HoleLoop> skipped;   // outer loop when not filled
};

/// detect -> split -> advancing front -> fairing of large holes.
HoleFillResult fill_holes(const Mesh& mesh, const HoleFillOptions& options = {});

}  // namespace dlinpaint
