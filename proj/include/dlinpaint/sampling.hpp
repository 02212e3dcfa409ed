#pragma once

#include <limits>
#include <span>
#include <vector>

#include "dlinpaint/execution.hpp"
#include "dlinpaint/mesh.hpp"

namespace dlinpaint {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Farthest-point seeds. With the greedy construction the set is both
/// r-covering (every vertex within covering_radius of a seed) and
/// r-separated (seeds pairwise at least covering_radius apart).
struct SeedSet {
  std::vector<int> seeds;
  double covering_radius = 0.0;
};

/// Geodesic ball around a seed. `vertices` is sorted ascending and holds
/// every vertex whose edge-graph distance to the seed is <= radius.
struct Patch {
  int seed = -1;
  std::vector<int> vertices;
  double radius = 0.0;

  bool contains(int v) const;
  int local_index(int v) const;  // -1 when absent
};

/// Multi-source shortest paths over mesh edges (Dijkstra). Unreachable
/// vertices get kUnreachable. Throws invalid_argument on an empty source set.
std::vector<double> geodesic_distances(const Mesh& mesh, std::span<const int> sources);

/// For each vertex the position (in `sources`) of its nearest source; ties go
/// to the lower source position. Unreachable vertices get -1.
std::vector<int> nearest_source(const Mesh& mesh, std::span<const int> sources);

/// Greedy farthest-point sampling from `start`; ties pick the lowest vertex
/// index. covering_radius is max_v d(v, S) once all seeds are placed.
SeedSet farthest_point_sampling(const Mesh& mesh, int count, int start = 0);

/// Continues farthest-point sampling from an existing seed list until the
/// covering radius drops to `target_radius` (or every vertex is a seed).
SeedSet extend_farthest_point_sampling(const Mesh& mesh, std::vector<int> seeds,
                                       double target_radius);

/// ceil(|V| / 8).
int default_seed_count(int num_vertices);

enum class RadiusMode { all_vertices, sampled };

/// all_vertices: sigma * mean edge length; sampled: sigma * covering radius.
double compute_patch_radius(const Mesh& mesh, RadiusMode mode, const SeedSet* seeds,
                            double sigma);

/// One patch per seed. Throws invalid_argument naming the seed when a ball
/// holds fewer than 3 vertices.
std::vector<Patch> build_patches(const Mesh& mesh, std::span<const int> seeds, double radius,
                                 Execution exec = Execution::parallel);

}  // namespace dlinpaint
