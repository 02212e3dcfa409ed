#include "dlinpaint/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <tuple>
#include <string>
#include <utility>

#include "dlinpaint/error.hpp"
#include "dlinpaint/kernels.hpp"

namespace dlinpaint {

namespace {

using QueueItem = std::pair<double, int>;
using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

// Relaxes `dist` from the vertices already pushed on `queue`.
void run_dijkstra(const Mesh& mesh, std::vector<double>& dist, MinQueue& queue) {
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (int u : mesh.neighbors(v)) {
      const double nd = d + (mesh.position(u) - mesh.position(v)).norm();
      if (nd < dist[u]) {
        dist[u] = nd;
        queue.emplace(nd, u);
      }
    }
  }
}

void add_source(const Mesh& mesh, std::vector<double>& dist, int source) {
  MinQueue queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  run_dijkstra(mesh, dist, queue);
}

void check_vertex(const Mesh& mesh, int v, const char* what) {
  if (v < 0 || v >= mesh.num_vertices()) {
    throw Error(ErrorKind::invalid_argument,
                std::string(what) + " vertex " + std::to_string(v) + " out of range");
  }
}

// Lowest-index vertex with the largest distance among non-seeds.
int farthest_vertex(const std::vector<double>& dist, const std::vector<char>& is_seed) {
  int best = -1;
  for (int v = 0; v < static_cast<int>(dist.size()); ++v) {
    if (is_seed[v]) continue;
    if (best == -1 || dist[v] > dist[best]) best = v;
  }
  return best;
}

double max_distance(const std::vector<double>& dist) {
  double r = 0.0;
  for (double d : dist) r = std::max(r, d);
  return r;
}

}  // namespace

bool Patch::contains(int v) const { return std::binary_search(vertices.begin(), vertices.end(), v); }

int Patch::local_index(int v) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
  if (it == vertices.end() || *it != v) return -1;
  return static_cast<int>(it - vertices.begin());
}

std::vector<double> geodesic_distances(const Mesh& mesh, std::span<const int> sources) {
  if (sources.empty()) throw Error(ErrorKind::invalid_argument, "geodesic distances: empty source set");
  std::vector<double> dist(mesh.num_vertices(), kUnreachable);
  MinQueue queue;
  for (int s : sources) {
    check_vertex(mesh, s, "source");
    dist[s] = 0.0;
    queue.emplace(0.0, s);
  }
  run_dijkstra(mesh, dist, queue);
  return dist;
}

std::vector<int> nearest_source(const Mesh& mesh, std::span<const int> sources) {
  if (sources.empty()) throw Error(ErrorKind::invalid_argument, "nearest source: empty source set");
  const int n = mesh.num_vertices();
  std::vector<double> dist(n, kUnreachable);
  std::vector<int> label(n, -1);
  // Key (distance, label, vertex) makes ties resolve towards the lower label.
  using Item = std::tuple<double, int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int i = 0; i < static_cast<int>(sources.size()); ++i) {
    const int s = sources[i];
    check_vertex(mesh, s, "source");
    if (label[s] != -1) continue;
    dist[s] = 0.0;
    label[s] = i;
    queue.emplace(0.0, i, s);
  }
  while (!queue.empty()) {
    const auto [d, lab, v] = queue.top();
    queue.pop();
    if (d > dist[v] || lab != label[v]) continue;
    for (int u : mesh.neighbors(v)) {
      const double nd = d + (mesh.position(u) - mesh.position(v)).norm();
      if (nd < dist[u] || (nd == dist[u] && lab < label[u])) {
        dist[u] = nd;
        label[u] = lab;
        queue.emplace(nd, lab, u);
      }
    }
  }
  return label;
}

SeedSet farthest_point_sampling(const Mesh& mesh, int count, int start) {
  const int n = mesh.num_vertices();
  if (count < 1) throw Error(ErrorKind::invalid_argument, "seed count must be >= 1");
  if (count > n) {
    throw Error(ErrorKind::invalid_argument, "seed count " + std::to_string(count) +
                                                 " exceeds vertex count " + std::to_string(n));
  }
  check_vertex(mesh, start, "start");
  std::vector<double> dist(n, kUnreachable);
  std::vector<char> is_seed(n, 0);
  SeedSet out;
  out.seeds.reserve(count);
  int next = start;
  for (int k = 0; k < count; ++k) {
    out.seeds.push_back(next);
    is_seed[next] = 1;
    add_source(mesh, dist, next);
    if (k + 1 < count) next = farthest_vertex(dist, is_seed);
  }
  out.covering_radius = max_distance(dist);
  return out;
}

SeedSet extend_farthest_point_sampling(const Mesh& mesh, std::vector<int> seeds,
                                       double target_radius) {
  const int n = mesh.num_vertices();
  if (seeds.empty()) throw Error(ErrorKind::invalid_argument, "extend FPS: empty initial seeds");
  std::vector<double> dist = geodesic_distances(mesh, seeds);
  std::vector<char> is_seed(n, 0);
  for (int s : seeds) is_seed[s] = 1;
  double covering = max_distance(dist);
  while (covering > target_radius && static_cast<int>(seeds.size()) < n) {
    const int v = farthest_vertex(dist, is_seed);
    if (v < 0) break;
    seeds.push_back(v);
    is_seed[v] = 1;
    add_source(mesh, dist, v);
    covering = max_distance(dist);
  }
  return {std::move(seeds), covering};
}

int default_seed_count(int num_vertices) { return (num_vertices + 7) / 8; }

double compute_patch_radius(const Mesh& mesh, RadiusMode mode, const SeedSet* seeds,
                            double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "overlap factor sigma must be > 0");
  }
  if (mode == RadiusMode::all_vertices) return sigma * mesh.mean_edge_length();
  if (seeds == nullptr) {
    throw Error(ErrorKind::invalid_argument, "sampled radius mode requires a seed set");
  }
  return sigma * seeds->covering_radius;
}

std::vector<Patch> build_patches(const Mesh& mesh, std::span<const int> seeds, double radius,
                                 Execution exec) {
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_argument, "patch radius must be > 0");
  for (int s : seeds) check_vertex(mesh, s, "seed");
  std::vector<Patch> patches = exec == Execution::serial
                                   ? kernels::geodesic_balls_serial(mesh, seeds, radius)
                                   : kernels::geodesic_balls_parallel(mesh, seeds, radius);
  for (const Patch& p : patches) {
    if (p.vertices.size() < 3) {
      throw Error(ErrorKind::invalid_argument,
                  "patch at seed " + std::to_string(p.seed) + " has " +
                      std::to_string(p.vertices.size()) + " vertices (< 3); radius too small");
    }
  }
  return patches;
}

}  // namespace dlinpaint
