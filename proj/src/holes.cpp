#include "dlinpaint/holes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>

#include <Eigen/Geometry>

#include "dlinpaint/error.hpp"
#include "dlinpaint/fairing.hpp"

namespace dlinpaint {

namespace {

using Vec2 = Eigen::Vector2d;

constexpr double kRule1Max = 75.0 * std::numbers::pi / 180.0;
constexpr double kRule2Max = 135.0 * std::numbers::pi / 180.0;

std::uint64_t undirected_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Proper crossing of segments p0p1 and q0q1 (shared endpoints excluded by caller).
bool segments_cross(const Vec2& p0, const Vec2& p1, const Vec2& q0, const Vec2& q1, double tol) {
  const double d1 = cross2(p1 - p0, q0 - p0);
  const double d2 = cross2(p1 - p0, q1 - p0);
  const double d3 = cross2(q1 - q0, p0 - q0);
  const double d4 = cross2(q1 - q0, p1 - q0);
  return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
         ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
}

bool strictly_inside(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c, double tol) {
  return cross2(b - a, p - a) > tol && cross2(c - b, p - b) > tol && cross2(a - c, p - c) > tol;
}

// Tangent-plane chart at a front vertex.
struct Chart {
  Vec3 origin;
  Vec3 normal;
  Vec3 t1;
  Vec3 t2;

  Chart(const Vec3& o, const Vec3& n) : origin(o), normal(n) {
    int axis = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::abs(n[k]) < std::abs(n[axis])) axis = k;
    }
    t1 = (Vec3::Unit(axis) - n[axis] * n).normalized();
    t2 = n.cross(t1);
  }

  Vec2 map(const Vec3& p) const {
    const Vec3 d = p - origin;
    return {d.dot(t1), d.dot(t2)};
  }
  Vec3 lift(const Vec2& q) const { return origin + q.x() * t1 + q.y() * t2; }
};

class FrontFiller {
 public:
  FrontFiller(const Mesh& mesh, const FrontOptions& options)
      : positions_(mesh.positions()), faces_(mesh.faces()), options_(options),
        original_vertices_(mesh.num_vertices()), original_faces_(mesh.num_faces()) {
    vertex_faces_.resize(positions_.size());
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) register_face(f);
  }

  void fill(std::vector<std::vector<int>> fronts, double target, long budget) {
    target_ = target;
    std::vector<std::vector<int>> pending = std::move(fronts);
    long steps = 0;
    while (!pending.empty()) {
      std::vector<int> front = std::move(pending.back());
      pending.pop_back();
      while (true) {
        if (front.size() < 3) {
          throw Error(ErrorKind::infeasible, "advancing front degenerated below 3 vertices");
        }
        if (front.size() == 3) {
          add_face(front[0], front[1], front[2]);
          break;
        }
        if (++steps > budget) {
          throw Error(ErrorKind::infeasible,
                      "advancing front did not close within " + std::to_string(budget) +
                          " steps");
        }
        std::vector<std::vector<int>> split;
        if (!advance(front, split)) {
          throw Error(ErrorKind::infeasible,
                      "advancing front stuck: no valid triangle at any of " +
                          std::to_string(front.size()) + " front vertices");
        }
        if (!split.empty()) {
          for (auto& s : split) pending.push_back(std::move(s));
          break;
        }
      }
    }
  }

  Mesh build() const { return Mesh(positions_, faces_); }
  int original_vertices() const { return original_vertices_; }
  int vertex_count() const { return static_cast<int>(positions_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }
  int original_faces() const { return original_faces_; }
  const std::array<int, 3>& rule_counts() const { return rules_; }
  const std::vector<int>& rule_log() const { return rule_log_; }

 private:
  void register_face(int f) {
    for (int c = 0; c < 3; ++c) {
      vertex_faces_[faces_[f][c]].push_back(f);
      ++edge_count_[undirected_key(faces_[f][c], faces_[f][(c + 1) % 3])];
    }
  }

  void add_face(int a, int b, int c) {
    faces_.push_back({a, b, c});
    register_face(static_cast<int>(faces_.size()) - 1);
  }

  int add_vertex(const Vec3& p) {
    positions_.push_back(p);
    vertex_faces_.emplace_back();
    return static_cast<int>(positions_.size()) - 1;
  }

  bool edge_exists(int a, int b) const {
    auto it = edge_count_.find(undirected_key(a, b));
    return it != edge_count_.end() && it->second > 0;
  }

  // Incident face normals averaged with the front normal, so fronts whose
  // surrounding faces stand perpendicular to the hole (open tube ends) still
  // project to a proper polygon.
  Vec3 normal_at(int v, const Vec3& front_n) const {
    Vec3 sum = Vec3::Zero();
    for (int f : vertex_faces_[v]) {
      const Face& t = faces_[f];
      sum += (positions_[t[1]] - positions_[t[0]]).cross(positions_[t[2]] - positions_[t[0]]);
    }
    const double len = sum.norm();
    if (!(len > 0.0)) return front_n;
    const Vec3 blended = sum / len + front_n;
    const double blen = blended.norm();
    return blen > 1e-12 ? Vec3(blended / blen) : Vec3(sum / len);
  }

  // Newell normal of the front polygon; points to the side from which the
  // front runs counter-clockwise.
  Vec3 front_normal(const std::vector<int>& front) const {
    Vec3 n = Vec3::Zero();
    for (std::size_t k = 0; k < front.size(); ++k) {
      const Vec3& p = positions_[front[k]];
      const Vec3& q = positions_[front[(k + 1) % front.size()]];
      n += p.cross(q);
    }
    const double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3::UnitZ();
  }

  struct Candidate {
    double theta;
    int index;
  };

  // One step on `front`. Returns false if no rule applies anywhere. When the
  // front splits, the pieces are returned in `split` and `front` is stale.
  bool advance(std::vector<int>& front, std::vector<std::vector<int>>& split) {
    const int n = static_cast<int>(front.size());
    const Vec3 fallback = front_normal(front);
    std::vector<Candidate> candidates(n);
    for (int i = 0; i < n; ++i) candidates[i] = {angle_at(front, i, fallback), i};
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
      return x.theta < y.theta || (x.theta == y.theta && x.index < y.index);
    });
    // First pass insists on well-shaped triangles, the second only on
    // non-degenerate ones.
    for (double quality : {1e-2, 1e-9}) {
      for (const Candidate& cand : candidates) {
        const int rule = cand.theta <= kRule1Max ? 1 : cand.theta <= kRule2Max ? 2 : 3;
        for (int r = rule; r >= 1; --r) {
          if (try_rule(r, front, cand.index, cand.theta, fallback, quality, split)) {
            ++rules_[r - 1];
            rule_log_.push_back(r);
            return true;
          }
        }
      }
    }
    return false;
  }

  double angle_at(const std::vector<int>& front, int i, const Vec3& fallback) const {
    const int n = static_cast<int>(front.size());
    const int a = front[(i + n - 1) % n];
    const int b = front[i];
    const int c = front[(i + 1) % n];
    const Chart chart(positions_[b], normal_at(b, fallback));
    const Vec2 e1 = chart.map(positions_[a]);
    const Vec2 e2 = chart.map(positions_[c]);
    if (e1.squaredNorm() == 0.0 || e2.squaredNorm() == 0.0) return std::numbers::pi;
    double theta = std::atan2(cross2(e2, e1), e2.dot(e1));
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    return theta;
  }

  struct Local {
    Chart chart;
    std::vector<Vec2> uv;  // front vertices in the chart
  };

  Local chart_for(const std::vector<int>& front, int i, const Vec3& fallback) const {
    Local local{Chart(positions_[front[i]], normal_at(front[i], fallback)), {}};
    local.uv.reserve(front.size());
    for (int v : front) local.uv.push_back(local.chart.map(positions_[v]));
    return local;
  }

  double area3(const Vec3& p, const Vec3& q, const Vec3& r) const {
    return 0.5 * (q - p).cross(r - p).norm();
  }

  // Triangles (given as chart points + 3D points) must be counter-clockwise,
  // large enough, and contain no other front vertex.
  bool triangles_valid(const Local& local, const std::vector<int>& front,
                       const std::vector<std::array<Vec2, 3>>& tris2,
                       const std::vector<std::array<Vec3, 3>>& tris3,
                       const std::vector<int>& involved, double quality) const {
    const double min_area = quality * target_ * target_;
    for (std::size_t t = 0; t < tris2.size(); ++t) {
      const auto& [p, q, r] = tris2[t];
      if (cross2(q - p, r - p) <= 2.0 * min_area) return false;
      if (area3(tris3[t][0], tris3[t][1], tris3[t][2]) < min_area) return false;
      const double tol = 1e-12 * target_ * target_;
      for (std::size_t k = 0; k < front.size(); ++k) {
        if (std::find(involved.begin(), involved.end(), front[k]) != involved.end()) continue;
        if (strictly_inside(local.uv[k], p, q, r, tol)) return false;
      }
    }
    return true;
  }

  // New segment (s0, s1) with endpoint vertex ids (-1 for new vertices) must
  // not cross any front edge that does not share an endpoint.
  bool crosses_front(const Local& local, const std::vector<int>& front, const Vec2& s0,
                     const Vec2& s1, int id0, int id1) const {
    const int n = static_cast<int>(front.size());
    const double tol = 1e-12 * target_ * target_;
    for (int k = 0; k < n; ++k) {
      const int u = front[k];
      const int w = front[(k + 1) % n];
      if (u == id0 || u == id1 || w == id0 || w == id1) continue;
      if (segments_cross(s0, s1, local.uv[k], local.uv[(k + 1) % n], tol)) return true;
    }
    return false;
  }

  // Nearest front vertex (other than the excluded ones) within snap distance.
  std::optional<int> snap_target(const std::vector<int>& front, const Vec3& p,
                                 const std::vector<int>& exclude) const {
    const double snap = options_.snap_factor * target_;
    std::optional<int> best;
    double best_d = snap;
    for (int k = 0; k < static_cast<int>(front.size()); ++k) {
      if (std::find(exclude.begin(), exclude.end(), front[k]) != exclude.end()) continue;
      const double d = (positions_[front[k]] - p).norm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  }

  Vec3 direction(const Local& local, const Vec2& e2, double angle) const {
    const Vec2 u = e2.normalized();
    const Vec2 d(std::cos(angle) * u.x() - std::sin(angle) * u.y(),
                 std::sin(angle) * u.x() + std::cos(angle) * u.y());
    return d.x() * local.chart.t1 + d.y() * local.chart.t2;
  }

  bool try_rule(int rule, std::vector<int>& front, int i, double theta, const Vec3& fallback,
                double quality, std::vector<std::vector<int>>& split) {
    const int n = static_cast<int>(front.size());
    const int ia = (i + n - 1) % n;
    const int ic = (i + 1) % n;
    const int a = front[ia];
    const int b = front[i];
    const int c = front[ic];
    const Local local = chart_for(front, i, fallback);
    const Vec2& pa = local.uv[ia];
    const Vec2& pb = local.uv[i];
    const Vec2& pc = local.uv[ic];

    if (rule == 1) {
      if (theta >= std::numbers::pi || edge_exists(a, c)) return false;
      if (!triangles_valid(local, front, {{pa, pb, pc}},
                           {{positions_[a], positions_[b], positions_[c]}}, {a, b, c}, quality)) {
        return false;
      }
      if (crosses_front(local, front, pa, pc, a, c)) return false;
      add_face(a, b, c);
      front.erase(front.begin() + i);
      return true;
    }

    const Vec2 e2 = pc - pb;
    if (e2.squaredNorm() == 0.0) return false;

    if (rule == 2) {
      const Vec3 p_new = positions_[b] + target_ * direction(local, e2, theta / 2.0);
      if (auto k = snap_target(front, p_new, {a, b, c})) {
        return try_merge(front, i, *k, local, quality, split);
      }
      const Vec2 q = local.chart.map(p_new);
      if (!triangles_valid(local, front, {{pa, pb, q}, {q, pb, pc}},
                           {{positions_[a], positions_[b], p_new},
                            {p_new, positions_[b], positions_[c]}},
                           {a, b, c}, quality)) {
        return false;
      }
      if (crosses_front(local, front, pa, q, a, -1) || crosses_front(local, front, pb, q, b, -1) ||
          crosses_front(local, front, pc, q, c, -1)) {
        return false;
      }
      const int v = add_vertex(p_new);
      add_face(a, b, v);
      add_face(v, b, c);
      front[i] = v;
      return true;
    }

    // Rule 3: n1 near a (2 theta / 3 from the c edge), n2 near c (theta / 3).
    const Vec3 p1 = positions_[b] + target_ * direction(local, e2, 2.0 * theta / 3.0);
    const Vec3 p2 = positions_[b] + target_ * direction(local, e2, theta / 3.0);
    if (snap_target(front, p1, {b}) || snap_target(front, p2, {b})) return false;
    if ((p1 - p2).norm() < options_.snap_factor * target_) return false;
    const Vec2 q1 = local.chart.map(p1);
    const Vec2 q2 = local.chart.map(p2);
    if (!triangles_valid(local, front, {{pa, pb, q1}, {q1, pb, q2}, {q2, pb, pc}},
                         {{positions_[a], positions_[b], p1},
                          {p1, positions_[b], p2},
                          {p2, positions_[b], positions_[c]}},
                         {a, b, c}, quality)) {
      return false;
    }
    if (crosses_front(local, front, pa, q1, a, -1) || crosses_front(local, front, q1, q2, -1, -1) ||
        crosses_front(local, front, q2, pc, -1, c) || crosses_front(local, front, pb, q1, b, -1) ||
        crosses_front(local, front, pb, q2, b, -1)) {
      return false;
    }
    const int v1 = add_vertex(p1);
    const int v2 = add_vertex(p2);
    add_face(a, b, v1);
    add_face(v1, b, v2);
    add_face(v2, b, c);
    front[i] = v1;
    front.insert(front.begin() + i + 1, v2);
    return true;
  }

  // Rule 2 whose new vertex snapped onto front vertex at position k: the
  // triangles (a, b, u) and (u, b, c) split the front in two.
  bool try_merge(const std::vector<int>& front, int i, int k, const Local& local, double quality,
                 std::vector<std::vector<int>>& split) {
    const int n = static_cast<int>(front.size());
    const int ia = (i + n - 1) % n;
    const int ic = (i + 1) % n;
    // Neighbours at distance 2 would leave a two-vertex front.
    if (k == (i + 2) % n || k == (i + n - 2) % n) return false;
    const int a = front[ia];
    const int b = front[i];
    const int c = front[ic];
    const int u = front[k];
    if (u == a || u == c || edge_exists(a, u) || edge_exists(b, u) || edge_exists(c, u)) {
      return false;
    }
    const Vec2& pa = local.uv[ia];
    const Vec2& pb = local.uv[i];
    const Vec2& pc = local.uv[ic];
    const Vec2& pu = local.uv[k];
    if (!triangles_valid(local, front, {{pa, pb, pu}, {pu, pb, pc}},
                         {{positions_[a], positions_[b], positions_[u]},
                          {positions_[u], positions_[b], positions_[c]}},
                         {a, b, c, u}, quality)) {
      return false;
    }
    if (crosses_front(local, front, pa, pu, a, u) || crosses_front(local, front, pb, pu, b, u) ||
        crosses_front(local, front, pc, pu, c, u)) {
      return false;
    }
    add_face(a, b, u);
    add_face(u, b, c);
    std::vector<int> first;   // c .. u
    for (int j = ic; j != k; j = (j + 1) % n) first.push_back(front[j]);
    first.push_back(u);
    std::vector<int> second;  // u .. a
    for (int j = k; j != ia; j = (j + 1) % n) second.push_back(front[j]);
    second.push_back(a);
    split.push_back(std::move(first));
    split.push_back(std::move(second));
    return true;
  }

  std::vector<Vec3> positions_;
  std::vector<Face> faces_;
  std::vector<std::vector<int>> vertex_faces_;
  std::unordered_map<std::uint64_t, int> edge_count_;
  FrontOptions options_;
  double target_ = 1.0;
  int original_vertices_ = 0;
  int original_faces_ = 0;
  std::array<int, 3> rules_{};
  std::vector<int> rule_log_;
};

double mean_loop_edge(const Mesh& mesh, std::span<const HoleLoop> loops) {
  double total = 0.0;
  int count = 0;
  for (const HoleLoop& loop : loops) {
    const int n = loop.length();
    for (int k = 0; k < n; ++k) {
      total += (mesh.position(loop.vertices[k]) - mesh.position(loop.vertices[(k + 1) % n])).norm();
      ++count;
    }
  }
  return count > 0 ? total / count : 0.0;
}

std::vector<std::vector<int>> to_fronts(std::span<const HoleLoop> loops) {
  std::vector<std::vector<int>> fronts;
  // Reverse so the first loop is processed first (fronts are a stack).
  for (auto it = loops.rbegin(); it != loops.rend(); ++it) {
    if (it->length() < 3) {
      throw Error(ErrorKind::invalid_argument, "hole loop with fewer than 3 vertices");
    }
    fronts.push_back(it->vertices);
  }
  return fronts;
}

void split_recursive(const std::vector<int>& loop, const Mesh& mesh, double beta,
                     std::vector<HoleLoop>& out) {
  const int n = static_cast<int>(loop.size());
  std::vector<double> arc(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    arc[k + 1] = arc[k] + (mesh.position(loop[k]) - mesh.position(loop[(k + 1) % n])).norm();
  }
  const double perimeter = arc[n];
  int best_i = -1;
  int best_j = -1;
  double best_ratio = beta;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (n - (j - i) < 2) continue;
      const double forward = arc[j] - arc[i];
      const double along = std::min(forward, perimeter - forward);
      if (!(along > 0.0)) continue;
      const double ratio = (mesh.position(loop[i]) - mesh.position(loop[j])).norm() / along;
      if (ratio < best_ratio) {
        const auto ring = mesh.neighbors(loop[i]);
        if (std::binary_search(ring.begin(), ring.end(), loop[j])) continue;
        best_ratio = ratio;
        best_i = i;
        best_j = j;
      }
    }
  }
  if (best_i < 0) {
    out.push_back({loop, false});
    return;
  }
  std::vector<int> first(loop.begin() + best_i, loop.begin() + best_j + 1);
  std::vector<int> second(loop.begin() + best_j, loop.end());
  second.insert(second.end(), loop.begin(), loop.begin() + best_i + 1);
  split_recursive(first, mesh, beta, out);
  split_recursive(second, mesh, beta, out);
}

}  // namespace

std::vector<HoleLoop> detect_holes(const Mesh& mesh) {
  // Boundary half-edge leaving each vertex (in face orientation).
  std::vector<int> outgoing(mesh.num_vertices(), -1);
  for (int h = 0; h < mesh.num_halfedges(); ++h) {
    if (!mesh.is_boundary(h)) continue;
    const int v = mesh.tail(h);
    if (outgoing[v] != -1) {
      throw Error(ErrorKind::validation,
                  "non-simple boundary at vertex " + std::to_string(v) +
                      " (two boundary loops touch there); repair the mesh before hole filling");
    }
    outgoing[v] = h;
  }
  std::vector<char> visited(mesh.num_halfedges(), 0);
  std::vector<HoleLoop> loops;
  for (int v0 = 0; v0 < mesh.num_vertices(); ++v0) {
    const int start = outgoing[v0];
    if (start == -1 || visited[start]) continue;
    std::vector<int> chain;
    int h = start;
    while (!visited[h]) {
      visited[h] = 1;
      chain.push_back(mesh.tail(h));
      h = outgoing[mesh.head(h)];
      if (h == -1) {
        throw Error(ErrorKind::validation, "open boundary chain (non-manifold boundary)");
      }
    }
    if (h != start) throw Error(ErrorKind::validation, "boundary chain does not close");
    // Reverse into hole orientation, keeping the lowest vertex first.
    HoleLoop loop;
    loop.vertices.push_back(chain.front());
    for (auto it = chain.rbegin(); it + 1 != chain.rend(); ++it) loop.vertices.push_back(*it);
    loops.push_back(std::move(loop));
  }
  if (loops.size() >= 2) {
    auto longest = std::max_element(loops.begin(), loops.end(), [](const auto& x, const auto& y) {
      return x.length() < y.length();
    });
    longest->outer = true;
  }
  return loops;
}

std::vector<HoleLoop> split_complex_hole(const HoleLoop& loop, const Mesh& mesh, double beta) {
  std::vector<HoleLoop> out;
  split_recursive(loop.vertices, mesh, beta, out);
  return out;
}

FillResult advancing_front_fill(const Mesh& mesh, std::span<const HoleLoop> loops,
                                const FrontOptions& options) {
  FrontFiller filler(mesh, options);
  long total = 0;
  for (const HoleLoop& l : loops) total += l.length();
  const double target = mean_loop_edge(mesh, loops);
  filler.fill(to_fronts(loops), target, std::max(1L, total * total));
  FillResult result;
  result.mesh = filler.build();
  for (int v = filler.original_vertices(); v < filler.vertex_count(); ++v) {
    result.new_vertices.push_back(v);
  }
  for (int f = filler.original_faces(); f < filler.face_count(); ++f) result.new_faces.push_back(f);
  result.rule_counts = filler.rule_counts();
  result.rule_log = filler.rule_log();
  result.target_edge_length = target;
  return result;
}

FillResult advancing_front_fill(const Mesh& mesh, const HoleLoop& loop,
                                const FrontOptions& options) {
  return advancing_front_fill(mesh, std::span<const HoleLoop>(&loop, 1), options);
}

HoleFillResult fill_holes(const Mesh& mesh, const HoleFillOptions& options) {
  HoleFillResult result;
  result.original_vertex_count = mesh.num_vertices();
  const std::vector<HoleLoop> loops = detect_holes(mesh);
  FrontFiller filler(mesh, options.front);
  std::vector<int> free_vertices;
  for (const HoleLoop& loop : loops) {
    if (loop.outer && !options.fill_outer) {
      result.skipped.push_back(loop);
      continue;
    }
    const std::vector<HoleLoop> pieces = split_complex_hole(loop, mesh, options.beta);
    const int v_before = filler.vertex_count();
    const int f_before = filler.face_count();
    const long n = loop.length();
    filler.fill(to_fronts(pieces), mean_loop_edge(mesh, std::span<const HoleLoop>(&loop, 1)),
                std::max(1L, n * n));
    FilledHole hole;
    hole.loop_length = loop.length();
    hole.sub_loops = static_cast<int>(pieces.size());
    hole.vertices_added = filler.vertex_count() - v_before;
    hole.faces_added = filler.face_count() - f_before;
    hole.border = loop.vertices;
    hole.faired = options.fair_order > 0 && loop.length() > options.large_hole_threshold &&
                  hole.vertices_added > 0;
    if (hole.faired) {
      for (int v = v_before; v < filler.vertex_count(); ++v) free_vertices.push_back(v);
    }
    result.holes.push_back(std::move(hole));
  }
  result.mesh = filler.build();
  if (!free_vertices.empty()) {
    result.mesh = result.mesh.with_positions(
        fair_region(result.mesh, free_vertices, options.fair_order));
  }
  return result;
}

}  // namespace dlinpaint
