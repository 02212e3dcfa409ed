#include "dlinpaint/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <string>
#include <unordered_map>

#include <Eigen/Geometry>

#include "dlinpaint/error.hpp"

namespace dlinpaint {

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

std::uint64_t undirected_key(int a, int b) { return a < b ? edge_key(a, b) : edge_key(b, a); }

std::string edge_name(int a, int b) {
  return "(" + std::to_string(std::min(a, b)) + ", " + std::to_string(std::max(a, b)) + ")";
}

}  // namespace

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int nv = num_vertices();
  const int nf = num_faces();
  for (int f = 0; f < nf; ++f) {
    const Face& t = faces_[f];
    for (int c = 0; c < 3; ++c) {
      if (t[c] < 0 || t[c] >= nv) {
        throw Error(ErrorKind::validation, "face " + std::to_string(f) +
                                               " references vertex " + std::to_string(t[c]) +
                                               " out of range");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorKind::validation,
                  "face " + std::to_string(f) + " repeats a vertex (degenerate triangle)");
    }
  }

  // Undirected edge -> incident half-edges.
  std::unordered_map<std::uint64_t, std::array<int, 2>> incident;
  incident.reserve(static_cast<std::size_t>(nf) * 2);
  for (int h = 0; h < 3 * nf; ++h) {
    const int a = faces_[h / 3][h % 3];
    const int b = faces_[h / 3][(h % 3 + 1) % 3];
    auto [it, inserted] = incident.try_emplace(undirected_key(a, b), std::array<int, 2>{h, -1});
    if (inserted) continue;
    if (it->second[1] != -1) {
      throw Error(ErrorKind::validation,
                  "non-manifold edge " + edge_name(a, b) + " shared by more than 2 faces");
    }
    it->second[1] = h;
  }

  // Propagate a consistent orientation over the face adjacency graph.
  std::vector<int> flip(nf, -1);
  std::vector<std::vector<std::pair<int, bool>>> face_links(nf);
  for (const auto& [key, hs] : incident) {
    if (hs[1] == -1) continue;
    const int h0 = hs[0];
    const int h1 = hs[1];
    // Consistent iff the two half-edges traverse the edge in opposite directions.
    const bool same_direction = faces_[h0 / 3][h0 % 3] == faces_[h1 / 3][h1 % 3];
    face_links[h0 / 3].emplace_back(h1 / 3, same_direction);
    face_links[h1 / 3].emplace_back(h0 / 3, same_direction);
  }
  for (auto& links : face_links) std::sort(links.begin(), links.end());
  for (int seed = 0; seed < nf; ++seed) {
    if (flip[seed] != -1) continue;
    flip[seed] = 0;
    std::queue<int> queue;
    queue.push(seed);
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop();
      for (const auto& [g, same] : face_links[f]) {
        const int want = same ? 1 - flip[f] : flip[f];
        if (flip[g] == -1) {
          flip[g] = want;
          queue.push(g);
        } else if (flip[g] != want) {
          throw Error(ErrorKind::validation,
                      "inconsistent orientation: faces " + std::to_string(f) + " and " +
                          std::to_string(g) + " cannot be oriented consistently");
        }
      }
    }
  }
  for (int f = 0; f < nf; ++f) {
    if (flip[f] == 1) {
      std::swap(faces_[f][1], faces_[f][2]);
      ++repaired_faces_;
    }
  }
  if (repaired_faces_ > 0) {
    warn("orientation repaired by flipping " + std::to_string(repaired_faces_) + " face(s)");
  }

  build_connectivity();
}

void Mesh::build_connectivity() {
  const int nv = num_vertices();
  const int nf = num_faces();
  std::unordered_map<std::uint64_t, int> directed;
  directed.reserve(static_cast<std::size_t>(nf) * 3);
  for (int h = 0; h < 3 * nf; ++h) {
    if (!directed.emplace(edge_key(tail(h), head(h)), h).second) {
      throw Error(ErrorKind::validation, "inconsistent orientation: directed edge " +
                                             edge_name(tail(h), head(h)) + " appears twice");
    }
  }
  twin_.assign(3 * nf, kNoHalfedge);
  num_boundary_ = 0;
  int interior_pairs = 0;
  for (int h = 0; h < 3 * nf; ++h) {
    auto it = directed.find(edge_key(head(h), tail(h)));
    if (it != directed.end()) {
      twin_[h] = it->second;
      ++interior_pairs;
    } else {
      ++num_boundary_;
    }
  }
  num_edges_ = interior_pairs / 2 + num_boundary_;

  std::vector<std::vector<int>> rings(nv);
  std::vector<std::vector<int>> fans(nv);
  for (int f = 0; f < nf; ++f) {
    for (int c = 0; c < 3; ++c) {
      const int v = faces_[f][c];
      rings[v].push_back(faces_[f][(c + 1) % 3]);
      rings[v].push_back(faces_[f][(c + 2) % 3]);
      fans[v].push_back(f);
    }
  }
  adjacency_offsets_.assign(1, 0);
  vertex_face_offsets_.assign(1, 0);
  adjacency_.clear();
  vertex_faces_.clear();
  for (int v = 0; v < nv; ++v) {
    auto& ring = rings[v];
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    adjacency_.insert(adjacency_.end(), ring.begin(), ring.end());
    adjacency_offsets_.push_back(static_cast<int>(adjacency_.size()));
    vertex_faces_.insert(vertex_faces_.end(), fans[v].begin(), fans[v].end());
    vertex_face_offsets_.push_back(static_cast<int>(vertex_faces_.size()));
  }
}

double Mesh::mean_edge_length() const {
  double total = 0.0;
  int count = 0;
  for (int h = 0; h < num_halfedges(); ++h) {
    // Each undirected edge once: the boundary half-edge, or the lower of a twin pair.
    if (twin_[h] != kNoHalfedge && twin_[h] < h) continue;
    total += (position(head(h)) - position(tail(h))).norm();
    ++count;
  }
  return count > 0 ? total / count : 0.0;
}

double Mesh::max_edge_length() const {
  double best = 0.0;
  for (int h = 0; h < num_halfedges(); ++h) {
    best = std::max(best, (position(head(h)) - position(tail(h))).norm());
  }
  return best;
}

double Mesh::bounding_box_diagonal() const {
  if (vertices_.empty()) return 0.0;
  Vec3 lo = vertices_.front();
  Vec3 hi = vertices_.front();
  for (const Vec3& p : vertices_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

Mesh Mesh::with_positions(std::vector<Vec3> positions) const {
  if (static_cast<int>(positions.size()) != num_vertices()) {
    throw Error(ErrorKind::invalid_argument, "with_positions: vertex count mismatch");
  }
  Mesh copy = *this;
  copy.vertices_ = std::move(positions);
  return copy;
}

Vec3 face_normal(const Mesh& mesh, int f) {
  const Face& t = mesh.faces()[f];
  const Vec3 n = (mesh.position(t[1]) - mesh.position(t[0]))
                     .cross(mesh.position(t[2]) - mesh.position(t[0]));
  const double len = n.norm();
  return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double face_area(const Mesh& mesh, int f) {
  const Face& t = mesh.faces()[f];
  return 0.5 * (mesh.position(t[1]) - mesh.position(t[0]))
                   .cross(mesh.position(t[2]) - mesh.position(t[0]))
                   .norm();
}

std::vector<Vec3> vertex_normals(const Mesh& mesh) {
  std::vector<Vec3> normals(mesh.num_vertices(), Vec3::Zero());
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces()[f];
    // Unnormalized cross product = 2 * area * unit normal.
    const Vec3 n = (mesh.position(t[1]) - mesh.position(t[0]))
                       .cross(mesh.position(t[2]) - mesh.position(t[0]));
    for (int v : t) normals[v] += n;
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.incident_faces(v).empty()) {
      throw Error(ErrorKind::invalid_argument,
                  "vertex " + std::to_string(v) + " is isolated; normal undefined");
    }
    const double len = normals[v].norm();
    if (len == 0.0) {
      throw Error(ErrorKind::invalid_argument,
                  "vertex " + std::to_string(v) + " has only degenerate incident faces");
    }
    normals[v] /= len;
  }
  return normals;
}

}  // namespace dlinpaint
