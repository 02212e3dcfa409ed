#include "dlinpaint/primitives.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <utility>

#include "dlinpaint/error.hpp"

namespace dlinpaint {

Mesh make_tetrahedron(double edge_length) {
  const double s = edge_length / (2.0 * std::sqrt(2.0));
  std::vector<Vec3> v = {Vec3(s, s, s), Vec3(s, -s, -s), Vec3(-s, s, -s), Vec3(-s, -s, s)};
  std::vector<Face> f = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return Mesh(std::move(v), std::move(f));
}

Mesh make_triangle() {
  return Mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
}

Mesh make_icosphere(int subdivisions, double radius) {
  if (subdivisions < 0) throw Error(ErrorKind::invalid_argument, "negative subdivision count");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {Vec3(-1, t, 0), Vec3(1, t, 0),  Vec3(-1, -t, 0), Vec3(1, -t, 0),
                         Vec3(0, -1, t), Vec3(0, 1, t),  Vec3(0, -1, -t), Vec3(0, 1, -t),
                         Vec3(t, 0, -1), Vec3(t, 0, 1),  Vec3(-t, 0, -1), Vec3(-t, 0, 1)};
  for (Vec3& p : v) p.normalize();
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& tri : f) {
      const int ab = mid(tri[0], tri[1]);
      const int bc = mid(tri[1], tri[2]);
      const int ca = mid(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (Vec3& p : v) p *= radius;
  return Mesh(std::move(v), std::move(f));
}

Mesh make_grid(int nx, int ny, double spacing) {
  if (nx < 2 || ny < 2) throw Error(ErrorKind::invalid_argument, "grid needs >= 2x2 vertices");
  std::vector<Vec3> v;
  v.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) v.emplace_back(i * spacing, j * spacing, 0.0);
  }
  std::vector<Face> f;
  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = j * nx + i;
      const int b = a + 1;
      const int c = a + nx + 1;
      const int d = a + nx;
      f.push_back({a, b, c});
      f.push_back({a, c, d});
    }
  }
  return Mesh(std::move(v), std::move(f));
}

Mesh make_cylinder(double radius, double height, int around, int rings) {
  if (around < 3 || rings < 2) throw Error(ErrorKind::invalid_argument, "cylinder too coarse");
  std::vector<Vec3> v;
  for (int j = 0; j < rings; ++j) {
    const double z = height * j / (rings - 1);
    for (int i = 0; i < around; ++i) {
      const double a = 2.0 * std::numbers::pi * i / around;
      v.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
    }
  }
  std::vector<Face> f;
  for (int j = 0; j + 1 < rings; ++j) {
    for (int i = 0; i < around; ++i) {
      const int a = j * around + i;
      const int b = j * around + (i + 1) % around;
      const int c = b + around;
      const int d = a + around;
      f.push_back({a, b, c});
      f.push_back({a, c, d});
    }
  }
  return Mesh(std::move(v), std::move(f));
}

Submesh remove_faces(const Mesh& mesh, const std::function<bool(int)>& remove) {
  std::vector<Face> kept;
  std::vector<char> used(mesh.num_vertices(), 0);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (remove(f)) continue;
    kept.push_back(mesh.faces()[f]);
    for (int v : mesh.faces()[f]) used[v] = 1;
  }
  Submesh out;
  out.old_to_new.assign(mesh.num_vertices(), -1);
  std::vector<Vec3> positions;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!used[v]) continue;
    out.old_to_new[v] = static_cast<int>(positions.size());
    out.new_to_old.push_back(v);
    positions.push_back(mesh.position(v));
  }
  for (Face& t : kept) {
    for (int& v : t) v = out.old_to_new[v];
  }
  out.mesh = Mesh(std::move(positions), std::move(kept));
  return out;
}

Mesh add_normal_noise(const Mesh& mesh, double sigma, std::uint64_t seed) {
  const std::vector<Vec3> normals = vertex_normals(mesh);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<Vec3> positions = mesh.positions();
  for (std::size_t v = 0; v < positions.size(); ++v) positions[v] += noise(rng) * normals[v];
  return mesh.with_positions(std::move(positions));
}

}  // namespace dlinpaint
