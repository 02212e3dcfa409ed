#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dlinpaint/mesh.hpp"

namespace dlinpaint {

// Analytic test surfaces. All outputs are consistently oriented with
// outward (or +z) facing normals.

Mesh make_tetrahedron(double edge_length = 1.0);
Mesh make_triangle();

/// Subdivided icosahedron projected to a sphere: 10 * 4^s + 2 vertices
/// (s = 3 -> 642, s = 4 -> 2562).
Mesh make_icosphere(int subdivisions, double radius = 1.0);

/// Regular (nx x ny)-vertex grid in the z = 0 plane, lower-left at the origin.
Mesh make_grid(int nx, int ny, double spacing = 1.0);

/// Open cylinder around the z axis.
Mesh make_cylinder(double radius, double height, int around, int rings);

struct Submesh {
  Mesh mesh;
  std::vector<int> old_to_new;  // -1 for dropped vertices
  std::vector<int> new_to_old;
};

/// Drops faces for which `remove(f)` is true, then drops vertices no longer
/// referenced. Surviving vertices keep their relative order.
Submesh remove_faces(const Mesh& mesh, const std::function<bool(int)>& remove);

/// Displaces every vertex along its normal by N(0, sigma^2) noise.
Mesh add_normal_noise(const Mesh& mesh, double sigma, std::uint64_t seed);

}  // namespace dlinpaint
