#pragma once

#include <span>
#include <vector>

#include "dlinpaint/mesh.hpp"

namespace dlinpaint {

/// Minimizes the discrete membrane (order 1) or thin-plate (order 2) energy
/// over the free vertices: solves L^k[F,F] X_F = -L^k[F,C] X_C with the
/// cotangent Laplacian of `mesh`. All other positions are returned unchanged.
/// Throws infeasible when the system is singular (e.g. a free component
/// without any constrained vertex).
std::vector<Vec3> fair_region(const Mesh& mesh, std::span<const int> free_vertices, int order);

}  // namespace dlinpaint
