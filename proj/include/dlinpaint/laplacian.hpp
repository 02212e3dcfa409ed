#pragma once

#include <Eigen/SparseCore>

#include "dlinpaint/mesh.hpp"

namespace dlinpaint {

/// Cotangent Laplacian raised to `order` (1 or 2).
///
/// Off-diagonal entries are w_ij = (cot a_ij + cot b_ij) / 2 over the angles
/// opposite edge ij; the diagonal makes every row sum to zero, so the matrix
/// is symmetric and negative semi-definite. No mass matrix is applied.
struct LaplacianMatrix {
  Eigen::SparseMatrix<double> matrix;
  int order = 1;
};

/// Cotangents are clamped to +-kCotangentClamp.
inline constexpr double kCotangentClamp = 1e4;

/// Throws invalid_argument for orders other than 1 and 2. Warns once when
/// clamping was needed.
LaplacianMatrix cotangent_laplacian(const Mesh& mesh, int order = 1);

}  // namespace dlinpaint
