#include "dlinpaint/fairing.hpp"

#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "dlinpaint/error.hpp"
#include "dlinpaint/laplacian.hpp"

namespace dlinpaint {

std::vector<Vec3> fair_region(const Mesh& mesh, std::span<const int> free_vertices, int order) {
  std::vector<Vec3> out = mesh.positions();
  if (free_vertices.empty()) return out;
  const int n = mesh.num_vertices();
  std::vector<int> slot(n, -1);
  int count = 0;
  for (int v : free_vertices) {
    if (v < 0 || v >= n) {
      throw Error(ErrorKind::invalid_argument, "fairing: vertex " + std::to_string(v) + " out of range");
    }
    if (slot[v] == -1) slot[v] = count++;
  }
  if (count == n) {
    throw Error(ErrorKind::infeasible, "fairing: no constrained vertices");
  }

  // Negated for order 1 so the system matrix is positive semi-definite.
  const Eigen::SparseMatrix<double, Eigen::RowMajor> L = cotangent_laplacian(mesh, order).matrix;
  const double sign = order == 1 ? -1.0 : 1.0;
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(count, 3);
  for (int v = 0; v < n; ++v) {
    const int row = slot[v];
    if (row < 0) continue;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(L, v); it; ++it) {
      const int col = static_cast<int>(it.col());
      const double w = sign * it.value();
      if (slot[col] >= 0) {
        triplets.emplace_back(row, slot[col], w);
      } else {
        rhs.row(row) -= w * mesh.position(col).transpose();
      }
    }
  }
  Eigen::SparseMatrix<double> A(count, count);
  A.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::MatrixXd x;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  bool ok = ldlt.info() == Eigen::Success;
  if (ok) {
    x = ldlt.solve(rhs);
    ok = ldlt.info() == Eigen::Success && x.allFinite();
  }
  if (!ok) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) {
      throw Error(ErrorKind::infeasible,
                  "fairing: singular system (a free region has no constrained neighbours)");
    }
    x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) {
      throw Error(ErrorKind::infeasible, "fairing: solve failed");
    }
  }
  for (int v = 0; v < n; ++v) {
    if (slot[v] >= 0) out[v] = x.row(slot[v]).transpose();
  }
  return out;
}

}  // namespace dlinpaint
