#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace dlinpaint {

struct SparseCode {
  Eigen::VectorXd alpha;     // one coefficient per atom, zero off the support
  std::vector<int> support;  // selection order
  double residual_norm = 0.0;

  int sparsity() const { return static_cast<int>(support.size()); }
};

/// Orthogonal matching pursuit for y ~ D alpha with |support| <= L.
///
/// Each step picks the unused atom with the largest normalized correlation
/// |d_j . r| / |d_j| (ties to the lowest index), re-solves least squares on
/// the support and updates the residual. Stops when L atoms are selected,
/// |r| <= eps, or no atom correlates with the residual. Zero columns are
/// skipped; an all-zero D throws invalid_argument.
SparseCode orthogonal_matching_pursuit(const Eigen::VectorXd& y, const Eigen::MatrixXd& dict,
                                       int sparsity, double eps);

/// OMP restricted to the rows flagged in `known_rows` (the projection M D).
/// The budget drops to the number of known rows when that is smaller than L.
/// residual_norm is measured on the known rows only.
SparseCode masked_orthogonal_matching_pursuit(const Eigen::VectorXd& y,
                                              const Eigen::MatrixXd& dict,
                                              std::span<const char> known_rows, int sparsity,
                                              double eps);

}  // namespace dlinpaint
