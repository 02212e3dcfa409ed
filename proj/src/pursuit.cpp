#include "dlinpaint/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/QR>

#include "dlinpaint/error.hpp"

namespace dlinpaint {

SparseCode orthogonal_matching_pursuit(const Eigen::VectorXd& y, const Eigen::MatrixXd& dict,
                                       int sparsity, double eps) {
  if (sparsity < 1) throw Error(ErrorKind::invalid_argument, "OMP sparsity must be >= 1");
  if (dict.rows() != y.size()) {
    throw Error(ErrorKind::invalid_argument, "OMP: dictionary has " +
                                                 std::to_string(dict.rows()) + " rows, signal " +
                                                 std::to_string(y.size()));
  }
  const Eigen::Index n_atoms = dict.cols();
  const Eigen::VectorXd norms = dict.colwise().norm().transpose();
  const double max_norm = n_atoms > 0 ? norms.maxCoeff() : 0.0;
  if (!(max_norm > 0.0)) throw Error(ErrorKind::invalid_argument, "OMP: all-zero dictionary");
  const double zero_column = 1e-14 * max_norm;

  SparseCode code;
  code.alpha = Eigen::VectorXd::Zero(n_atoms);
  Eigen::VectorXd residual = y;
  double residual_norm = residual.norm();
  std::vector<char> used(n_atoms, 0);
  Eigen::VectorXd coefficients;
  const Eigen::Index budget = std::min<Eigen::Index>(sparsity, std::min(n_atoms, y.size()));

  while (static_cast<Eigen::Index>(code.support.size()) < budget && residual_norm > eps) {
    const Eigen::VectorXd correlation = dict.transpose() * residual;
    int best = -1;
    double best_score = 0.0;
    for (Eigen::Index j = 0; j < n_atoms; ++j) {
      if (used[j] || norms(j) <= zero_column) continue;
      const double score = std::abs(correlation(j)) / norms(j);
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(j);
      }
    }
    // Residual (numerically) orthogonal to every remaining atom.
    if (best < 0 || best_score <= 1e-13 * residual_norm) break;
    used[best] = 1;
    code.support.push_back(best);

    Eigen::MatrixXd sub(dict.rows(), static_cast<Eigen::Index>(code.support.size()));
    for (std::size_t k = 0; k < code.support.size(); ++k) {
      sub.col(static_cast<Eigen::Index>(k)) = dict.col(code.support[k]);
    }
    coefficients = sub.colPivHouseholderQr().solve(y);
    residual = y - sub * coefficients;
    residual_norm = residual.norm();
  }
  for (std::size_t k = 0; k < code.support.size(); ++k) {
    code.alpha(code.support[k]) = coefficients(static_cast<Eigen::Index>(k));
  }
  code.residual_norm = residual_norm;
  return code;
}

SparseCode masked_orthogonal_matching_pursuit(const Eigen::VectorXd& y,
                                              const Eigen::MatrixXd& dict,
                                              std::span<const char> known_rows, int sparsity,
                                              double eps) {
  if (static_cast<Eigen::Index>(known_rows.size()) != y.size() || dict.rows() != y.size()) {
    throw Error(ErrorKind::invalid_argument, "masked OMP: mask/signal/dictionary size mismatch");
  }
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < known_rows.size(); ++i) {
    if (known_rows[i]) rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (rows.empty()) throw Error(ErrorKind::invalid_argument, "masked OMP: no known rows");
  const int budget = std::min(sparsity, static_cast<int>(rows.size()));
  Eigen::VectorXd y_known(static_cast<Eigen::Index>(rows.size()));
  Eigen::MatrixXd d_known(static_cast<Eigen::Index>(rows.size()), dict.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    y_known(static_cast<Eigen::Index>(k)) = y(rows[k]);
    d_known.row(static_cast<Eigen::Index>(k)) = dict.row(rows[k]);
  }
  return orthogonal_matching_pursuit(y_known, d_known, budget, eps);
}

}  // namespace dlinpaint
