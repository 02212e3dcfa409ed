#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dlinpaint/dictionary.hpp"
#include "dlinpaint/execution.hpp"
#include "dlinpaint/pursuit.hpp"

namespace dlinpaint {

/// One training signal: patch heights and the basis sampled at its uv's.
struct TrainingPatch {
  Eigen::VectorXd z;
  Eigen::MatrixXd phi;
};

struct KsvdOptions {
  int atoms = 64;
  int sparsity = 4;
  double eps_factor = 1e-4;  // OMP stops at |r| <= eps_factor * rms(z)
  int iterations = 20;
  int als_sweeps = 3;  // inner alternating least-squares rounds per atom
  std::uint64_t seed = 1;
  Execution execution = Execution::parallel;
};

struct KsvdResult {
  Dictionary dictionary;
  std::vector<SparseCode> codes;
  /// Mean over patches of |z_p - Phi_p A alpha_p|^2, one entry per iteration.
  std::vector<double> residual_history;
  int reinitialized_atoms = 0;
};

/// A signal whose heights are all within 1e-9 * radius of zero.
bool is_degenerate(const TrainingPatch& patch, double radius);

/// Residual tolerance for one signal: eps_factor * rms(z).
double coding_tolerance(const Eigen::VectorXd& z, double eps_factor);

/// Columns of A are the normalized least-squares basis coefficients of
/// `atoms` distinct non-degenerate signals drawn with a seeded shuffle.
/// Throws infeasible when fewer than `atoms` non-degenerate signals exist.
Dictionary init_dictionary(std::span<const TrainingPatch> signals, const BasisSet& basis,
                           int atoms, std::uint64_t seed);

/// Continuous K-SVD.
///
/// Each iteration sparse-codes every signal against Phi_p A (a new code
/// replaces the previous one only if it does not increase that signal's
/// residual) and then updates the atoms one at a time. Because every patch
/// has its own Phi_p the rank-1 SVD step is replaced by alternating least
/// squares over (a_i, coefficient row) restricted to the signals using atom
/// i; the update is kept only if it does not increase their residual. Atoms
/// used by no signal are re-seeded from the worst-represented signal. The
/// logged mean residual is therefore non-increasing.
KsvdResult ksvd_train(std::span<const TrainingPatch> signals, const BasisSet& basis,
                      const KsvdOptions& options);
KsvdResult ksvd_train(std::span<const TrainingPatch> signals, Dictionary initial,
                      const KsvdOptions& options);

}  // namespace dlinpaint
