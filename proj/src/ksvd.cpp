#include "dlinpaint/ksvd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/QR>

#include "dlinpaint/error.hpp"
#include "dlinpaint/kernels.hpp"

namespace dlinpaint {

namespace {

// Fisher-Yates with an explicit modulo draw so the permutation does not
// depend on the standard library's distribution implementation.
std::vector<int> seeded_permutation(int n, std::uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  return order;
}

Eigen::VectorXd least_squares_coefficients(const TrainingPatch& patch) {
  return patch.phi.completeOrthogonalDecomposition().solve(patch.z);
}

void validate(std::span<const TrainingPatch> signals, int basis_size) {
  if (signals.empty()) throw Error(ErrorKind::invalid_argument, "K-SVD: no training signals");
  for (std::size_t p = 0; p < signals.size(); ++p) {
    const TrainingPatch& s = signals[p];
    if (s.z.size() == 0 || s.phi.rows() != s.z.size() || s.phi.cols() != basis_size) {
      throw Error(ErrorKind::invalid_argument,
                  "K-SVD: training signal " + std::to_string(p) + " has inconsistent sizes");
    }
  }
}

void rebuild_support(SparseCode& code) {
  code.support.clear();
  for (Eigen::Index j = 0; j < code.alpha.size(); ++j) {
    if (code.alpha(j) != 0.0) code.support.push_back(static_cast<int>(j));
  }
}

}  // namespace

bool is_degenerate(const TrainingPatch& patch, double radius) {
  return patch.z.size() == 0 || patch.z.cwiseAbs().maxCoeff() <= 1e-9 * radius;
}

double coding_tolerance(const Eigen::VectorXd& z, double eps_factor) {
  if (z.size() == 0) return 0.0;
  return eps_factor * std::sqrt(z.squaredNorm() / static_cast<double>(z.size()));
}

Dictionary init_dictionary(std::span<const TrainingPatch> signals, const BasisSet& basis,
                           int atoms, std::uint64_t seed) {
  validate(signals, basis.size());
  if (atoms < 1) throw Error(ErrorKind::invalid_argument, "atom count must be >= 1");
  if (static_cast<int>(signals.size()) < atoms) {
    throw Error(ErrorKind::invalid_argument,
                "dictionary init: " + std::to_string(signals.size()) +
                    " signals for " + std::to_string(atoms) + " atoms");
  }
  std::vector<int> candidates;
  for (int p = 0; p < static_cast<int>(signals.size()); ++p) {
    if (!is_degenerate(signals[p], basis.domain_radius())) candidates.push_back(p);
  }
  if (static_cast<int>(candidates.size()) < atoms) {
    throw Error(ErrorKind::infeasible,
                "dictionary init: only " + std::to_string(candidates.size()) +
                    " non-degenerate (non-flat) training signals for " + std::to_string(atoms) +
                    " atoms");
  }
  const std::vector<int> order = seeded_permutation(static_cast<int>(candidates.size()), seed);
  Dictionary dict;
  dict.basis = basis;
  dict.coefficients.resize(basis.size(), atoms);
  for (int i = 0; i < atoms; ++i) {
    Eigen::VectorXd a = least_squares_coefficients(signals[candidates[order[i]]]);
    const double norm = a.norm();
    if (!(norm > 0.0)) {
      throw Error(ErrorKind::infeasible,
                  "dictionary init: degenerate signal produced a zero atom");
    }
    dict.coefficients.col(i) = a / norm;
  }
  return dict;
}

KsvdResult ksvd_train(std::span<const TrainingPatch> signals, const BasisSet& basis,
                      const KsvdOptions& options) {
  return ksvd_train(signals, init_dictionary(signals, basis, options.atoms, options.seed),
                    options);
}

KsvdResult ksvd_train(std::span<const TrainingPatch> signals, Dictionary initial,
                      const KsvdOptions& options) {
  validate(signals, initial.basis.size());
  if (options.iterations < 1) throw Error(ErrorKind::invalid_argument, "K-SVD iterations must be >= 1");
  if (options.sparsity < 1) throw Error(ErrorKind::invalid_argument, "sparsity must be >= 1");
  const double radius = initial.basis.domain_radius();
  if (std::all_of(signals.begin(), signals.end(),
                  [radius](const TrainingPatch& s) { return is_degenerate(s, radius); })) {
    throw Error(ErrorKind::infeasible, "K-SVD: all training signals are degenerate (flat)");
  }

  const int n = static_cast<int>(signals.size());
  const int atoms = initial.atom_count();
  KsvdResult result;
  result.dictionary = std::move(initial);
  Eigen::MatrixXd& A = result.dictionary.coefficients;

  // Gram matrices Phi_p^T Phi_p do not change during training.
  std::vector<Eigen::MatrixXd> gram(n);
  std::vector<double> eps(n);
  for (int p = 0; p < n; ++p) {
    gram[p] = signals[p].phi.transpose() * signals[p].phi;
    eps[p] = coding_tolerance(signals[p].z, options.eps_factor);
  }

  std::vector<SparseCode> codes(n);
  std::vector<Eigen::VectorXd> residual(n);
  std::vector<double> residual_sq(n);
  bool have_codes = false;

  std::vector<kernels::CodingJob> jobs(n);
  for (int p = 0; p < n; ++p) {
    jobs[p].phi = &signals[p].phi;
    jobs[p].coefficients = &A;
    jobs[p].signal = &signals[p].z;
    jobs[p].sparsity = options.sparsity;
    jobs[p].eps = eps[p];
  }

  for (int iter = 0; iter < options.iterations; ++iter) {
    // (a) Sparse coding.
    std::vector<SparseCode> fresh = kernels::sparse_code(jobs, options.execution);
    for (int p = 0; p < n; ++p) {
      const double fresh_sq = fresh[p].residual_norm * fresh[p].residual_norm;
      if (!have_codes || fresh_sq <= residual_sq[p]) {
        codes[p] = std::move(fresh[p]);
        residual[p] = signals[p].z - signals[p].phi * (A * codes[p].alpha);
        residual_sq[p] = residual[p].squaredNorm();
      }
    }
    have_codes = true;

    // (b) Atom-by-atom update.
    std::vector<char> reseeded_from(n, 0);
    for (int i = 0; i < atoms; ++i) {
      std::vector<int> users;
      for (int p = 0; p < n; ++p) {
        if (codes[p].alpha(i) != 0.0) users.push_back(p);
      }
      if (users.empty()) {
        int worst = -1;
        for (int p = 0; p < n; ++p) {
          if (reseeded_from[p] || is_degenerate(signals[p], radius)) continue;
          if (worst < 0 || residual_sq[p] > residual_sq[worst]) worst = p;
        }
        if (worst < 0) continue;
        reseeded_from[worst] = 1;
        Eigen::VectorXd a = least_squares_coefficients(signals[worst]);
        if (a.norm() > 0.0) {
          A.col(i) = a.normalized();
          ++result.reinitialized_atoms;
        }
        continue;
      }

      // Residual with atom i's contribution added back: E_p = r_p + Phi_p a_i g_p.
      const Eigen::VectorXd a_old = A.col(i);
      std::vector<Eigen::VectorXd> target(users.size());
      std::vector<double> g(users.size());
      double before = 0.0;
      for (std::size_t k = 0; k < users.size(); ++k) {
        const int p = users[k];
        g[k] = codes[p].alpha(i);
        target[k] = residual[p] + signals[p].phi * (a_old * g[k]);
        before += residual_sq[p];
      }

      Eigen::VectorXd a = a_old;
      bool solved = true;
      for (int sweep = 0; sweep < options.als_sweeps; ++sweep) {
        Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(A.rows(), A.rows());
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(A.rows());
        for (std::size_t k = 0; k < users.size(); ++k) {
          const int p = users[k];
          normal += (g[k] * g[k]) * gram[p];
          rhs += g[k] * (signals[p].phi.transpose() * target[k]);
        }
        Eigen::VectorXd a_new = normal.completeOrthogonalDecomposition().solve(rhs);
        const double norm = a_new.norm();
        if (!(norm > 0.0) || !a_new.allFinite()) {
          solved = false;
          break;
        }
        a = a_new / norm;
        for (std::size_t k = 0; k < users.size(); ++k) {
          const Eigen::VectorXd atom = signals[users[k]].phi * a;
          const double denom = atom.squaredNorm();
          g[k] = denom > 0.0 ? atom.dot(target[k]) / denom : 0.0;
        }
      }
      if (!solved) continue;

      std::vector<Eigen::VectorXd> updated(users.size());
      double after = 0.0;
      for (std::size_t k = 0; k < users.size(); ++k) {
        updated[k] = target[k] - signals[users[k]].phi * (a * g[k]);
        after += updated[k].squaredNorm();
      }
      if (!(after <= before)) continue;
      A.col(i) = a;
      for (std::size_t k = 0; k < users.size(); ++k) {
        const int p = users[k];
        codes[p].alpha(i) = g[k];
        residual[p] = std::move(updated[k]);
        residual_sq[p] = residual[p].squaredNorm();
      }
    }

    for (int p = 0; p < n; ++p) {
      rebuild_support(codes[p]);
      codes[p].residual_norm = std::sqrt(residual_sq[p]);
    }
    result.residual_history.push_back(
        std::accumulate(residual_sq.begin(), residual_sq.end(), 0.0) / n);
  }
  result.codes = std::move(codes);
  return result;
}

}  // namespace dlinpaint
