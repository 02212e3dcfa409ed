#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dlinpaint/execution.hpp"
#include "dlinpaint/mesh.hpp"
#include "dlinpaint/pursuit.hpp"
#include "dlinpaint/sampling.hpp"

// Hot loops in two flavours: a plain serial reference and an OpenMP version.
// Each pair is required to produce identical output for identical input.
namespace dlinpaint::kernels {

/// Bounded Dijkstra from every seed; no size validation.
std::vector<Patch> geodesic_balls_serial(const Mesh& mesh, std::span<const int> seeds,
                                         double radius);
std::vector<Patch> geodesic_balls_parallel(const Mesh& mesh, std::span<const int> seeds,
                                           double radius);

/// Sparse-codes `signal` against phi * coefficients. An empty `known` means
/// every row is observed; otherwise masked OMP on the flagged rows.
struct CodingJob {
  const Eigen::MatrixXd* phi = nullptr;
  const Eigen::MatrixXd* coefficients = nullptr;
  const Eigen::VectorXd* signal = nullptr;
  std::span<const char> known;
  int sparsity = 1;
  double eps = 0.0;
};

std::vector<SparseCode> sparse_code_serial(std::span<const CodingJob> jobs);
std::vector<SparseCode> sparse_code_parallel(std::span<const CodingJob> jobs);

/// fn(i) for every i in [0, n). The parallel flavour rethrows the exception
/// of the lowest failing index, matching the serial one.
void for_each_index(long n, Execution exec, const std::function<void(long)>& fn);

inline std::vector<SparseCode> sparse_code(std::span<const CodingJob> jobs, Execution exec) {
  return exec == Execution::serial ? sparse_code_serial(jobs) : sparse_code_parallel(jobs);
}

}  // namespace dlinpaint::kernels
