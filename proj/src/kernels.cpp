#include "dlinpaint/kernels.hpp"

#include <algorithm>
#include <exception>
#include <functional>
#include <queue>
#include <utility>

#include <omp.h>

namespace dlinpaint {

void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

namespace kernels {

namespace {

// Reusable distance buffer; only touched entries are reset between balls.
class BallWorkspace {
 public:
  explicit BallWorkspace(int n) : dist_(n, kUnreachable) {}

  Patch grow(const Mesh& mesh, int seed, double radius) {
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    Patch patch;
    patch.seed = seed;
    patch.radius = radius;
    dist_[seed] = 0.0;
    touched_.push_back(seed);
    queue.emplace(0.0, seed);
    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (d > dist_[v]) continue;
      patch.vertices.push_back(v);
      for (int u : mesh.neighbors(v)) {
        const double nd = d + (mesh.position(u) - mesh.position(v)).norm();
        if (nd <= radius && nd < dist_[u]) {
          if (dist_[u] == kUnreachable) touched_.push_back(u);
          dist_[u] = nd;
          queue.emplace(nd, u);
        }
      }
    }
    for (int v : touched_) dist_[v] = kUnreachable;
    touched_.clear();
    std::sort(patch.vertices.begin(), patch.vertices.end());
    return patch;
  }

 private:
  std::vector<double> dist_;
  std::vector<int> touched_;
};

SparseCode code_one(const CodingJob& job) {
  const Eigen::MatrixXd dict = (*job.phi) * (*job.coefficients);
  if (job.known.empty()) {
    return orthogonal_matching_pursuit(*job.signal, dict, job.sparsity, job.eps);
  }
  return masked_orthogonal_matching_pursuit(*job.signal, dict, job.known, job.sparsity, job.eps);
}

}  // namespace

std::vector<Patch> geodesic_balls_serial(const Mesh& mesh, std::span<const int> seeds,
                                         double radius) {
  std::vector<Patch> out(seeds.size());
  BallWorkspace ws(mesh.num_vertices());
  for (std::size_t i = 0; i < seeds.size(); ++i) out[i] = ws.grow(mesh, seeds[i], radius);
  return out;
}

std::vector<Patch> geodesic_balls_parallel(const Mesh& mesh, std::span<const int> seeds,
                                           double radius) {
  std::vector<Patch> out(seeds.size());
  const auto count = static_cast<long>(seeds.size());
#pragma omp parallel
  {
    BallWorkspace ws(mesh.num_vertices());
#pragma omp for schedule(dynamic, 16)
    for (long i = 0; i < count; ++i) out[i] = ws.grow(mesh, seeds[i], radius);
  }
  return out;
}

std::vector<SparseCode> sparse_code_serial(std::span<const CodingJob> jobs) {
  std::vector<SparseCode> out(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = code_one(jobs[i]);
  return out;
}

std::vector<SparseCode> sparse_code_parallel(std::span<const CodingJob> jobs) {
  std::vector<SparseCode> out(jobs.size());
  const auto count = static_cast<long>(jobs.size());
  // Exceptions must not escape an OpenMP region; keep the first one (by job
  // index) and rethrow after the loop so the error matches the serial path.
  std::vector<std::exception_ptr> errors(jobs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long i = 0; i < count; ++i) {
    try {
      out[i] = code_one(jobs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void for_each_index(long n, Execution exec, const std::function<void(long)>& fn) {
  if (exec == Execution::serial) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(n, 0L)));
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace kernels
}  // namespace dlinpaint
