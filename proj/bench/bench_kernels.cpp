#include <benchmark/benchmark.h>

#include <numeric>
#include <random>
#include <vector>

#include "dlinpaint/kernels.hpp"
#include "dlinpaint/primitives.hpp"

using namespace dlinpaint;

namespace {

const Mesh& sphere() {
  static const Mesh m = add_normal_noise(make_icosphere(5), 0.005, 1);
  return m;
}

std::vector<int> all_vertices(const Mesh& m) {
  std::vector<int> seeds(m.num_vertices());
  std::iota(seeds.begin(), seeds.end(), 0);
  return seeds;
}

template <auto Kernel>
void BM_balls(benchmark::State& state) {
  const Mesh& m = sphere();
  const std::vector<int> seeds = all_vertices(m);
  const double r = static_cast<double>(state.range(0)) * m.mean_edge_length();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m, seeds, r));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(seeds.size()));
}

struct CodingSet {
  Eigen::MatrixXd coefficients;
  std::vector<Eigen::MatrixXd> phis;
  std::vector<Eigen::VectorXd> signals;
  std::vector<std::vector<char>> masks;
  std::vector<kernels::CodingJob> jobs;
};

const CodingSet& coding_set() {
  static const CodingSet set = [] {
    CodingSet s;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    s.coefficients.resize(16, 64);
    for (int i = 0; i < s.coefficients.size(); ++i) s.coefficients(i) = g(rng);
    const int count = 4000;
    for (int p = 0; p < count; ++p) {
      const int n = 20 + static_cast<int>(rng() % 40);
      Eigen::MatrixXd phi(n, 16);
      for (int i = 0; i < phi.size(); ++i) phi(i) = g(rng);
      Eigen::VectorXd y(n);
      for (int i = 0; i < n; ++i) y(i) = g(rng);
      std::vector<char> mask;
      if (p % 2 == 1) {
        mask.resize(n);
        for (auto& c : mask) c = rng() % 4 != 0;
      }
      s.phis.push_back(std::move(phi));
      s.signals.push_back(std::move(y));
      s.masks.push_back(std::move(mask));
    }
    for (int p = 0; p < count; ++p) {
      kernels::CodingJob job;
      job.phi = &s.phis[p];
      job.coefficients = &s.coefficients;
      job.signal = &s.signals[p];
      job.known = s.masks[p];
      job.sparsity = 4;
      job.eps = 1e-6;
      s.jobs.push_back(job);
    }
    return s;
  }();
  return set;
}

template <auto Kernel>
void BM_coding(benchmark::State& state) {
  const CodingSet& set = coding_set();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(set.jobs));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(set.jobs.size()));
}

}  // namespace

BENCHMARK(BM_balls<kernels::geodesic_balls_serial>)->Name("geodesic_balls/serial")->Arg(2)->Arg(4)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_balls<kernels::geodesic_balls_parallel>)->Name("geodesic_balls/parallel")->Arg(2)->Arg(4)
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_coding<kernels::sparse_code_serial>)->Name("sparse_code/serial")
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_coding<kernels::sparse_code_parallel>)->Name("sparse_code/parallel")
    ->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
