#include "dlinpaint/inpaint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "dlinpaint/basis.hpp"
#include "dlinpaint/error.hpp"
#include "dlinpaint/frames.hpp"
#include "dlinpaint/kernels.hpp"
#include "dlinpaint/pursuit.hpp"

namespace dlinpaint {

namespace {

struct PatchGeometry {
  Frame frame;
  HeightMapSignal signal;
  Eigen::MatrixXd atoms;  // Phi_x A
};

PatchGeometry prepare(const Mesh& mesh, std::span<const Vec3> normals, const Dictionary& dict,
                      const Patch& patch) {
  PatchGeometry g;
  g.frame = build_frame(mesh, normals, patch);
  g.signal = to_height_map(mesh, patch, g.frame);
  g.atoms = dict.sampled(sample_basis(dict.basis, g.signal));
  return g;
}

void check_mask(const Mesh& mesh, const KnownVertexMask& mask) {
  if (mask.size() != mesh.num_vertices()) {
    throw Error(ErrorKind::invalid_argument,
                "mask has " + std::to_string(mask.size()) + " entries for " +
                    std::to_string(mesh.num_vertices()) + " vertices");
  }
}

PatchEstimate code_patch(const Mesh& mesh, std::span<const Vec3> normals, const Dictionary& dict,
                         const Patch& patch, int index, const KnownVertexMask& mask,
                         const InpaintOptions& options) {
  const PatchGeometry g = prepare(mesh, normals, dict, patch);
  const int n = g.signal.size();
  std::vector<char> known(n);
  double sum_sq = 0.0;
  int known_rows = 0;
  for (int i = 0; i < n; ++i) {
    known[i] = mask.known[g.signal.vertex_ids[i]];
    if (known[i]) {
      sum_sq += g.signal.z(i) * g.signal.z(i);
      ++known_rows;
    }
  }
  const double eps = options.eps_factor * std::sqrt(sum_sq / known_rows);
  const SparseCode code =
      known_rows == n
          ? orthogonal_matching_pursuit(g.signal.z, g.atoms, options.sparsity, eps)
          : masked_orthogonal_matching_pursuit(g.signal.z, g.atoms, known, options.sparsity, eps);
  PatchEstimate est;
  est.patch = index;
  est.code = code.alpha;
  est.positions = from_height_map(g.signal, g.atoms * code.alpha, g.frame);
  est.known_rows = known_rows;
  est.residual = code.residual_norm;
  return est;
}

}  // namespace

KnownVertexMask KnownVertexMask::all(int vertex_count) {
  return KnownVertexMask{std::vector<char>(vertex_count, 1)};
}

KnownVertexMask KnownVertexMask::first(int vertex_count, int known_count) {
  KnownVertexMask m{std::vector<char>(vertex_count, 0)};
  std::fill(m.known.begin(), m.known.begin() + std::clamp(known_count, 0, vertex_count), 1);
  return m;
}

int KnownVertexMask::known_count() const {
  return static_cast<int>(std::count(known.begin(), known.end(), 1));
}

std::vector<PatchEstimate> direct_inpaint(const Mesh& mesh, const Dictionary& dict,
                                          std::span<const Patch> patches,
                                          std::span<const int> selected,
                                          const KnownVertexMask& mask,
                                          const InpaintOptions& options) {
  check_mask(mesh, mask);
  for (int p : selected) {
    const auto& vs = patches[p].vertices;
    if (std::none_of(vs.begin(), vs.end(), [&](int v) { return mask.is_known(v); })) {
      throw Error(ErrorKind::infeasible,
                  "patch at seed " + std::to_string(patches[p].seed) +
                      " has no known vertex; direct inpainting cannot code it, use adaptive mode");
    }
  }
  const std::vector<Vec3> normals = vertex_normals(mesh);
  std::vector<PatchEstimate> out(selected.size());
  kernels::for_each_index(static_cast<long>(selected.size()), options.execution, [&](long k) {
    out[k] = code_patch(mesh, normals, dict, patches[selected[k]], selected[k], mask, options);
  });
  return out;
}

std::vector<int> hole_patches(std::span<const Patch> patches, const KnownVertexMask& mask) {
  std::vector<int> out;
  for (int p = 0; p < static_cast<int>(patches.size()); ++p) {
    const auto& vs = patches[p].vertices;
    if (std::any_of(vs.begin(), vs.end(), [&](int v) { return !mask.is_known(v); })) {
      out.push_back(p);
    }
  }
  return out;
}

GrowRegions build_grow_regions(std::span<const Patch> patches, const KnownVertexMask& mask,
                               std::span<const int> border) {
  const std::vector<int> holes = hole_patches(patches, mask);
  GrowRegions regions;
  if (holes.empty()) return regions;
  std::vector<char> is_border(mask.size(), 0);
  for (int v : border) is_border[v] = 1;
  std::vector<char> assigned(patches.size(), 0);
  std::vector<int> level;
  for (int p : holes) {
    const auto& vs = patches[p].vertices;
    if (std::any_of(vs.begin(), vs.end(), [&](int v) { return is_border[v] != 0; })) {
      level.push_back(p);
      assigned[p] = 1;
    }
  }
  std::size_t placed = level.size();
  std::vector<char> reached(mask.size(), 0);
  while (!level.empty()) {
    std::fill(reached.begin(), reached.end(), 0);
    for (int p : level) {
      for (int v : patches[p].vertices) reached[v] = 1;
    }
    regions.levels.push_back(std::move(level));
    level.clear();
    for (int p : holes) {
      if (!assigned[p] && reached[patches[p].seed]) {
        level.push_back(p);
        assigned[p] = 1;
      }
    }
    placed += level.size();
  }
  if (placed != holes.size()) {
    throw Error(ErrorKind::infeasible,
                std::to_string(holes.size() - placed) +
                    " hole patch(es) cannot be reached from the hole border by growing regions");
  }
  return regions;
}

int overlap_count(const Patch& p, const Patch& q) {
  int count = 0;
  auto a = p.vertices.begin();
  auto b = q.vertices.begin();
  while (a != p.vertices.end() && b != q.vertices.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

std::vector<std::pair<int, double>> propagation_weights(const Patch& target,
                                                        std::span<const Patch> patches,
                                                        std::span<const int> candidates) {
  std::vector<std::pair<int, double>> out;
  double total = 0.0;
  for (int q : candidates) {
    const int c = overlap_count(target, patches[q]);
    if (c > 0) {
      out.emplace_back(q, static_cast<double>(c));
      total += c;
    }
  }
  for (auto& [q, w] : out) w /= total;
  return out;
}

AdaptiveResult adaptive_inpaint(const Mesh& mesh, const Dictionary& dict,
                                std::span<const Patch> patches, const KnownVertexMask& mask,
                                const GrowRegions& regions, const InpaintOptions& options) {
  check_mask(mesh, mask);
  const int nv = mesh.num_vertices();
  AdaptiveResult result;
  result.geometry = mesh.positions();
  std::vector<Eigen::VectorXd> codes(patches.size());
  std::vector<int> lower;
  std::vector<Vec3> sum(nv, Vec3::Zero());
  std::vector<int> count(nv, 0);

  for (int li = 0; li < regions.count(); ++li) {
    const std::vector<int>& level = regions.levels[li];
    const Mesh current = mesh.with_positions(result.geometry);
    std::vector<PatchEstimate> ests;
    if (li == 0) {
      ests = direct_inpaint(current, dict, patches, level, mask, options);
    } else {
      const std::vector<Vec3> normals = vertex_normals(current);
      ests.resize(level.size());
      kernels::for_each_index(static_cast<long>(level.size()), options.execution, [&](long k) {
        const int p = level[k];
        const auto weights = propagation_weights(patches[p], patches, lower);
        if (weights.empty()) {
          throw Error(ErrorKind::infeasible,
                      "patch at seed " + std::to_string(patches[p].seed) +
                          " overlaps no coded patch of a lower level");
        }
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(dict.atom_count());
        for (const auto& [q, w] : weights) alpha += w * codes[q];
        const PatchGeometry g = prepare(current, normals, dict, patches[p]);
        Eigen::VectorXd z = g.atoms * alpha;
        if (options.reproject) {
          const double rms = std::sqrt(z.squaredNorm() / static_cast<double>(z.size()));
          alpha = orthogonal_matching_pursuit(z, g.atoms, options.sparsity,
                                              options.eps_factor * rms)
                      .alpha;
          z = g.atoms * alpha;
        }
        PatchEstimate& est = ests[k];
        est.patch = p;
        est.code = std::move(alpha);
        est.positions = from_height_map(g.signal, z, g.frame);
      });
    }
    for (const PatchEstimate& est : ests) {
      codes[est.patch] = est.code;
      const auto& vs = patches[est.patch].vertices;
      for (std::size_t j = 0; j < vs.size(); ++j) {
        if (mask.is_known(vs[j])) continue;
        sum[vs[j]] += est.positions[j];
        ++count[vs[j]];
      }
    }
    for (int p : level) lower.push_back(p);
    for (int v = 0; v < nv; ++v) {
      if (count[v] > 0) result.geometry[v] = sum[v] / count[v];
    }
    for (auto& est : ests) result.estimates.push_back(std::move(est));
  }
  return result;
}

void VertexEstimates::add(const Patch& patch, const PatchEstimate& estimate) {
  codes[estimate.patch] = estimate.code;
  for (std::size_t j = 0; j < patch.vertices.size(); ++j) {
    per_vertex[patch.vertices[j]].push_back({estimate.patch, estimate.positions[j]});
  }
}

std::vector<double> nlm_weights(const Eigen::VectorXd& alpha_v,
                                std::span<const Eigen::VectorXd* const> codes, double h,
                                bool squared_norm) {
  if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "NLM parameter h must be > 0");
  std::vector<double> d(codes.size());
  double d_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < codes.size(); ++k) {
    const double dist = (alpha_v - *codes[k]).norm();
    d[k] = squared_norm ? dist * dist : dist;
    d_min = std::min(d_min, d[k]);
  }
  // Shifting by the smallest distance cancels in the normalization and keeps
  // the largest weight at exp(0).
  double z = 0.0;
  for (double& x : d) {
    x = std::exp(-(x - d_min) / (h * h));
    z += x;
  }
  for (double& x : d) x /= z;
  return d;
}

std::vector<Vec3> reconstruct(const VertexEstimates& estimates,
                              std::span<const int> reference_patch,
                              std::span<const Vec3> current, std::span<const int> targets,
                              const ReconstructOptions& options) {
  if (options.mode == WeightMode::nlm && !(options.h > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "NLM parameter h must be > 0");
  }
  std::vector<Vec3> out(current.begin(), current.end());
  kernels::for_each_index(static_cast<long>(targets.size()), options.execution, [&](long t) {
    const int v = targets[t];
    const auto& list = estimates.per_vertex[v];
    if (list.empty()) {
      throw Error(ErrorKind::infeasible,
                  "vertex " + std::to_string(v) + " is covered by no coded patch");
    }
    Vec3 g = Vec3::Zero();
    if (options.mode == WeightMode::uniform || list.size() == 1) {
      for (const VertexEstimate& e : list) g += e.position;
      g /= static_cast<double>(list.size());
    } else {
      const int ref = reference_patch[v];
      if (ref < 0 || estimates.codes[ref].size() == 0) {
        throw Error(ErrorKind::infeasible,
                    "vertex " + std::to_string(v) + " has no reference code for NLM weights");
      }
      std::vector<const Eigen::VectorXd*> codes(list.size());
      for (std::size_t k = 0; k < list.size(); ++k) codes[k] = &estimates.codes[list[k].patch];
      const std::vector<double> w =
          nlm_weights(estimates.codes[ref], codes, options.h, options.squared_norm);
      for (std::size_t k = 0; k < list.size(); ++k) g += w[k] * list[k].position;
    }
    out[v] = g;
  });
  return out;
}

double default_h(std::span<const Patch> patches, std::span<const Eigen::VectorXd> codes,
                 int vertex_count) {
  std::vector<std::vector<int>> containing(vertex_count);
  for (int p = 0; p < static_cast<int>(patches.size()); ++p) {
    if (codes[p].size() == 0) continue;
    for (int v : patches[p].vertices) containing[v].push_back(p);
  }
  std::set<std::pair<int, int>> pairs;
  for (const auto& list : containing) {
    for (std::size_t a = 0; a < list.size(); ++a) {
      for (std::size_t b = a + 1; b < list.size(); ++b) pairs.emplace(list[a], list[b]);
    }
  }
  if (pairs.empty()) return 1.0;
  std::vector<double> d;
  d.reserve(pairs.size());
  for (const auto& [p, q] : pairs) d.push_back((codes[p] - codes[q]).norm());
  std::sort(d.begin(), d.end());
  const std::size_t n = d.size();
  const double median = n % 2 == 1 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
  return median > 0.0 ? 0.5 * median : 1.0;
}

}  // namespace dlinpaint
