#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dlinpaint/dictionary.hpp"
#include "dlinpaint/execution.hpp"
#include "dlinpaint/mesh.hpp"
#include "dlinpaint/sampling.hpp"

namespace dlinpaint {

/// Known (observed) vertices of the extended mesh. Hole filling appends new
/// vertices after the original ones, so the usual mask is "index < n".
struct KnownVertexMask {
  std::vector<char> known;

  static KnownVertexMask all(int vertex_count);
  static KnownVertexMask first(int vertex_count, int known_count);
  int size() const { return static_cast<int>(known.size()); }
  int known_count() const;
  bool is_known(int v) const { return known[v] != 0; }
};

struct InpaintOptions {
  int sparsity = 4;
  double eps_factor = 1e-4;  // |r| <= eps_factor * rms(known heights)
  bool reproject = false;    // re-run OMP on propagated codes (adaptive)
  Execution execution = Execution::parallel;
};

/// Result of coding one patch: its code and the estimate G_p(v) for every
/// patch vertex, aligned with Patch::vertices.
struct PatchEstimate {
  int patch = -1;
  Eigen::VectorXd code;
  std::vector<Vec3> positions;
  int known_rows = 0;
  double residual = 0.0;  // on the known rows; 0 for propagated codes
};

/// Masked OMP on each selected patch over the current geometry. Throws
/// infeasible when a selected patch has no known vertex.
std::vector<PatchEstimate> direct_inpaint(const Mesh& mesh, const Dictionary& dict,
                                          std::span<const Patch> patches,
                                          std::span<const int> selected,
                                          const KnownVertexMask& mask,
                                          const InpaintOptions& options = {});

/// Levels R_0 .. R_{r-1} of hole-patch indices.
struct GrowRegions {
  std::vector<std::vector<int>> levels;

  int count() const { return static_cast<int>(levels.size()); }
};

/// Patches holding at least one unknown vertex.
std::vector<int> hole_patches(std::span<const Patch> patches, const KnownVertexMask& mask);

/// R_0: hole patches containing a border vertex. R_i: still unassigned hole
/// patches whose seed is a vertex of some patch in R_{i-1}. Throws
/// infeasible when hole patches remain that no level reaches.
GrowRegions build_grow_regions(std::span<const Patch> patches, const KnownVertexMask& mask,
                               std::span<const int> border);

/// |V_p n V_q| for sorted vertex lists.
int overlap_count(const Patch& p, const Patch& q);

/// (patch index, weight) for every candidate overlapping `target`, weights
/// |V_p n V_q| / W_p.
std::vector<std::pair<int, double>> propagation_weights(const Patch& target,
                                                        std::span<const Patch> patches,
                                                        std::span<const int> candidates);

struct AdaptiveResult {
  std::vector<PatchEstimate> estimates;  // level order
  std::vector<Vec3> geometry;            // unknown vertices after the last level
};

/// Level 0 is coded with masked OMP; each later patch gets the weighted
/// average of the codes of overlapping lower-level patches. After every
/// level the unknown vertices move to the mean of their estimates so far,
/// and later levels build their frames on that geometry.
/// Throws infeasible when a propagated patch has no coded neighbour.
AdaptiveResult adaptive_inpaint(const Mesh& mesh, const Dictionary& dict,
                                std::span<const Patch> patches, const KnownVertexMask& mask,
                                const GrowRegions& regions, const InpaintOptions& options = {});

struct VertexEstimate {
  int patch = -1;
  Vec3 position = Vec3::Zero();
};

/// Per-vertex lists of patch estimates plus the per-patch codes (empty for
/// patches without a code).
struct VertexEstimates {
  std::vector<std::vector<VertexEstimate>> per_vertex;
  std::vector<Eigen::VectorXd> codes;

  VertexEstimates(int vertex_count, int patch_count)
      : per_vertex(vertex_count), codes(patch_count) {}
  void add(const Patch& patch, const PatchEstimate& estimate);
};

enum class WeightMode { uniform, nlm };

struct ReconstructOptions {
  WeightMode mode = WeightMode::nlm;
  double h = 1.0;
  bool squared_norm = false;  // exp(-|a - b|^2 / h^2) instead of exp(-|a - b| / h^2)
  Execution execution = Execution::parallel;
};

/// exp(-d_p / h^2) / Z with d_p = |alpha_v - alpha_p| (or its square).
/// Non-negative and summing to 1. Throws invalid_argument when h <= 0.
std::vector<double> nlm_weights(const Eigen::VectorXd& alpha_v,
                                std::span<const Eigen::VectorXd* const> codes, double h,
                                bool squared_norm = false);

/// Blends the estimates of every target vertex; other vertices keep
/// `current`. `reference_patch[v]` names the patch whose code plays alpha_v.
/// Throws infeasible when a target has no estimate.
std::vector<Vec3> reconstruct(const VertexEstimates& estimates,
                              std::span<const int> reference_patch,
                              std::span<const Vec3> current, std::span<const int> targets,
                              const ReconstructOptions& options);

/// 0.5 x median code distance over overlapping coded patch pairs; 1 when
/// that median is zero or no pair exists.
double default_h(std::span<const Patch> patches, std::span<const Eigen::VectorXd> codes,
                 int vertex_count);

}  // namespace dlinpaint
