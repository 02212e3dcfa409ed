#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dlinpaint/basis.hpp"
#include "dlinpaint/dictionary.hpp"
#include "dlinpaint/holes.hpp"
#include "dlinpaint/metrics.hpp"
#include "dlinpaint/mesh.hpp"

namespace dlinpaint {

enum class InpaintMode { direct, adaptive };

/// Free parameters of the whole pipeline. Keys accepted by
/// set_config_value / config files are listed in the README.
struct PipelineConfig {
  double sigma = 1.5;
  int seed_count = 0;  // 0: ceil(|V| / 8)
  bool all_vertex_seeds = false;
  BasisKind basis = BasisKind::cosine;
  int m_basis = 16;
  int atoms = 64;
  int sparsity = 4;
  double eps = 1e-4;  // relative to the patch RMS height
  int iterations = 20;
  int fair_order = 2;
  int large_hole_threshold = 8;
  double h = 0.0;  // 0: 0.5 x median code distance
  bool nlm = true;
  bool nlm_squared = false;
  InpaintMode mode = InpaintMode::adaptive;
  bool freeze_known = false;
  bool reproject = false;
  bool fill_outer = false;
  std::uint64_t rng_seed = 1;
  int threads = 0;

  /// Throws invalid_argument naming the first out-of-range field.
  void validate() const;
};

/// Parses `value` into the field named `key`. Throws invalid_argument for an
/// unknown key or a malformed value.
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);

/// Flat "key = value" lines; '#' starts a comment. Later lines win.
PipelineConfig read_config_file(const std::filesystem::path& path, PipelineConfig base = {});

struct TrainReport {
  Dictionary dictionary;
  int patch_count = 0;
  double mean_patch_size = 0.0;
  double radius = 0.0;
  int atoms = 0;
  int degenerate_patches = 0;
  bool flat_fallback = false;
  int reinitialized_atoms = 0;
  std::vector<double> residual_history;
};

/// Patches from farthest-point seeds (or every vertex), one height-map
/// signal per patch, continuous K-SVD. A mesh whose patches are all flat
/// gets a fixed dictionary instead (see README).
TrainReport train_dictionary(const Mesh& mesh, const PipelineConfig& config);

struct InpaintReport {
  std::vector<FilledHole> holes;
  std::vector<HoleLoop> skipped_loops;
  int original_vertices = 0;
  int vertices_added = 0;
  int patch_count = 0;
  int hole_patch_count = 0;
  int dropped_patches = 0;  // direct mode: hole patches without known vertices
  int levels = 0;           // adaptive mode
  std::vector<int> level_sizes;
  double radius = 0.0;
  double h = 0.0;
  double mean_hole_sparsity = 0.0;  // non-zeros per hole-patch code
  double mean_residual = 0.0;       // masked-OMP residual over coded patches
  std::optional<TrainReport> training;
};

struct InpaintOutcome {
  Mesh mesh;
  InpaintReport report;
};

/// Detect and fill holes, then refine the new geometry by sparse coding.
/// Trains a dictionary on `mesh` when none is given.
InpaintOutcome inpaint_mesh(const Mesh& mesh, const Dictionary* dictionary,
                            const PipelineConfig& config);

struct DenoiseOutcome {
  Mesh mesh;
  int patch_count = 0;
  double h = 0.0;
  double mean_residual = 0.0;
  std::optional<TrainReport> training;
};

/// Every vertex known; every patch coded and every vertex reconstructed.
DenoiseOutcome denoise_mesh(const Mesh& mesh, const Dictionary* dictionary,
                            const PipelineConfig& config);

/// Geometry-only hole filling with fairing.
HoleFillResult fill_only(const Mesh& mesh, const PipelineConfig& config);

struct MeshInfo {
  int vertices = 0;
  int edges = 0;
  int faces = 0;
  int boundary_edges = 0;
  int euler_characteristic = 0;
  int repaired_faces = 0;
  std::vector<HoleLoop> loops;
};

MeshInfo mesh_info(const Mesh& mesh);

}  // namespace dlinpaint
