#include "dlinpaint/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "dlinpaint/error.hpp"
#include "dlinpaint/frames.hpp"
#include "dlinpaint/inpaint.hpp"
#include "dlinpaint/kernels.hpp"
#include "dlinpaint/ksvd.hpp"
#include "dlinpaint/sampling.hpp"

namespace dlinpaint {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorKind::invalid_argument, "invalid value '" + value + "' for '" + key + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
  if (value == "off" || value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::invalid_argument, message);
}

struct PatchSet {
  std::vector<int> seeds;
  double radius = 0.0;
  std::vector<Patch> patches;
};

PatchSet training_patches(const Mesh& mesh, const PipelineConfig& config) {
  PatchSet set;
  const int n = mesh.num_vertices();
  if (config.all_vertex_seeds) {
    set.seeds.resize(n);
    std::iota(set.seeds.begin(), set.seeds.end(), 0);
    set.radius = compute_patch_radius(mesh, RadiusMode::all_vertices, nullptr, config.sigma);
  } else {
    const int count =
        std::min(n, config.seed_count > 0 ? config.seed_count : default_seed_count(n));
    const SeedSet fps = farthest_point_sampling(mesh, count, 0);
    set.radius = compute_patch_radius(mesh, RadiusMode::sampled, &fps, config.sigma);
    set.seeds = fps.seeds;
  }
  set.patches = build_patches(mesh, set.seeds, set.radius);
  return set;
}

// Seeds for coding an (extended) mesh with a given dictionary: the
// dictionary's training seeds that still exist, extended by farthest-point
// sampling until the mesh is covered at radius / sigma.
PatchSet coding_patches(const Mesh& mesh, int original_vertices, const Dictionary& dict,
                        const PipelineConfig& config) {
  PatchSet set;
  set.radius = dict.basis.domain_radius();
  if (config.all_vertex_seeds) {
    set.seeds.resize(mesh.num_vertices());
    std::iota(set.seeds.begin(), set.seeds.end(), 0);
  } else {
    std::vector<int> start;
    std::vector<char> used(mesh.num_vertices(), 0);
    for (int s : dict.seeds) {
      if (s >= 0 && s < original_vertices && !used[s]) {
        used[s] = 1;
        start.push_back(s);
      }
    }
    if (start.empty()) start.push_back(0);
    set.seeds = extend_farthest_point_sampling(mesh, std::move(start), set.radius / config.sigma)
                    .seeds;
  }
  set.patches = build_patches(mesh, set.seeds, set.radius);
  return set;
}

// Used when every training patch is flat: unit basis vectors first, then
// seeded random unit columns. Flat patches code to zero against any atoms.
Dictionary flat_dictionary(const BasisSet& basis, int atoms, std::uint64_t seed) {
  Dictionary dict;
  dict.basis = basis;
  dict.coefficients = Eigen::MatrixXd::Zero(basis.size(), atoms);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < atoms; ++i) {
    if (i < basis.size()) {
      dict.coefficients(i, i) = 1.0;
      continue;
    }
    Eigen::VectorXd col(basis.size());
    for (int j = 0; j < basis.size(); ++j) {
      col(j) = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
    }
    dict.coefficients.col(i) = col.normalized();
  }
  return dict;
}

std::vector<int> border_vertices(const std::vector<FilledHole>& holes) {
  std::vector<int> out;
  for (const FilledHole& h : holes) out.insert(out.end(), h.border.begin(), h.border.end());
  return out;
}

// Codes every selected patch, then blends per-vertex estimates.
struct Blend {
  std::vector<Vec3> positions;
  double h = 0.0;
};

Blend blend(const Mesh& mesh, std::span<const Patch> patches, const VertexEstimates& estimates,
            std::span<const Vec3> current, std::span<const int> targets,
            const PipelineConfig& config) {
  std::vector<int> coded;
  std::vector<int> seeds;
  for (int p = 0; p < static_cast<int>(patches.size()); ++p) {
    if (estimates.codes[p].size() == 0) continue;
    coded.push_back(p);
    seeds.push_back(patches[p].seed);
  }
  Blend out;
  if (coded.empty()) {
    out.positions.assign(current.begin(), current.end());
    return out;
  }
  const std::vector<int> label = nearest_source(mesh, seeds);
  std::vector<int> reference(mesh.num_vertices(), -1);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (label[v] >= 0) reference[v] = coded[label[v]];
  }
  out.h = config.h > 0.0 ? config.h : default_h(patches, estimates.codes, mesh.num_vertices());
  ReconstructOptions ro;
  ro.mode = config.nlm ? WeightMode::nlm : WeightMode::uniform;
  ro.h = out.h;
  ro.squared_norm = config.nlm_squared;
  out.positions = reconstruct(estimates, reference, current, targets, ro);
  return out;
}

double mean_residual(std::span<const PatchEstimate> estimates) {
  if (estimates.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : estimates) s += e.residual;
  return s / static_cast<double>(estimates.size());
}

}  // namespace

void PipelineConfig::validate() const {
  require(sigma > 0.0 && std::isfinite(sigma), "sigma must be > 0");
  require(seed_count >= 0, "seeds must be >= 0 (0 selects ceil(|V|/8))");
  require(m_basis >= 1 && static_cast<int>(std::lround(std::sqrt(m_basis))) *
                                  static_cast<int>(std::lround(std::sqrt(m_basis))) ==
                              m_basis,
          "m_basis must be a positive perfect square");
  require(atoms >= 1, "atoms must be >= 1");
  require(sparsity >= 1, "sparsity must be >= 1");
  require(eps >= 0.0 && std::isfinite(eps), "eps must be >= 0");
  require(iterations >= 1, "iters must be >= 1");
  require(fair_order == 1 || fair_order == 2, "fair_order must be 1 or 2");
  require(large_hole_threshold >= 0, "large_hole_threshold must be >= 0");
  require(h >= 0.0 && std::isfinite(h), "h must be > 0 (or 0 for automatic)");
  require(threads >= 0, "threads must be >= 0");
}

void set_config_value(PipelineConfig& c, const std::string& key_in, const std::string& value_in) {
  std::string key = trim(key_in);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = trim(value_in);
  if (key == "sigma") {
    c.sigma = parse_number<double>(key, value);
  } else if (key == "seeds") {
    c.seed_count = parse_number<int>(key, value);
  } else if (key == "all_vertex_seeds") {
    c.all_vertex_seeds = parse_bool(key, value);
  } else if (key == "basis") {
    c.basis = basis_kind_from_string(value);
  } else if (key == "m_basis") {
    c.m_basis = parse_number<int>(key, value);
  } else if (key == "atoms") {
    c.atoms = parse_number<int>(key, value);
  } else if (key == "sparsity") {
    c.sparsity = parse_number<int>(key, value);
  } else if (key == "eps") {
    c.eps = parse_number<double>(key, value);
  } else if (key == "iters") {
    c.iterations = parse_number<int>(key, value);
  } else if (key == "mode") {
    if (value == "direct") {
      c.mode = InpaintMode::direct;
    } else if (value == "adaptive") {
      c.mode = InpaintMode::adaptive;
    } else {
      bad_value(key, value);
    }
  } else if (key == "h") {
    c.h = parse_number<double>(key, value);
  } else if (key == "nlm") {
    c.nlm = parse_bool(key, value);
  } else if (key == "nlm_squared") {
    c.nlm_squared = parse_bool(key, value);
  } else if (key == "fair_order") {
    c.fair_order = parse_number<int>(key, value);
  } else if (key == "large_hole_threshold") {
    c.large_hole_threshold = parse_number<int>(key, value);
  } else if (key == "freeze_known") {
    c.freeze_known = parse_bool(key, value);
  } else if (key == "reproject") {
    c.reproject = parse_bool(key, value);
  } else if (key == "fill_all_loops") {
    c.fill_outer = parse_bool(key, value);
  } else if (key == "seed") {
    c.rng_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "threads") {
    c.threads = parse_number<int>(key, value);
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown config key '" + trim(key_in) + "'");
  }
}

PipelineConfig read_config_file(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, path.string() + ": cannot open config file");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) +
                                        ": expected 'key = value'");
    }
    try {
      set_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

TrainReport train_dictionary(const Mesh& mesh, const PipelineConfig& config) {
  config.validate();
  if (mesh.empty() || mesh.num_faces() == 0) {
    throw Error(ErrorKind::invalid_argument, "cannot train on an empty mesh");
  }
  const PatchSet set = training_patches(mesh, config);
  const BasisSet basis = BasisSet::make(config.basis, config.m_basis, set.radius);
  const std::vector<Vec3> normals = vertex_normals(mesh);
  std::vector<TrainingPatch> signals(set.patches.size());
  kernels::for_each_index(static_cast<long>(signals.size()), Execution::parallel, [&](long p) {
    const Frame frame = build_frame(mesh, normals, set.patches[p]);
    const HeightMapSignal s = to_height_map(mesh, set.patches[p], frame);
    signals[p] = {s.z, sample_basis(basis, s).phi};
  });

  TrainReport report;
  report.patch_count = static_cast<int>(set.patches.size());
  double total = 0.0;
  for (const Patch& p : set.patches) total += static_cast<double>(p.vertices.size());
  report.mean_patch_size = total / report.patch_count;
  report.radius = set.radius;
  const int usable = static_cast<int>(std::count_if(
      signals.begin(), signals.end(), [&](const auto& s) { return !is_degenerate(s, set.radius); }));
  report.degenerate_patches = report.patch_count - usable;

  if (usable == 0) {
    warn("every training patch is flat; using a fixed basis-aligned dictionary");
    report.flat_fallback = true;
    report.atoms = config.atoms;
    report.dictionary = flat_dictionary(basis, config.atoms, config.rng_seed);
  } else {
    KsvdOptions options;
    options.atoms = std::min(config.atoms, usable);
    if (options.atoms < config.atoms) {
      warn("only " + std::to_string(usable) + " non-flat training patches; training " +
           std::to_string(options.atoms) + " atoms instead of " + std::to_string(config.atoms));
    }
    options.sparsity = config.sparsity;
    options.eps_factor = config.eps;
    options.iterations = config.iterations;
    options.seed = config.rng_seed;
    KsvdResult trained = ksvd_train(signals, basis, options);
    report.atoms = options.atoms;
    report.reinitialized_atoms = trained.reinitialized_atoms;
    report.residual_history = std::move(trained.residual_history);
    report.dictionary = std::move(trained.dictionary);
  }
  if (!config.all_vertex_seeds) report.dictionary.seeds = set.seeds;
  return report;
}

InpaintOutcome inpaint_mesh(const Mesh& mesh, const Dictionary* dictionary,
                            const PipelineConfig& config) {
  config.validate();
  if (mesh.empty()) throw Error(ErrorKind::invalid_argument, "empty mesh");
  InpaintOutcome out;
  InpaintReport& report = out.report;
  HoleFillOptions fill;
  fill.fair_order = config.fair_order;
  fill.large_hole_threshold = config.large_hole_threshold;
  fill.fill_outer = config.fill_outer;
  HoleFillResult filled = fill_holes(mesh, fill);
  report.holes = filled.holes;
  report.skipped_loops = filled.skipped;
  report.original_vertices = mesh.num_vertices();
  if (filled.holes.empty()) {
    out.mesh = mesh;
    return out;
  }

  if (dictionary == nullptr) {
    report.training = train_dictionary(mesh, config);
    dictionary = &report.training->dictionary;
  }
  const Dictionary& dict = *dictionary;
  const Mesh& ext = filled.mesh;
  const int nv = ext.num_vertices();
  report.vertices_added = nv - mesh.num_vertices();
  const KnownVertexMask mask = KnownVertexMask::first(nv, mesh.num_vertices());
  const PatchSet set = coding_patches(ext, mesh.num_vertices(), dict, config);
  const std::span<const Patch> patches(set.patches);
  report.patch_count = static_cast<int>(patches.size());
  report.radius = set.radius;

  const std::vector<int> holes = hole_patches(patches, mask);
  report.hole_patch_count = static_cast<int>(holes.size());
  std::vector<char> is_hole(patches.size(), 0);
  std::vector<char> in_hole_patch(nv, 0);
  for (int p : holes) {
    is_hole[p] = 1;
    for (int v : patches[p].vertices) in_hole_patch[v] = 1;
  }
  // Intact patches that share vertices with hole patches contribute estimates
  // to those vertices.
  std::vector<int> context;
  for (int p = 0; p < static_cast<int>(patches.size()); ++p) {
    if (is_hole[p]) continue;
    const auto& vs = patches[p].vertices;
    if (std::any_of(vs.begin(), vs.end(), [&](int v) { return in_hole_patch[v] != 0; })) {
      context.push_back(p);
    }
  }

  InpaintOptions io;
  io.sparsity = config.sparsity;
  io.eps_factor = config.eps;
  io.reproject = config.reproject;
  VertexEstimates estimates(nv, static_cast<int>(patches.size()));
  std::vector<PatchEstimate> masked = direct_inpaint(ext, dict, patches, context, mask, io);
  std::vector<Vec3> geometry = ext.positions();
  std::vector<int> coded_holes;
  std::vector<PatchEstimate> hole_estimates;

  if (config.mode == InpaintMode::adaptive) {
    const std::vector<int> border = border_vertices(filled.holes);
    const GrowRegions regions = build_grow_regions(patches, mask, border);
    report.levels = regions.count();
    for (const auto& level : regions.levels) {
      report.level_sizes.push_back(static_cast<int>(level.size()));
    }
    AdaptiveResult ar = adaptive_inpaint(ext, dict, patches, mask, regions, io);
    geometry = std::move(ar.geometry);
    hole_estimates = std::move(ar.estimates);
    // Estimates come in level order; level 0 is the masked-OMP part.
    if (!regions.levels.empty()) {
      masked.insert(masked.end(), hole_estimates.begin(),
                    hole_estimates.begin() + static_cast<long>(regions.levels[0].size()));
    }
  } else {
    std::vector<int> keep;
    for (int p : holes) {
      const auto& vs = patches[p].vertices;
      if (std::any_of(vs.begin(), vs.end(), [&](int v) { return mask.is_known(v); })) {
        keep.push_back(p);
      }
    }
    report.dropped_patches = static_cast<int>(holes.size() - keep.size());
    if (report.dropped_patches > 0) {
      std::vector<char> covered(nv, 0);
      for (int p : keep) {
        for (int v : patches[p].vertices) covered[v] = 1;
      }
      for (int v = mesh.num_vertices(); v < nv; ++v) {
        if (!covered[v]) {
          throw Error(ErrorKind::infeasible,
                      "direct mode: hole vertex " + std::to_string(v) +
                          " lies only in patches without known vertices; the hole is larger "
                          "than a patch, use --mode adaptive");
        }
      }
      warn("direct mode: " + std::to_string(report.dropped_patches) +
           " hole patch(es) contain no known vertex and were skipped; the hole is larger than a "
           "patch and adaptive mode is better suited to it");
    }
    hole_estimates = direct_inpaint(ext, dict, patches, keep, mask, io);
    masked.insert(masked.end(), hole_estimates.begin(), hole_estimates.end());
  }
  report.mean_residual = mean_residual(masked);

  for (std::size_t k = 0; k < context.size(); ++k) {
    estimates.add(patches[context[k]], masked[k]);
  }
  double nnz = 0.0;
  std::vector<char> target(nv, 0);
  for (const PatchEstimate& e : hole_estimates) {
    estimates.add(patches[e.patch], e);
    nnz += static_cast<double>((e.code.array() != 0.0).count());
    for (int v : patches[e.patch].vertices) {
      if (!config.freeze_known || !mask.is_known(v)) target[v] = 1;
    }
  }
  if (!hole_estimates.empty()) report.mean_hole_sparsity = nnz / hole_estimates.size();
  std::vector<int> targets;
  for (int v = 0; v < nv; ++v) {
    if (target[v]) targets.push_back(v);
  }
  Blend b = blend(ext, patches, estimates, geometry, targets, config);
  report.h = b.h;
  out.mesh = ext.with_positions(std::move(b.positions));
  return out;
}

DenoiseOutcome denoise_mesh(const Mesh& mesh, const Dictionary* dictionary,
                            const PipelineConfig& config) {
  config.validate();
  if (mesh.empty() || mesh.num_faces() == 0) {
    throw Error(ErrorKind::invalid_argument, "cannot denoise an empty mesh");
  }
  DenoiseOutcome out;
  if (dictionary == nullptr) {
    out.training = train_dictionary(mesh, config);
    dictionary = &out.training->dictionary;
  }
  const int nv = mesh.num_vertices();
  const PatchSet set = coding_patches(mesh, nv, *dictionary, config);
  std::vector<int> all(set.patches.size());
  std::iota(all.begin(), all.end(), 0);
  InpaintOptions io;
  io.sparsity = config.sparsity;
  io.eps_factor = config.eps;
  const std::vector<PatchEstimate> coded =
      direct_inpaint(mesh, *dictionary, set.patches, all, KnownVertexMask::all(nv), io);
  VertexEstimates estimates(nv, static_cast<int>(set.patches.size()));
  for (const PatchEstimate& e : coded) estimates.add(set.patches[e.patch], e);
  std::vector<int> targets;
  for (int v = 0; v < nv; ++v) {
    if (!estimates.per_vertex[v].empty()) targets.push_back(v);
  }
  Blend b = blend(mesh, set.patches, estimates, mesh.positions(), targets, config);
  out.mesh = mesh.with_positions(std::move(b.positions));
  out.patch_count = static_cast<int>(set.patches.size());
  out.h = b.h;
  out.mean_residual = mean_residual(coded);
  return out;
}

HoleFillResult fill_only(const Mesh& mesh, const PipelineConfig& config) {
  config.validate();
  HoleFillOptions fill;
  fill.fair_order = config.fair_order;
  fill.large_hole_threshold = config.large_hole_threshold;
  fill.fill_outer = config.fill_outer;
  return fill_holes(mesh, fill);
}

MeshInfo mesh_info(const Mesh& mesh) {
  MeshInfo info;
  info.vertices = mesh.num_vertices();
  info.edges = mesh.num_edges();
  info.faces = mesh.num_faces();
  info.boundary_edges = mesh.num_boundary_halfedges();
  info.euler_characteristic = mesh.euler_characteristic();
  info.repaired_faces = mesh.repaired_faces();
  info.loops = detect_holes(mesh);
  return info;
}

}  // namespace dlinpaint
