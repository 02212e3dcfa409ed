// Command-line front end: train, inpaint, denoise, fill-holes, info.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dlinpaint/dictionary.hpp"
#include "dlinpaint/error.hpp"
#include "dlinpaint/execution.hpp"
#include "dlinpaint/mesh_io.hpp"
#include "dlinpaint/metrics.hpp"
#include "dlinpaint/pipeline.hpp"

namespace dl = dlinpaint;
using nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kIo = 2, kInfeasible = 3, kValidation = 4 };

int exit_code(dl::ErrorKind kind) {
  switch (kind) {
    case dl::ErrorKind::io:
    case dl::ErrorKind::parse:
      return kIo;
    case dl::ErrorKind::infeasible:
      return kInfeasible;
    case dl::ErrorKind::validation:
    case dl::ErrorKind::invalid_argument:
      return kValidation;
  }
  return kFailure;
}

// Options shared by every subcommand. Pipeline flags are collected as
// strings and applied on top of the config file through the same parser.
struct CommonArgs {
  std::string input;
  std::string output;
  std::string config;
  std::string report_json;
  std::string dictionary;
  std::string reference;
  bool fill_only = false;
  std::map<std::string, std::string> values;
  std::vector<std::pair<CLI::Option*, std::string>> options;
  std::vector<std::pair<CLI::Option*, std::string>> switches;
};

void add_value(CLI::App* cmd, CommonArgs& args, const std::string& flag, const std::string& key,
               const std::string& help) {
  args.options.emplace_back(cmd->add_option(flag, args.values[key], help), key);
}

void add_switch(CLI::App* cmd, CommonArgs& args, const std::string& flag, const std::string& key,
                const std::string& help) {
  args.switches.emplace_back(cmd->add_flag(flag, help), key);
}

void add_pipeline_options(CLI::App* cmd, CommonArgs& args) {
  add_value(cmd, args, "--sigma", "sigma", "patch overlap factor (> 0)");
  add_value(cmd, args, "--seeds", "seeds", "farthest-point seed count (0: ceil(|V|/8))");
  add_switch(cmd, args, "--all-vertex-seeds", "all_vertex_seeds", "one patch per vertex");
  add_value(cmd, args, "--basis", "basis", "gaussian | cosine");
  add_value(cmd, args, "--m-basis", "m_basis", "basis functions (perfect square)");
  add_value(cmd, args, "--atoms", "atoms", "dictionary atoms");
  add_value(cmd, args, "--sparsity", "sparsity", "OMP sparsity L");
  add_value(cmd, args, "--eps", "eps", "OMP tolerance relative to patch RMS height");
  add_value(cmd, args, "--iters", "iters", "K-SVD iterations");
  add_value(cmd, args, "--mode", "mode", "direct | adaptive");
  add_value(cmd, args, "--h", "h", "NLM filtering parameter (0: automatic)");
  add_value(cmd, args, "--nlm", "nlm", "on | off");
  add_switch(cmd, args, "--nlm-squared", "nlm_squared", "squared code distance in NLM weights");
  add_value(cmd, args, "--fair-order", "fair_order", "Laplacian order for fairing (1 | 2)");
  add_value(cmd, args, "--large-hole-threshold", "large_hole_threshold",
            "fair holes with more boundary edges than this");
  add_switch(cmd, args, "--freeze-known", "freeze_known", "never move original vertices");
  add_switch(cmd, args, "--reproject", "reproject", "re-sparsify propagated codes with OMP");
  add_switch(cmd, args, "--fill-all-loops", "fill_all_loops",
             "also fill the longest boundary loop");
  add_value(cmd, args, "--seed", "seed", "random seed");
  add_value(cmd, args, "--threads", "threads", "worker thread cap (0: runtime default)");
  cmd->add_option("--config", args.config, "flat key = value config file");
  cmd->add_option("--report-json", args.report_json, "write a machine-readable report");
}

dl::PipelineConfig resolve_config(const CommonArgs& args) {
  dl::PipelineConfig config;
  if (!args.config.empty()) config = dl::read_config_file(args.config);
  for (const auto& [opt, key] : args.options) {
    if (opt->count() > 0) dl::set_config_value(config, key, args.values.at(key));
  }
  for (const auto& [opt, key] : args.switches) {
    if (opt->count() > 0) dl::set_config_value(config, key, "on");
  }
  config.validate();
  dl::set_thread_count(config.threads);
  return config;
}

void write_report(const CommonArgs& args, const ordered_json& report) {
  if (args.report_json.empty()) return;
  std::ofstream out(args.report_json);
  if (!out) throw dl::Error(dl::ErrorKind::io, args.report_json + ": cannot write report");
  out << report.dump(2) << '\n';
}

ordered_json training_json(const dl::TrainReport& t) {
  return {{"patches", t.patch_count},
          {"mean_patch_size", t.mean_patch_size},
          {"radius", t.radius},
          {"atoms", t.atoms},
          {"degenerate_patches", t.degenerate_patches},
          {"flat_fallback", t.flat_fallback},
          {"reinitialized_atoms", t.reinitialized_atoms},
          {"residual_history", t.residual_history}};
}

void print_training(const dl::TrainReport& t) {
  std::printf("training: %d patches, mean |V_p| %.2f, radius %.6g, %d atoms\n", t.patch_count,
              t.mean_patch_size, t.radius, t.atoms);
  if (t.flat_fallback) std::printf("training: all patches flat, fixed dictionary used\n");
  for (std::size_t i = 0; i < t.residual_history.size(); ++i) {
    std::printf("  iteration %zu: mean residual %.6e\n", i + 1, t.residual_history[i]);
  }
}

std::optional<dl::Dictionary> maybe_dictionary(const CommonArgs& args) {
  if (args.dictionary.empty()) return std::nullopt;
  return dl::load_dictionary(args.dictionary);
}

void compare_reference(const CommonArgs& args, const dl::Mesh& result, int first_new,
                       ordered_json& report) {
  if (args.reference.empty()) return;
  const dl::Mesh reference = dl::load_mesh(args.reference);
  const std::vector<dl::Vec3> filled(result.positions().begin() + first_new,
                                     result.positions().end());
  const dl::DistanceStats all = dl::point_to_mesh(result.positions(), reference);
  const dl::DistanceStats added = dl::point_to_mesh(filled, reference);
  std::printf("reference: all vertices rms %.6e max %.6e\n", all.rms, all.max);
  if (added.count > 0) {
    std::printf("reference: filled vertices rms %.6e max %.6e\n", added.rms, added.max);
  }
  report["reference"] = {{"all_rms", all.rms},
                         {"all_max", all.max},
                         {"filled_rms", added.rms},
                         {"filled_max", added.max},
                         {"filled_count", added.count}};
}

ordered_json holes_json(const std::vector<dl::FilledHole>& holes) {
  ordered_json out = ordered_json::array();
  for (const auto& h : holes) {
    out.push_back({{"loop_length", h.loop_length},
                   {"sub_loops", h.sub_loops},
                   {"vertices_added", h.vertices_added},
                   {"faces_added", h.faces_added},
                   {"faired", h.faired}});
  }
  return out;
}

void print_holes(const std::vector<dl::FilledHole>& holes, std::size_t skipped) {
  std::printf("holes filled: %zu\n", holes.size());
  for (const auto& h : holes) {
    std::printf("  loop length %d: %d sub-loop(s), +%d vertices, +%d faces%s\n", h.loop_length,
                h.sub_loops, h.vertices_added, h.faces_added, h.faired ? ", faired" : "");
  }
  if (skipped > 0) {
    std::printf("outer boundary loop left open (use --fill-all-loops to fill it)\n");
  }
}

int run_train(const CommonArgs& args) {
  const dl::PipelineConfig config = resolve_config(args);
  const dl::Mesh mesh = dl::load_mesh(args.input);
  const dl::TrainReport t = dl::train_dictionary(mesh, config);
  dl::save_dictionary(t.dictionary, args.output);
  print_training(t);
  std::printf("dictionary written to %s\n", args.output.c_str());
  write_report(args, {{"command", "train"}, {"training", training_json(t)}});
  return kOk;
}

int run_fill(const CommonArgs& args, const dl::PipelineConfig& config, const dl::Mesh& mesh,
             const char* command) {
  const dl::HoleFillResult filled = dl::fill_only(mesh, config);
  print_holes(filled.holes, filled.skipped.size());
  if (filled.holes.empty()) std::printf("no holes found; mesh unchanged\n");
  dl::save_mesh(filled.mesh, args.output);
  ordered_json report{{"command", command},
                      {"holes", holes_json(filled.holes)},
                      {"vertices_added", filled.mesh.num_vertices() - mesh.num_vertices()}};
  compare_reference(args, filled.mesh, mesh.num_vertices(), report);
  write_report(args, report);
  return kOk;
}

int run_inpaint(const CommonArgs& args) {
  const dl::PipelineConfig config = resolve_config(args);
  const dl::Mesh mesh = dl::load_mesh(args.input);
  if (args.fill_only) return run_fill(args, config, mesh, "inpaint");
  const std::optional<dl::Dictionary> dict = maybe_dictionary(args);
  const dl::InpaintOutcome out = dl::inpaint_mesh(mesh, dict ? &*dict : nullptr, config);
  const dl::InpaintReport& r = out.report;
  ordered_json report{{"command", "inpaint"},
                      {"mode", config.mode == dl::InpaintMode::adaptive ? "adaptive" : "direct"}};
  if (r.training) {
    print_training(*r.training);
    report["training"] = training_json(*r.training);
  }
  print_holes(r.holes, r.skipped_loops.size());
  if (r.holes.empty()) {
    std::printf("no holes found; mesh unchanged\n");
  } else {
    std::printf("patches: %d (%d touching holes), radius %.6g\n", r.patch_count,
                r.hole_patch_count, r.radius);
    if (config.mode == dl::InpaintMode::adaptive) {
      std::printf("growing regions: r = %d\n", r.levels);
    } else if (r.dropped_patches > 0) {
      std::printf("direct mode skipped %d hole patch(es) without known vertices\n",
                  r.dropped_patches);
    }
    std::printf("vertices added: %d, mean hole-code non-zeros %.2f, mean residual %.6e, h %.6g\n",
                r.vertices_added, r.mean_hole_sparsity, r.mean_residual, r.h);
  }
  dl::save_mesh(out.mesh, args.output);
  report["holes"] = holes_json(r.holes);
  report["vertices_added"] = r.vertices_added;
  report["patches"] = r.patch_count;
  report["hole_patches"] = r.hole_patch_count;
  report["dropped_patches"] = r.dropped_patches;
  report["levels"] = r.levels;
  report["level_sizes"] = r.level_sizes;
  report["radius"] = r.radius;
  report["h"] = r.h;
  report["mean_hole_sparsity"] = r.mean_hole_sparsity;
  report["mean_residual"] = r.mean_residual;
  compare_reference(args, out.mesh, r.original_vertices, report);
  write_report(args, report);
  return kOk;
}

int run_denoise(const CommonArgs& args) {
  const dl::PipelineConfig config = resolve_config(args);
  const dl::Mesh mesh = dl::load_mesh(args.input);
  const std::optional<dl::Dictionary> dict = maybe_dictionary(args);
  const dl::DenoiseOutcome out = dl::denoise_mesh(mesh, dict ? &*dict : nullptr, config);
  ordered_json report{{"command", "denoise"}};
  if (out.training) {
    print_training(*out.training);
    report["training"] = training_json(*out.training);
  }
  std::printf("patches: %d, mean residual %.6e, h %.6g\n", out.patch_count, out.mean_residual,
              out.h);
  dl::save_mesh(out.mesh, args.output);
  report["patches"] = out.patch_count;
  report["h"] = out.h;
  report["mean_residual"] = out.mean_residual;
  compare_reference(args, out.mesh, out.mesh.num_vertices(), report);
  write_report(args, report);
  return kOk;
}

int run_fill_holes(const CommonArgs& args) {
  const dl::PipelineConfig config = resolve_config(args);
  return run_fill(args, config, dl::load_mesh(args.input), "fill-holes");
}

int run_info(const CommonArgs& args) {
  const dl::Mesh mesh = dl::load_mesh(args.input);
  const dl::MeshInfo info = dl::mesh_info(mesh);
  std::printf("vertices: %d\nedges: %d\nfaces: %d\nboundary edges: %d\nEuler characteristic: %d\n",
              info.vertices, info.edges, info.faces, info.boundary_edges,
              info.euler_characteristic);
  std::printf("manifold: yes\n");
  if (info.repaired_faces > 0) {
    std::printf("orientation: %d face(s) re-oriented on load\n", info.repaired_faces);
  }
  std::string lengths;
  ordered_json loops = ordered_json::array();
  for (const auto& l : info.loops) {
    if (!lengths.empty()) lengths += ", ";
    lengths += std::to_string(l.length());
    if (l.outer) lengths += " (outer)";
    loops.push_back({{"length", l.length()}, {"outer", l.outer}});
  }
  if (info.loops.empty()) {
    std::printf("0 holes\n");
  } else if (info.loops.size() == 1) {
    std::printf("1 hole, length %s\n", lengths.c_str());
  } else {
    std::printf("%zu holes, lengths %s\n", info.loops.size(), lengths.c_str());
  }
  write_report(args, {{"command", "info"},
                      {"vertices", info.vertices},
                      {"edges", info.edges},
                      {"faces", info.faces},
                      {"boundary_edges", info.boundary_edges},
                      {"euler_characteristic", info.euler_characteristic},
                      {"repaired_faces", info.repaired_faces},
                      {"loops", loops}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hole filling on triangle meshes with learned continuous patch dictionaries"};
  app.require_subcommand(1);
  // "--h" is the NLM parameter, so help is long-form only.
  app.set_help_flag("--help", "print this help and exit");

  CommonArgs train_args, inpaint_args, denoise_args, fill_args, info_args;

  auto* train = app.add_subcommand("train", "learn a dictionary from a mesh");
  train->add_option("input", train_args.input, "input mesh (OFF/OBJ/PLY)")->required();
  train->add_option("-o,--output", train_args.output, "dictionary file")->required();
  add_pipeline_options(train, train_args);

  auto* inpaint = app.add_subcommand("inpaint", "fill holes and refine them by sparse coding");
  inpaint->add_option("input", inpaint_args.input, "input mesh")->required();
  inpaint->add_option("-o,--output", inpaint_args.output, "output mesh")->required();
  inpaint->add_option("--dict", inpaint_args.dictionary, "dictionary file (trained if absent)");
  inpaint->add_option("--reference", inpaint_args.reference, "ground-truth mesh for comparison");
  inpaint->add_flag("--fill-only", inpaint_args.fill_only, "geometry-only fill, no dictionary");
  add_pipeline_options(inpaint, inpaint_args);

  auto* denoise = app.add_subcommand("denoise", "sparse-code and reconstruct every vertex");
  denoise->add_option("input", denoise_args.input, "input mesh")->required();
  denoise->add_option("-o,--output", denoise_args.output, "output mesh")->required();
  denoise->add_option("--dict", denoise_args.dictionary, "dictionary file (trained if absent)");
  denoise->add_option("--reference", denoise_args.reference, "ground-truth mesh for comparison");
  add_pipeline_options(denoise, denoise_args);

  auto* fill = app.add_subcommand("fill-holes", "advancing-front filling and fairing only");
  fill->add_option("input", fill_args.input, "input mesh")->required();
  fill->add_option("-o,--output", fill_args.output, "output mesh")->required();
  fill->add_option("--reference", fill_args.reference, "ground-truth mesh for comparison");
  add_pipeline_options(fill, fill_args);

  auto* info = app.add_subcommand("info", "print mesh statistics and boundary loops");
  info->add_option("input", info_args.input, "input mesh")->required();
  info->add_option("--report-json", info_args.report_json, "write a machine-readable report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*train) return run_train(train_args);
    if (*inpaint) return run_inpaint(inpaint_args);
    if (*denoise) return run_denoise(denoise_args);
    if (*fill) return run_fill_holes(fill_args);
    if (*info) return run_info(info_args);
  } catch (const dl::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
