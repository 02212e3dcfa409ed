#include <doctest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "dlinpaint/dictionary.hpp"
#include "dlinpaint/error.hpp"
#include "dlinpaint/mesh_io.hpp"
#include "dlinpaint/metrics.hpp"
#include "dlinpaint/pipeline.hpp"
#include "dlinpaint/primitives.hpp"
#include "support.hpp"

#ifndef DLINPAINT_CLI_PATH
#define DLINPAINT_CLI_PATH "dlinpaint"
#endif

using namespace dlinpaint;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "dlinpaint_cli_unit";
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Run cli(const std::string& args) {
  const fs::path out = workdir() / "stdout.txt";
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = std::string("\"") + DLINPAINT_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string saved(const Mesh& m, const std::string& name) {
  const fs::path p = workdir() / name;
  save_mesh(m, p);
  return "\"" + p.string() + "\"";
}

std::string path_of(const std::string& name) { return "\"" + (workdir() / name).string() + "\""; }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::infeasible;
}

}  // namespace

TEST_CASE("config values by key") {
  PipelineConfig c;
  set_config_value(c, "sigma", "2.5");
  set_config_value(c, "m-basis", "9");
  set_config_value(c, " atoms ", " 12 ");
  set_config_value(c, "basis", "gaussian");
  set_config_value(c, "mode", "direct");
  set_config_value(c, "nlm", "off");
  set_config_value(c, "freeze_known", "yes");
  set_config_value(c, "seed", "42");
  set_config_value(c, "iters", "3");
  set_config_value(c, "fill-all-loops", "true");
  CHECK(c.sigma == 2.5);
  CHECK(c.m_basis == 9);
  CHECK(c.atoms == 12);
  CHECK(c.basis == BasisKind::gaussian);
  CHECK(c.mode == InpaintMode::direct);
  CHECK_FALSE(c.nlm);
  CHECK(c.freeze_known);
  CHECK(c.rng_seed == 42);
  CHECK(c.iterations == 3);
  CHECK(c.fill_outer);
  c.validate();
  CHECK(kind_of([&] { set_config_value(c, "colour", "red"); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { set_config_value(c, "atoms", "many"); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { set_config_value(c, "atoms", "3.5"); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { set_config_value(c, "nlm", "maybe"); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([&] { set_config_value(c, "mode", "sideways"); }) == ErrorKind::invalid_argument);
}

TEST_CASE("config ranges are validated") {
  const auto bad = [](auto mutate) {
    PipelineConfig c;
    mutate(c);
    return kind_of([&] { c.validate(); }) == ErrorKind::invalid_argument;
  };
  CHECK(bad([](PipelineConfig& c) { c.sigma = 0; }));
  CHECK(bad([](PipelineConfig& c) { c.m_basis = 15; }));
  CHECK(bad([](PipelineConfig& c) { c.atoms = 0; }));
  CHECK(bad([](PipelineConfig& c) { c.sparsity = 0; }));
  CHECK(bad([](PipelineConfig& c) { c.iterations = 0; }));
  CHECK(bad([](PipelineConfig& c) { c.fair_order = 3; }));
  CHECK(bad([](PipelineConfig& c) { c.h = -1; }));
  CHECK(bad([](PipelineConfig& c) { c.eps = -1; }));
  CHECK(bad([](PipelineConfig& c) { c.threads = -2; }));
  PipelineConfig ok;
  ok.validate();
}

TEST_CASE("config files") {
  const fs::path p = workdir() / "good.cfg";
  {
    std::ofstream out(p);
    out << "# comment\n\nsigma = 2.0   # trailing\natoms=8\nsigma = 3.0\nmode = direct\n";
  }
  const PipelineConfig c = read_config_file(p);
  CHECK(c.sigma == 3.0);
  CHECK(c.atoms == 8);
  CHECK(c.mode == InpaintMode::direct);

  const fs::path bad = workdir() / "bad.cfg";
  {
    std::ofstream out(bad);
    out << "sigma = 2\nthis line has no equals sign\n";
  }
  try {
    read_config_file(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::parse);
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  const fs::path unknown = workdir() / "unknown.cfg";
  {
    std::ofstream out(unknown);
    out << "sigmaa = 2\n";
  }
  CHECK(kind_of([&] { read_config_file(unknown); }) == ErrorKind::parse);
  CHECK(kind_of([&] { read_config_file(workdir() / "absent.cfg"); }) == ErrorKind::io);
}

TEST_CASE("training report") {
  PipelineConfig c;
  c.atoms = 16;
  c.iterations = 6;
  const TrainReport t = train_dictionary(make_icosphere(3), c);
  CHECK(t.patch_count == default_seed_count(642));
  CHECK(t.dictionary.seeds.size() == static_cast<std::size_t>(t.patch_count));
  CHECK(t.atoms == 16);
  CHECK(t.mean_patch_size >= 3.0);
  CHECK(t.residual_history.size() == 6);
  for (std::size_t i = 1; i < t.residual_history.size(); ++i) {
    CHECK(t.residual_history[i] <= t.residual_history[i - 1] + 1e-9);
  }
  CHECK_FALSE(t.flat_fallback);
  CHECK(kind_of([&] { train_dictionary(Mesh(), c); }) == ErrorKind::invalid_argument);
}

TEST_CASE("flat meshes get the fixed dictionary") {
  testing::WarningCapture warnings;
  PipelineConfig c;
  c.atoms = 20;
  const TrainReport t = train_dictionary(make_grid(10, 10), c);
  CHECK(t.flat_fallback);
  CHECK(t.dictionary.atom_count() == 20);
  for (int i = 0; i < 20; ++i) {
    CHECK(t.dictionary.coefficients.col(i).norm() == doctest::Approx(1.0));
  }
  CHECK(warnings.any("flat"));
}

TEST_CASE("noiseless plane denoises to itself") {
  const Mesh plane = make_grid(12, 12);
  const DenoiseOutcome out = denoise_mesh(plane, nullptr, PipelineConfig{});
  double worst = 0;
  for (int v = 0; v < plane.num_vertices(); ++v) {
    worst = std::max(worst, (out.mesh.position(v) - plane.position(v)).norm());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("noisy plane denoising lowers the deviation") {
  const Mesh plane = make_grid(20, 20);
  const Mesh noisy = add_normal_noise(plane, 0.1, 21);
  PipelineConfig c;
  c.atoms = 32;
  c.mode = InpaintMode::direct;
  const DenoiseOutcome out = denoise_mesh(noisy, nullptr, c);
  const double before = plane_deviation(noisy.positions(), Vec3::Zero(), Vec3::UnitZ()).rms;
  const double after = plane_deviation(out.mesh.positions(), Vec3::Zero(), Vec3::UnitZ()).rms;
  CHECK(after < before);
  CHECK(kind_of([&] { denoise_mesh(Mesh(), nullptr, c); }) == ErrorKind::invalid_argument);
}

TEST_CASE("inpainting a closed mesh is a no-op") {
  const Mesh s = make_icosphere(2);
  const InpaintOutcome out = inpaint_mesh(s, nullptr, PipelineConfig{});
  CHECK(out.report.holes.empty());
  CHECK(out.mesh.positions() == s.positions());
  CHECK(out.mesh.faces() == s.faces());
}

TEST_CASE("frozen known vertices stay put") {
  const Submesh holed = testing::sphere_with_cap(3, 20);
  PipelineConfig c;
  c.atoms = 16;
  c.iterations = 5;
  c.freeze_known = true;
  const InpaintOutcome out = inpaint_mesh(holed.mesh, nullptr, c);
  for (int v = 0; v < holed.mesh.num_vertices(); ++v) {
    CHECK(out.mesh.position(v) == holed.mesh.position(v));
  }
  CHECK(out.mesh.num_boundary_halfedges() == 0);
  CHECK(out.report.vertices_added == out.mesh.num_vertices() - holed.mesh.num_vertices());
}

TEST_CASE("known vertices outside hole patches are unchanged") {
  const Submesh holed = testing::sphere_with_cap(3, 20);
  PipelineConfig c;
  c.atoms = 16;
  c.iterations = 5;
  const InpaintOutcome out = inpaint_mesh(holed.mesh, nullptr, c);
  // Vertices far from the cap are outside every hole patch.
  const Vec3 pole = Vec3(0.3, 0.2, 1.0).normalized();
  int far = 0;
  for (int v = 0; v < holed.mesh.num_vertices(); ++v) {
    if (holed.mesh.position(v).dot(pole) < 0.0) {
      CHECK(out.mesh.position(v) == holed.mesh.position(v));
      ++far;
    }
  }
  CHECK(far > 100);
}

TEST_CASE("adaptive beats or matches direct on a 20-edge planar hole") {
  const Submesh holed = testing::grid_with_hole(21, 21, 8, 8, 5, 5);
  PipelineConfig c;
  c.atoms = 32;
  const InpaintOutcome a = inpaint_mesh(holed.mesh, nullptr, c);
  c.mode = InpaintMode::direct;
  const InpaintOutcome d = inpaint_mesh(holed.mesh, nullptr, c);
  const int n0 = holed.mesh.num_vertices();
  const std::vector<Vec3> fa(a.mesh.positions().begin() + n0, a.mesh.positions().end());
  const std::vector<Vec3> fd(d.mesh.positions().begin() + n0, d.mesh.positions().end());
  const double ra = plane_deviation(fa, Vec3::Zero(), Vec3::UnitZ()).rms;
  const double rd = plane_deviation(fd, Vec3::Zero(), Vec3::UnitZ()).rms;
  CHECK(ra <= 1e-2 * a.report.radius);
  CHECK(rd >= ra - 1e-9 * a.report.radius);
  CHECK(a.report.levels >= 1);
}

TEST_CASE("mesh info") {
  const MeshInfo closed = mesh_info(make_icosphere(2));
  CHECK(closed.loops.empty());
  CHECK(closed.euler_characteristic == 2);
  const Submesh holed = remove_faces(make_icosphere(2), [](int f) { return f == 0; });
  const MeshInfo one = mesh_info(holed.mesh);
  REQUIRE(one.loops.size() == 1);
  CHECK(one.loops[0].length() == 3);
  CHECK(one.boundary_edges == 3);
}

TEST_CASE("cli info output") {
  Run r = cli("info " + saved(make_icosphere(2), "closed.off"));
  CHECK(r.code == 0);
  CHECK(r.out.find("0 holes") != std::string::npos);

  const Submesh holed = remove_faces(make_icosphere(2), [](int f) { return f == 0; });
  r = cli("info " + saved(holed.mesh, "minus.off") + " --report-json " + path_of("info.json"));
  CHECK(r.code == 0);
  CHECK(r.out.find("1 hole, length 3") != std::string::npos);
  const auto report = nlohmann::json::parse(slurp(workdir() / "info.json"));
  CHECK(report["loops"].size() == 1);
  CHECK(report["loops"][0]["length"] == 3);

  const fs::path nm = workdir() / "nonmanifold.off";
  {
    std::ofstream out(nm);
    out << "OFF\n5 3 0\n0 0 0\n1 0 0\n0 1 0\n0 -1 0\n0 0 1\n3 0 1 2\n3 1 0 3\n3 0 1 4\n";
  }
  r = cli("info \"" + nm.string() + "\"");
  CHECK(r.code == 4);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("cli exit codes") {
  CHECK(cli("info " + path_of("does_not_exist.off")).code == 2);
  CHECK(cli("train " + path_of("does_not_exist.off") + " -o " + path_of("x.mdld")).code == 2);
  const fs::path garbage = workdir() / "garbage.off";
  {
    std::ofstream out(garbage);
    out << "OFF\n3 1 0\n0 0 zero\n";
  }
  CHECK(cli("info \"" + garbage.string() + "\"").code == 2);
  const std::string sphere = saved(make_icosphere(2), "s2.off");
  CHECK(cli("inpaint " + sphere + " -o " + path_of("o.off") + " --sigma -1").code == 4);
  CHECK(cli("inpaint " + sphere + " -o " + path_of("o.off") + " --m-basis 15").code == 4);
  CHECK(cli("inpaint " + sphere + " -o " + path_of("o.off") + " --no-such-flag").code == 4);
  CHECK(cli("").code == 4);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("cli train writes a loadable dictionary") {
  const std::string input = saved(make_icosphere(3), "train.off");
  const fs::path dict = workdir() / "sphere.mdld";
  const Run r = cli("train " + input + " -o \"" + dict.string() +
                    "\" --sigma 1.5 --m-basis 16 --atoms 32 --iters 5 --report-json " +
                    path_of("train.json"));
  REQUIRE(r.code == 0);
  const Dictionary d = load_dictionary(dict);
  CHECK(d.atom_count() == 32);
  CHECK(d.basis.size() == 16);
  const auto report = nlohmann::json::parse(slurp(workdir() / "train.json"));
  const auto hist = report["training"]["residual_history"].get<std::vector<double>>();
  CHECK(hist.size() == 5);
  for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] <= hist[i - 1] + 1e-9);

  // Identical runs give identical bytes.
  const fs::path again = workdir() / "sphere2.mdld";
  REQUIRE(cli("train " + input + " -o \"" + again.string() +
              "\" --sigma 1.5 --m-basis 16 --atoms 32 --iters 5")
              .code == 0);
  CHECK(slurp(dict) == slurp(again));
}

TEST_CASE("cli inpaint with a dictionary and a reference") {
  const Submesh holed = testing::sphere_with_cap(3, 20);
  const std::string input = saved(holed.mesh, "capped.off");
  const std::string reference = saved(make_icosphere(5), "reference.off");
  const fs::path dict = workdir() / "capped.mdld";
  REQUIRE(cli("train " + input + " -o \"" + dict.string() + "\" --atoms 16 --iters 5").code == 0);
  const fs::path output = workdir() / "inpainted.off";
  const Run r = cli("inpaint " + input + " --dict \"" + dict.string() + "\" -o \"" +
                    output.string() + "\" --reference " + reference + " --report-json " +
                    path_of("inpaint.json"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("growing regions") != std::string::npos);
  const Mesh out = load_mesh(output);
  CHECK(out.num_boundary_halfedges() == 0);
  const auto report = nlohmann::json::parse(slurp(workdir() / "inpaint.json"));
  CHECK(report["holes"].size() == 1);
  CHECK(report.contains("reference"));
  CHECK(report["levels"].get<int>() >= 1);
  CHECK_FALSE(report.contains("training"));
}

TEST_CASE("cli config file and flag precedence") {
  const fs::path cfg = workdir() / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "atoms = 8\niters = 2\nsigma = 9.5\n";
  }
  const std::string input = saved(make_icosphere(3), "cfg.off");
  const Run r = cli("train " + input + " -o " + path_of("cfg.mdld") + " --config \"" +
                    cfg.string() + "\" --sigma 1.5 --report-json " + path_of("cfg.json"));
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(workdir() / "cfg.json"));
  CHECK(report["training"]["atoms"] == 8);
  CHECK(report["training"]["residual_history"].size() == 2);
  const Dictionary d = load_dictionary(workdir() / "cfg.mdld");
  CHECK(d.atom_count() == 8);
}

TEST_CASE("cli fill-only and fill-holes") {
  const Submesh holed = testing::sphere_with_cap(3, 20);
  const std::string input = saved(holed.mesh, "fill_in.off");
  Run r = cli("inpaint " + input + " --fill-only -o " + path_of("fill_a.off"));
  REQUIRE(r.code == 0);
  r = cli("fill-holes " + input + " -o " + path_of("fill_b.off"));
  REQUIRE(r.code == 0);
  const std::string a = slurp(workdir() / "fill_a.off");
  CHECK(a == slurp(workdir() / "fill_b.off"));
  CHECK(r.out.find("training") == std::string::npos);
  CHECK(load_mesh(workdir() / "fill_b.off").num_boundary_halfedges() == 0);
}

TEST_CASE("cli reports when there is nothing to fill") {
  const Run r = cli("inpaint " + saved(make_icosphere(2), "whole.off") + " -o " +
                    path_of("whole_out.off"));
  CHECK(r.code == 0);
  CHECK(r.out.find("no holes found") != std::string::npos);
}

TEST_CASE("cli direct mode warns about large holes") {
  const Submesh holed = testing::grid_with_hole(25, 25, 7, 7, 10, 10);
  const Run r = cli("inpaint " + saved(holed.mesh, "big_hole.off") + " -o " +
                    path_of("big_out.off") + " --mode direct --all-vertex-seeds --sigma 1.5");
  CHECK((r.code == 0 || r.code == 3));
  CHECK(r.err.find("adaptive") != std::string::npos);
}

TEST_CASE("cli denoise") {
  const Mesh plane = make_grid(16, 16);
  const std::string input = saved(add_normal_noise(plane, 0.1, 5), "noisy_plane.off");
  const Run r = cli("denoise " + input + " -o " + path_of("denoised.off") + " --mode direct");
  REQUIRE(r.code == 0);
  const Mesh out = load_mesh(workdir() / "denoised.off");
  const Mesh in = load_mesh(workdir() / "noisy_plane.off");
  CHECK(plane_deviation(out.positions(), Vec3::Zero(), Vec3::UnitZ()).rms <
        plane_deviation(in.positions(), Vec3::Zero(), Vec3::UnitZ()).rms);
  const fs::path empty = workdir() / "empty.off";
  {
    std::ofstream o(empty);
    o << "OFF\n0 0 0\n";
  }
  CHECK(cli("denoise \"" + empty.string() + "\" -o " + path_of("e.off")).code != 0);
}
