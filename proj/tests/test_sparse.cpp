#include <doctest.h>

#include <Eigen/QR>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

#include "dlinpaint/basis.hpp"
#include "dlinpaint/dictionary.hpp"
#include "dlinpaint/error.hpp"
#include "dlinpaint/frames.hpp"
#include "dlinpaint/ksvd.hpp"
#include "dlinpaint/primitives.hpp"
#include "dlinpaint/pursuit.hpp"
#include "dlinpaint/sampling.hpp"
#include "support.hpp"

using namespace dlinpaint;
using UV = Eigen::Matrix<double, Eigen::Dynamic, 2>;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::infeasible;
}

UV random_disk(int n, double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  UV uv(n, 2);
  for (int i = 0; i < n; ++i) {
    const double rr = r * std::sqrt(u(rng));
    const double a = 2 * std::numbers::pi * u(rng);
    uv(i, 0) = rr * std::cos(a);
    uv(i, 1) = rr * std::sin(a);
  }
  return uv;
}

Eigen::MatrixXd random_orthonormal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < G.size(); ++i) G(i) = g(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
}

std::vector<TrainingPatch> surface_signals(const Mesh& m, double sigma, BasisSet* basis_out) {
  const SeedSet s = farthest_point_sampling(m, default_seed_count(m.num_vertices()));
  const double r = compute_patch_radius(m, RadiusMode::sampled, &s, sigma);
  const BasisSet basis = BasisSet::make(BasisKind::cosine, 16, r);
  const auto normals = vertex_normals(m);
  std::vector<TrainingPatch> out;
  for (const Patch& p : build_patches(m, s.seeds, r)) {
    const HeightMapSignal hm = to_height_map(m, p, build_frame(m, normals, p));
    out.push_back({hm.z, sample_basis(basis, hm).phi});
  }
  *basis_out = basis;
  return out;
}

bool non_increasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] > h[i - 1] + 1e-9) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("cosine DC term is constant") {
  const BasisSet b = BasisSet::make(BasisKind::cosine, 16, 2.0);
  CHECK(b.size() == 16);
  std::mt19937_64 rng(1);
  const UV uv = random_disk(50, 2.0, rng);
  for (int i = 0; i < uv.rows(); ++i) CHECK(b.evaluate(0, uv(i, 0), uv(i, 1)) == 1.0);
}

TEST_CASE("cosine functions match the separable formula") {
  const double r = 1.5;
  const BasisSet b = BasisSet::make(BasisKind::cosine, 16, r);
  for (int j = 0; j < 16; ++j) {
    const int k = j / 4, l = j % 4;
    for (double u : {-1.0, -0.3, 0.0, 0.8}) {
      for (double v : {-0.9, 0.1, 0.6}) {
        const double expect = std::cos(std::numbers::pi * k * (u + r) / (2 * r)) *
                              std::cos(std::numbers::pi * l * (v + r) / (2 * r));
        CHECK(b.evaluate(j, u, v) == doctest::Approx(expect).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("gaussian functions peak at their own centre") {
  const BasisSet b = BasisSet::make(BasisKind::gaussian, 16, 1.0);
  const auto& p = b.parameters();
  REQUIRE(p.size() == 1 + 2 * 16);
  for (int j = 0; j < 16; ++j) {
    const double cx = p[1 + 2 * j], cy = p[2 + 2 * j];
    CHECK(b.evaluate(j, cx, cy) == doctest::Approx(1.0));
    for (double dx : {-0.05, 0.05}) {
      CHECK(b.evaluate(j, cx + dx, cy) < 1.0);
      CHECK(b.evaluate(j, cx, cy + dx) < 1.0);
    }
    for (int i = 0; i < 16; ++i) {
      if (i != j) CHECK(b.evaluate(j, cx, cy) > b.evaluate(j, p[1 + 2 * i], p[2 + 2 * i]));
    }
  }
}

TEST_CASE("basis size must be a perfect square") {
  CHECK(kind_of([] { BasisSet::make(BasisKind::cosine, 15, 1.0); }) ==
        ErrorKind::invalid_argument);
  CHECK(kind_of([] { BasisSet::make(BasisKind::gaussian, 0, 1.0); }) ==
        ErrorKind::invalid_argument);
  CHECK(kind_of([] { BasisSet::make(BasisKind::cosine, 16, 0.0); }) ==
        ErrorKind::invalid_argument);
  CHECK(basis_kind_from_string("gaussian") == BasisKind::gaussian);
  CHECK(kind_of([] { basis_kind_from_string("wavelet"); }) == ErrorKind::invalid_argument);
}

TEST_CASE("gaussian sampled at its centres is diagonally dominant") {
  const BasisSet b = BasisSet::make(BasisKind::gaussian, 16, 1.0);
  const auto& p = b.parameters();
  UV uv(16, 2);
  for (int j = 0; j < 16; ++j) {
    // Centres on the square corners lie outside the disk; scale them in.
    uv(j, 0) = 0.7 * p[1 + 2 * j];
    uv(j, 1) = 0.7 * p[2 + 2 * j];
  }
  UV centres(16, 2);
  for (int j = 0; j < 16; ++j) {
    centres(j, 0) = p[1 + 2 * j];
    centres(j, 1) = p[2 + 2 * j];
  }
  // Direct evaluation at the centres (no clipping) shows the dominance.
  Eigen::MatrixXd phi(16, 16);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) phi(i, j) = b.evaluate(j, centres(i, 0), centres(i, 1));
  }
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      if (i != j) CHECK(phi(i, i) > phi(i, j));
    }
  }
  // sample_basis agrees with direct evaluation inside the disk.
  const Eigen::MatrixXd sampled = sample_basis(b, uv).phi;
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) CHECK(sampled(i, j) == b.evaluate(j, uv(i, 0), uv(i, 1)));
  }
}

TEST_CASE("constant cosine column and one-row sampling") {
  const BasisSet b = BasisSet::make(BasisKind::cosine, 9, 1.0);
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd phi = sample_basis(b, random_disk(30, 1.0, rng)).phi;
  CHECK(phi.rows() == 30);
  CHECK(phi.cols() == 9);
  CHECK((phi.col(0).array() == 1.0).all());
  UV one(1, 2);
  one << 0.2, -0.1;
  CHECK(sample_basis(b, one).phi.rows() == 1);
  CHECK(kind_of([&] { sample_basis(b, UV(0, 2)); }) == ErrorKind::invalid_argument);
}

TEST_CASE("samples outside the disk are clipped with a warning") {
  testing::WarningCapture warnings;
  const BasisSet b = BasisSet::make(BasisKind::cosine, 16, 1.0);
  UV uv(2, 2);
  uv << 3.0, 4.0, 0.6, 0.8;
  const Eigen::MatrixXd phi = sample_basis(b, uv).phi;
  CHECK((phi.row(0) - phi.row(1)).norm() < 1e-12);
  CHECK(warnings.any("sample_basis"));
}

TEST_CASE("sampled atoms match pointwise atom evaluation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (BasisKind kind : {BasisKind::cosine, BasisKind::gaussian}) {
    Dictionary d;
    d.basis = BasisSet::make(kind, 16, 1.3);
    d.coefficients.resize(16, 10);
    for (int i = 0; i < d.coefficients.size(); ++i) d.coefficients(i) = g(rng);
    d.coefficients.colwise().normalize();
    const UV uv = random_disk(25, 1.3, rng);
    const Eigen::MatrixXd D = d.sampled(sample_basis(d.basis, uv));
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(10);
    alpha(2) = 0.7;
    alpha(7) = -1.1;
    const Eigen::VectorXd via_matrix = D * alpha;
    for (int i = 0; i < 25; ++i) {
      const double pointwise =
          0.7 * d.evaluate_atom(2, uv(i, 0), uv(i, 1)) - 1.1 * d.evaluate_atom(7, uv(i, 0), uv(i, 1));
      CHECK(via_matrix(i) == doctest::Approx(pointwise).epsilon(1e-12));
    }
  }
}

TEST_CASE("OMP on the identity") {
  const SparseCode c = orthogonal_matching_pursuit(Eigen::Vector2d(3, 0),
                                                   Eigen::MatrixXd::Identity(2, 2), 1, 0.0);
  CHECK(c.alpha == Eigen::Vector2d(3, 0));
  CHECK(c.residual_norm == 0.0);
  CHECK(c.support == std::vector<int>{0});
}

TEST_CASE("OMP of zero is empty") {
  std::mt19937_64 rng(6);
  const SparseCode c = orthogonal_matching_pursuit(Eigen::VectorXd::Zero(8),
                                                   random_orthonormal(8, rng), 3, 1e-12);
  CHECK(c.support.empty());
  CHECK(c.alpha.isZero());
  CHECK(c.residual_norm == 0.0);
}

TEST_CASE("OMP recovers 3-sparse codes in an orthonormal dictionary") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const Eigen::MatrixXd D = random_orthonormal(8, rng);
    std::vector<int> idx(8);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::VectorXd a0 = Eigen::VectorXd::Zero(8);
    for (int k = 0; k < 3; ++k) a0(idx[k]) = 0.5 + k;
    const SparseCode c = orthogonal_matching_pursuit(D * a0, D, 3, 0.0);
    CHECK((c.alpha - a0).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(c.sparsity() == 3);
  }
}

TEST_CASE("OMP residual decreases and atoms are never repeated") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 30; ++t) {
    Eigen::MatrixXd D(12, 20);
    for (int i = 0; i < D.size(); ++i) D(i) = g(rng);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y(i) = g(rng);
    double prev = y.norm();
    for (int L = 1; L <= 12; ++L) {
      const SparseCode c = orthogonal_matching_pursuit(y, D, L, 0.0);
      CHECK(c.residual_norm <= prev + 1e-12);
      CHECK(c.residual_norm == doctest::Approx((y - D * c.alpha).norm()).epsilon(1e-9));
      prev = c.residual_norm;
      std::vector<int> s = c.support;
      std::sort(s.begin(), s.end());
      CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
      CHECK(c.sparsity() <= L);
      for (Eigen::Index j = 0; j < c.alpha.size(); ++j) {
        if (!std::binary_search(s.begin(), s.end(), static_cast<int>(j))) CHECK(c.alpha(j) == 0.0);
      }
    }
  }
}

TEST_CASE("full-budget OMP equals least squares") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd D(15, 6);
    for (int i = 0; i < D.size(); ++i) D(i) = g(rng);
    Eigen::VectorXd y(15);
    for (int i = 0; i < 15; ++i) y(i) = g(rng);
    const SparseCode c = orthogonal_matching_pursuit(y, D, 6, 0.0);
    const Eigen::VectorXd x = D.colPivHouseholderQr().solve(y);
    CHECK(std::abs(c.residual_norm - (y - D * x).norm()) <= 1e-8);
  }
}

TEST_CASE("OMP stops at the tolerance") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(4, 4);
  const SparseCode c = orthogonal_matching_pursuit(Eigen::Vector4d(5, 0.01, 0, 0), D, 4, 0.1);
  CHECK(c.support == std::vector<int>{0});
}

TEST_CASE("OMP ties go to the lowest atom") {
  Eigen::MatrixXd D(2, 3);
  D << 1, 0, 1, 0, 1, 0;
  const SparseCode c = orthogonal_matching_pursuit(Eigen::Vector2d(1, 1), D, 1, 0.0);
  CHECK(c.support == std::vector<int>{0});
}

TEST_CASE("OMP skips zero columns and rejects an all-zero dictionary") {
  Eigen::MatrixXd D(3, 3);
  D << 0, 1, 0, 0, 0, 1, 0, 0, 0;
  const SparseCode c = orthogonal_matching_pursuit(Eigen::Vector3d(2, 3, 0), D, 3, 0.0);
  CHECK(c.alpha(0) == 0.0);
  CHECK(c.alpha(1) == doctest::Approx(2.0));
  CHECK(c.alpha(2) == doctest::Approx(3.0));
  CHECK(kind_of([] {
          orthogonal_matching_pursuit(Eigen::Vector3d(1, 0, 0), Eigen::MatrixXd::Zero(3, 2), 1, 0.0);
        }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] {
          orthogonal_matching_pursuit(Eigen::Vector3d(1, 0, 0), Eigen::MatrixXd::Identity(3, 3), 0, 0.0);
        }) == ErrorKind::invalid_argument);
}

TEST_CASE("masked OMP ignores unknown rows") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  Eigen::MatrixXd D(10, 6);
  for (int i = 0; i < D.size(); ++i) D(i) = g(rng);
  Eigen::VectorXd a0 = Eigen::VectorXd::Zero(6);
  a0(1) = 1.5;
  a0(4) = -0.7;
  Eigen::VectorXd y = D * a0;
  std::vector<char> known(10, 1);
  for (int i : {2, 5, 8}) {
    known[i] = 0;
    y(i) = 1e6;  // garbage on unknown rows
  }
  const SparseCode c = masked_orthogonal_matching_pursuit(y, D, known, 2, 0.0);
  CHECK((c.alpha - a0).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(c.residual_norm <= 1e-9);
}

TEST_CASE("masked OMP budget drops to the known rows") {
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(5, 5);
  const std::vector<char> known{1, 0, 1, 0, 0};
  const SparseCode c =
      masked_orthogonal_matching_pursuit(Eigen::VectorXd::Ones(5), D, known, 4, 0.0);
  CHECK(c.sparsity() <= 2);
  const std::vector<char> none(5, 0);
  CHECK(kind_of([&] {
          masked_orthogonal_matching_pursuit(Eigen::VectorXd::Ones(5), D, none, 2, 0.0);
        }) == ErrorKind::invalid_argument);
}

TEST_CASE("all-known masked OMP equals plain OMP") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Eigen::MatrixXd D(9, 12);
  for (int i = 0; i < D.size(); ++i) D(i) = g(rng);
  Eigen::VectorXd y(9);
  for (int i = 0; i < 9; ++i) y(i) = g(rng);
  const std::vector<char> known(9, 1);
  const SparseCode a = orthogonal_matching_pursuit(y, D, 4, 1e-6);
  const SparseCode b = masked_orthogonal_matching_pursuit(y, D, known, 4, 1e-6);
  CHECK(a.support == b.support);
  CHECK((a.alpha - b.alpha).norm() <= 1e-12);
}

TEST_CASE("dictionary round trip is bitwise") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (BasisKind kind : {BasisKind::cosine, BasisKind::gaussian}) {
    Dictionary d;
    d.basis = BasisSet::make(kind, 16, 0.37);
    d.coefficients.resize(16, 32);
    for (int i = 0; i < d.coefficients.size(); ++i) d.coefficients(i) = g(rng);
    d.seeds = {4, 8, 15, 16, 23, 42};
    std::stringstream buf;
    write_dictionary(d, buf);
    const Dictionary back = read_dictionary(buf);
    CHECK(back.basis.kind() == kind);
    CHECK(back.basis.size() == 16);
    CHECK(back.basis.domain_radius() == 0.37);
    CHECK(back.basis.parameters() == d.basis.parameters());
    CHECK(std::memcmp(back.coefficients.data(), d.coefficients.data(),
                      sizeof(double) * d.coefficients.size()) == 0);
    CHECK(back.seeds == d.seeds);
  }
}

TEST_CASE("dictionary file header") {
  Dictionary d;
  d.basis = BasisSet::make(BasisKind::cosine, 4, 1.0);
  d.coefficients = Eigen::MatrixXd::Identity(4, 3);
  std::stringstream buf;
  write_dictionary(d, buf);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "MDLD");
  std::uint32_t version = 0;
  std::memcpy(&version, bytes.data() + 4, 4);
  CHECK(version == kDictionaryVersion);
  CHECK(bytes[8] == 1);

  SUBCASE("truncated") {
    std::stringstream cut(bytes.substr(0, bytes.size() - 5));
    CHECK(kind_of([&] { read_dictionary(cut); }) == ErrorKind::parse);
  }
  SUBCASE("wrong magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    std::stringstream in(bad);
    CHECK(kind_of([&] { read_dictionary(in); }) == ErrorKind::parse);
  }
  SUBCASE("version mismatch") {
    std::string bad = bytes;
    bad[4] = 9;
    std::stringstream in(bad);
    CHECK(kind_of([&] { read_dictionary(in); }) == ErrorKind::parse);
  }
}

TEST_CASE("dictionary files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "dlinpaint_unit";
  std::filesystem::create_directories(dir);
  Dictionary d;
  d.basis = BasisSet::make(BasisKind::gaussian, 9, 2.0);
  d.coefficients = Eigen::MatrixXd::Identity(9, 4);
  save_dictionary(d, dir / "d.mdld");
  CHECK(load_dictionary(dir / "d.mdld").coefficients == d.coefficients);
  CHECK(kind_of([&] { load_dictionary(dir / "none.mdld"); }) == ErrorKind::io);
  CHECK(kind_of([&] { save_dictionary(d, dir / "no" / "dir" / "d.mdld"); }) == ErrorKind::io);
}

TEST_CASE("single flat patch cannot seed an atom") {
  const BasisSet b = BasisSet::make(BasisKind::cosine, 16, 1.0);
  std::mt19937_64 rng(13);
  const UV uv = random_disk(20, 1.0, rng);
  const std::vector<TrainingPatch> flat{{Eigen::VectorXd::Zero(20), sample_basis(b, uv).phi}};
  CHECK(kind_of([&] { init_dictionary(flat, b, 1, 1); }) == ErrorKind::infeasible);
  CHECK(kind_of([&] { init_dictionary(flat, b, 2, 1); }) == ErrorKind::invalid_argument);
}

TEST_CASE("initial atoms are unit norm and deterministic") {
  const Mesh m = add_normal_noise(make_icosphere(3), 0.01, 2);
  BasisSet basis = BasisSet::make(BasisKind::cosine, 16, 1.0);
  const auto signals = surface_signals(m, 1.5, &basis);
  const Dictionary a = init_dictionary(signals, basis, 24, 99);
  const Dictionary b = init_dictionary(signals, basis, 24, 99);
  const Dictionary c = init_dictionary(signals, basis, 24, 100);
  for (int i = 0; i < 24; ++i) CHECK(a.coefficients.col(i).norm() == doctest::Approx(1.0));
  CHECK(a.coefficients == b.coefficients);
  CHECK(a.coefficients != c.coefficients);
}

TEST_CASE("rank-one data yields the generating atom") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g;
  const BasisSet b = BasisSet::make(BasisKind::cosine, 16, 1.0);
  Eigen::VectorXd dir(16);
  for (int i = 0; i < 16; ++i) dir(i) = g(rng);
  dir.normalize();
  std::vector<TrainingPatch> signals;
  for (int p = 0; p < 40; ++p) {
    const Eigen::MatrixXd phi = sample_basis(b, random_disk(30, 1.0, rng)).phi;
    signals.push_back({(0.5 + p * 0.1) * (phi * dir), phi});
  }
  KsvdOptions opt;
  opt.atoms = 4;
  opt.iterations = 5;
  const KsvdResult res = ksvd_train(signals, b, opt);
  const double best = (dir.transpose() * res.dictionary.coefficients).cwiseAbs().maxCoeff();
  CHECK(best >= 0.999);
}

TEST_CASE("K-SVD residual history is non-increasing with unit atoms") {
  BasisSet basis = BasisSet::make(BasisKind::cosine, 16, 1.0);
  for (const Mesh& m : {add_normal_noise(make_icosphere(3), 0.02, 3),
                        make_cylinder(1.0, 3.0, 24, 12)}) {
    const auto signals = surface_signals(m, 1.5, &basis);
    KsvdOptions opt;
    opt.atoms = 16;
    opt.iterations = 10;
    const KsvdResult res = ksvd_train(signals, basis, opt);
    CHECK(res.residual_history.size() == 10);
    CHECK(non_increasing(res.residual_history));
    for (int i = 0; i < res.dictionary.atom_count(); ++i) {
      CHECK(res.dictionary.coefficients.col(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(res.codes.size() == signals.size());
    for (const SparseCode& c : res.codes) CHECK(c.sparsity() <= opt.sparsity);
  }
}

TEST_CASE("K-SVD serial and parallel agree") {
  BasisSet basis = BasisSet::make(BasisKind::cosine, 16, 1.0);
  const auto signals = surface_signals(add_normal_noise(make_icosphere(3), 0.02, 4), 1.5, &basis);
  KsvdOptions opt;
  opt.atoms = 12;
  opt.iterations = 4;
  opt.execution = Execution::serial;
  const KsvdResult a = ksvd_train(signals, basis, opt);
  opt.execution = Execution::parallel;
  const KsvdResult b = ksvd_train(signals, basis, opt);
  CHECK(a.dictionary.coefficients == b.dictionary.coefficients);
  CHECK(a.residual_history == b.residual_history);
}

TEST_CASE("K-SVD argument checks") {
  const BasisSet b = BasisSet::make(BasisKind::cosine, 16, 1.0);
  CHECK(kind_of([&] { ksvd_train({}, b, KsvdOptions{}); }) == ErrorKind::invalid_argument);
  std::mt19937_64 rng(15);
  const Eigen::MatrixXd phi = sample_basis(b, random_disk(10, 1.0, rng)).phi;
  const std::vector<TrainingPatch> flat(3, TrainingPatch{Eigen::VectorXd::Zero(10), phi});
  Dictionary d;
  d.basis = b;
  d.coefficients = Eigen::MatrixXd::Identity(16, 2);
  CHECK(kind_of([&] { ksvd_train(flat, d, KsvdOptions{}); }) == ErrorKind::infeasible);
  KsvdOptions zero;
  zero.iterations = 0;
  const std::vector<TrainingPatch> one{{Eigen::VectorXd::Ones(10), phi}};
  CHECK(kind_of([&] { ksvd_train(one, d, zero); }) == ErrorKind::invalid_argument);
}

TEST_CASE("unused atoms are re-seeded") {
  std::mt19937_64 rng(16);
  const BasisSet b = BasisSet::make(BasisKind::cosine, 16, 1.0);
  std::vector<TrainingPatch> signals;
  for (int p = 0; p < 10; ++p) {
    const Eigen::MatrixXd phi = sample_basis(b, random_disk(30, 1.0, rng)).phi;
    Eigen::VectorXd a = Eigen::VectorXd::Zero(16);
    a(1) = 1.0 + 0.1 * p;
    signals.push_back({phi * a, phi});
  }
  Dictionary d;
  d.basis = b;
  d.coefficients = Eigen::MatrixXd::Zero(16, 3);
  d.coefficients(1, 0) = 1.0;
  d.coefficients(15, 1) = 1.0;  // matches nothing
  d.coefficients(14, 2) = 1.0;  // matches nothing
  KsvdOptions opt;
  opt.atoms = 3;
  opt.sparsity = 1;
  opt.iterations = 3;
  const KsvdResult res = ksvd_train(signals, d, opt);
  CHECK(res.reinitialized_atoms >= 1);
  CHECK(non_increasing(res.residual_history));
}
