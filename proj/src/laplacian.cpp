#include "dlinpaint/laplacian.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "dlinpaint/error.hpp"

namespace dlinpaint {

namespace {

double clamped_cotangent(const Vec3& a, const Vec3& b, int& clamped) {
  const double cos_term = a.dot(b);
  const double sin_term = a.cross(b).norm();
  double cot = 0.0;
  if (sin_term > 0.0) {
    cot = cos_term / sin_term;
  } else {
    cot = cos_term >= 0.0 ? kCotangentClamp : -kCotangentClamp;
  }
  if (!(std::abs(cot) <= kCotangentClamp)) {
    ++clamped;
    cot = std::clamp(cot, -kCotangentClamp, kCotangentClamp);
  }
  return cot;
}

}  // namespace

LaplacianMatrix cotangent_laplacian(const Mesh& mesh, int order) {
  if (order != 1 && order != 2) {
    throw Error(ErrorKind::invalid_argument,
                "Laplacian order must be 1 or 2, got " + std::to_string(order));
  }
  const int n = mesh.num_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_faces()) * 12);
  int clamped = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& t = mesh.faces()[f];
    for (int c = 0; c < 3; ++c) {
      const int i = t[(c + 1) % 3];
      const int j = t[(c + 2) % 3];
      const Vec3& apex = mesh.position(t[c]);
      const double w =
          0.5 * clamped_cotangent(mesh.position(i) - apex, mesh.position(j) - apex, clamped);
      triplets.emplace_back(i, j, w);
      triplets.emplace_back(j, i, w);
      triplets.emplace_back(i, i, -w);
      triplets.emplace_back(j, j, -w);
    }
  }
  if (clamped > 0) {
    warn("cotangent Laplacian: clamped " + std::to_string(clamped) +
         " cotangent(s) of near-degenerate triangles");
  }
  LaplacianMatrix result;
  result.order = order;
  result.matrix.resize(n, n);
  result.matrix.setFromTriplets(triplets.begin(), triplets.end());
  if (order == 2) {
    Eigen::SparseMatrix<double> squared = result.matrix * result.matrix;
    result.matrix = std::move(squared);
  }
  result.matrix.makeCompressed();
  return result;
}

}  // namespace dlinpaint
