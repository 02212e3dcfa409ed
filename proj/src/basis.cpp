#include "dlinpaint/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dlinpaint/error.hpp"

namespace dlinpaint {

namespace {

int grid_side(int m) {
  if (m < 1) return -1;
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  return side * side == m ? side : -1;
}

}  // namespace

const char* to_string(BasisKind kind) noexcept {
  return kind == BasisKind::gaussian ? "gaussian" : "cosine";
}

BasisKind basis_kind_from_string(const std::string& name) {
  if (name == "gaussian") return BasisKind::gaussian;
  if (name == "cosine") return BasisKind::cosine;
  throw Error(ErrorKind::invalid_argument, "unknown basis kind '" + name + "'");
}

BasisSet BasisSet::make(BasisKind kind, int m_basis, double domain_radius) {
  const int side = grid_side(m_basis);
  if (side < 0) {
    throw Error(ErrorKind::invalid_argument,
                "basis size " + std::to_string(m_basis) + " is not a positive perfect square");
  }
  if (!(domain_radius > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "basis domain radius must be > 0");
  }
  std::vector<double> params;
  if (kind == BasisKind::gaussian) {
    const double spacing = side > 1 ? 2.0 * domain_radius / (side - 1) : 2.0 * domain_radius;
    params.push_back(spacing);
    for (int row = 0; row < side; ++row) {
      for (int col = 0; col < side; ++col) {
        const double cx = side > 1 ? -domain_radius + spacing * row : 0.0;
        const double cy = side > 1 ? -domain_radius + spacing * col : 0.0;
        params.push_back(cx);
        params.push_back(cy);
      }
    }
  } else {
    for (int k = 0; k < side; ++k) {
      for (int l = 0; l < side; ++l) {
        params.push_back(k);
        params.push_back(l);
      }
    }
  }
  return from_parameters(kind, m_basis, domain_radius, std::move(params));
}

BasisSet BasisSet::from_parameters(BasisKind kind, int m_basis, double domain_radius,
                                   std::vector<double> parameters) {
  const std::size_t expected = kind == BasisKind::gaussian ? 1 + 2 * static_cast<std::size_t>(m_basis)
                                                           : 2 * static_cast<std::size_t>(m_basis);
  if (m_basis < 1 || parameters.size() != expected || !(domain_radius > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "inconsistent basis parameters");
  }
  BasisSet b;
  b.kind_ = kind;
  b.m_ = m_basis;
  b.radius_ = domain_radius;
  b.params_ = std::move(parameters);
  return b;
}

double BasisSet::evaluate(int j, double u, double v) const {
  if (kind_ == BasisKind::gaussian) {
    const double w = params_[0];
    const double du = u - params_[1 + 2 * j];
    const double dv = v - params_[2 + 2 * j];
    return std::exp(-(du * du + dv * dv) / (2.0 * w * w));
  }
  const double k = params_[2 * j];
  const double l = params_[2 * j + 1];
  const double scale = std::numbers::pi / (2.0 * radius_);
  return std::cos(k * scale * (u + radius_)) * std::cos(l * scale * (v + radius_));
}

SampledBasis sample_basis(const BasisSet& basis,
                          const Eigen::Matrix<double, Eigen::Dynamic, 2>& uv) {
  const Eigen::Index n = uv.rows();
  if (n == 0) throw Error(ErrorKind::invalid_argument, "sample_basis: empty patch");
  const double r = basis.domain_radius();
  SampledBasis out;
  out.phi.resize(n, basis.size());
  int clipped = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double u = uv(i, 0);
    double v = uv(i, 1);
    const double len = std::hypot(u, v);
    if (len > r) {
      u *= r / len;
      v *= r / len;
      ++clipped;
    }
    for (int j = 0; j < basis.size(); ++j) out.phi(i, j) = basis.evaluate(j, u, v);
  }
  if (clipped > 0) {
    warn("sample_basis: " + std::to_string(clipped) +
         " sample(s) outside the basis domain clipped to its boundary");
  }
  return out;
}

SampledBasis sample_basis(const BasisSet& basis, const HeightMapSignal& signal) {
  return sample_basis(basis, signal.uv);
}

}  // namespace dlinpaint
