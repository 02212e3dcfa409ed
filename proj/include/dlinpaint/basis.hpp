#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dlinpaint/frames.hpp"

namespace dlinpaint {

enum class BasisKind : std::uint8_t { gaussian = 0, cosine = 1 };

const char* to_string(BasisKind kind) noexcept;
BasisKind basis_kind_from_string(const std::string& name);

/// Continuous 2D basis on the disk of radius `domain_radius`.
///
/// Both kinds lay out sqrt(m) x sqrt(m) functions on a grid over
/// [-r, r]^2, function index j = row * sqrt(m) + col:
///   gaussian: exp(-|x - c_j|^2 / (2 w^2)), centres on an evenly spaced grid
///             including the corners, w = grid spacing;
///   cosine:   cos(pi k (u + r) / 2r) * cos(pi l (v + r) / 2r),
///             k, l in 0 .. sqrt(m) - 1.
class BasisSet {
 public:
  /// Throws invalid_argument if m is not a positive perfect square or r <= 0.
  static BasisSet make(BasisKind kind, int m_basis, double domain_radius);

  /// Rebuilds a basis from serialized parameters (see parameters()).
  static BasisSet from_parameters(BasisKind kind, int m_basis, double domain_radius,
                                  std::vector<double> parameters);

  BasisKind kind() const { return kind_; }
  int size() const { return m_; }
  double domain_radius() const { return radius_; }

  /// gaussian: {width, cx_0, cy_0, cx_1, cy_1, ...};
  /// cosine:   {k_0, l_0, k_1, l_1, ...}.
  const std::vector<double>& parameters() const { return params_; }

  double evaluate(int j, double u, double v) const;

 private:
  BasisKind kind_ = BasisKind::cosine;
  int m_ = 0;
  double radius_ = 1.0;
  std::vector<double> params_;
};

/// Phi_x: basis functions evaluated at the patch's uv samples (rows).
struct SampledBasis {
  Eigen::MatrixXd phi;
};

/// uv samples outside the basis disk are clipped radially onto its boundary
/// (with a warning). Throws invalid_argument for an empty signal.
SampledBasis sample_basis(const BasisSet& basis, const HeightMapSignal& signal);
SampledBasis sample_basis(const BasisSet& basis,
                          const Eigen::Matrix<double, Eigen::Dynamic, 2>& uv);

}  // namespace dlinpaint
