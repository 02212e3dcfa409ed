#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "dlinpaint/basis.hpp"

namespace dlinpaint {

/// Continuous dictionary: atom i is the function sum_j A(j, i) Phi_j, so on
/// a patch with sampled basis Phi_x the discrete dictionary is Phi_x A.
struct Dictionary {
  BasisSet basis;
  Eigen::MatrixXd coefficients;  // m_basis x n_atoms, unit-norm columns
  std::vector<int> seeds;        // training seeds, may be empty

  int atom_count() const { return static_cast<int>(coefficients.cols()); }
  Eigen::MatrixXd sampled(const SampledBasis& sb) const { return sb.phi * coefficients; }
  double evaluate_atom(int atom, double u, double v) const;
};

/// Binary layout, all little-endian:
///   "MDLD" | version u32 | kind u8 | m_basis u32 | n_atoms u32 | radius f64
///   | param_count u32 | params f64[param_count]
///   | A f64[m_basis * n_atoms] (row-major) | seed_count u32 | seeds u32[]
inline constexpr std::uint32_t kDictionaryVersion = 1;

void write_dictionary(const Dictionary& dict, std::ostream& out);
Dictionary read_dictionary(std::istream& in);
void save_dictionary(const Dictionary& dict, const std::filesystem::path& path);
Dictionary load_dictionary(const std::filesystem::path& path);

}  // namespace dlinpaint
