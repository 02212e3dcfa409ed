#include "dlinpaint/dictionary.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "dlinpaint/error.hpp"

namespace dlinpaint {

namespace {

constexpr std::array<char, 4> kMagic = {'M', 'D', 'L', 'D'};

template <class T>
void put(std::ostream& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw Error(ErrorKind::parse, "dictionary file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

double Dictionary::evaluate_atom(int atom, double u, double v) const {
  double value = 0.0;
  for (int j = 0; j < basis.size(); ++j) value += coefficients(j, atom) * basis.evaluate(j, u, v);
  return value;
}

void write_dictionary(const Dictionary& dict, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kDictionaryVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(dict.basis.kind()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dict.basis.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dict.atom_count()));
  put<double>(out, dict.basis.domain_radius());
  const auto& params = dict.basis.parameters();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (double p : params) put<double>(out, p);
  for (Eigen::Index r = 0; r < dict.coefficients.rows(); ++r) {
    for (Eigen::Index c = 0; c < dict.coefficients.cols(); ++c) put<double>(out, dict.coefficients(r, c));
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(dict.seeds.size()));
  for (int s : dict.seeds) put<std::uint32_t>(out, static_cast<std::uint32_t>(s));
}

Dictionary read_dictionary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size())) throw Error(ErrorKind::parse, "dictionary file truncated");
  if (magic != kMagic) throw Error(ErrorKind::parse, "not a dictionary file (bad magic bytes)");
  const auto version = get<std::uint32_t>(in);
  if (version != kDictionaryVersion) {
    throw Error(ErrorKind::parse, "unsupported dictionary version " + std::to_string(version) +
                                      " (expected " + std::to_string(kDictionaryVersion) + ")");
  }
  const auto kind_byte = get<std::uint8_t>(in);
  if (kind_byte > 1) throw Error(ErrorKind::parse, "unknown basis kind in dictionary file");
  const auto kind = static_cast<BasisKind>(kind_byte);
  const auto m = get<std::uint32_t>(in);
  const auto atoms = get<std::uint32_t>(in);
  const auto radius = get<double>(in);
  const auto param_count = get<std::uint32_t>(in);
  if (m == 0 || m > (1u << 16) || atoms > (1u << 20) || param_count > 2 * m + 1) {
    throw Error(ErrorKind::parse, "dictionary header out of range");
  }
  std::vector<double> params(param_count);
  for (double& p : params) p = get<double>(in);

  Dictionary dict;
  try {
    dict.basis = BasisSet::from_parameters(kind, static_cast<int>(m), radius, std::move(params));
  } catch (const Error& e) {
    throw Error(ErrorKind::parse, std::string("dictionary basis: ") + e.what());
  }
  dict.coefficients.resize(m, atoms);
  for (std::uint32_t r = 0; r < m; ++r) {
    for (std::uint32_t c = 0; c < atoms; ++c) dict.coefficients(r, c) = get<double>(in);
  }
  const auto seed_count = get<std::uint32_t>(in);
  dict.seeds.resize(seed_count);
  for (int& s : dict.seeds) s = static_cast<int>(get<std::uint32_t>(in));
  return dict;
}

void save_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  write_dictionary(dict, out);
  out.flush();
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  return read_dictionary(in);
}

}  // namespace dlinpaint
