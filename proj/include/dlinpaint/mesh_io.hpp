#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "dlinpaint/mesh.hpp"

namespace dlinpaint {

enum class MeshFormat { off, obj, ply };

enum class PlyEncoding { ascii, binary_little_endian };

/// Infers the format from the file extension (case-insensitive).
MeshFormat format_from_path(const std::filesystem::path& path);

/// Reads positions and triangles; other attributes are dropped with a warning.
/// Errors: io (cannot open), parse (malformed), validation (non-triangular
/// face, non-manifold edge, unrepairable orientation).
Mesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format = {});
Mesh read_mesh(std::istream& in, MeshFormat format);

/// Coordinates are written in shortest round-trip decimal form, so text
/// formats reload bit-exact and repeated saves are byte-identical.
void save_mesh(const Mesh& mesh, const std::filesystem::path& path,
               std::optional<MeshFormat> format = {},
               PlyEncoding encoding = PlyEncoding::ascii);
void write_mesh(const Mesh& mesh, std::ostream& out, MeshFormat format,
                PlyEncoding encoding = PlyEncoding::ascii);

}  // namespace dlinpaint
