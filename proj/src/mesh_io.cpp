#include "dlinpaint/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dlinpaint/error.hpp"

namespace dlinpaint {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::parse, what); }

[[noreturn]] void non_triangular(std::size_t face, std::size_t corners) {
  throw Error(ErrorKind::validation, "non-triangular face " + std::to_string(face) + " with " +
                                         std::to_string(corners) + " vertices");
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double to_double(std::string_view tok) {
  double value = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    parse_error("expected a number, got '" + std::string(tok) + "'");
  }
  return value;
}

long long to_integer(std::string_view tok) {
  long long value = 0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    parse_error("expected an integer, got '" + std::string(tok) + "'");
  }
  return value;
}

void append_double(std::string& out, double x) {
  char buf[32];
  auto result = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, result.ptr);
}

// ----------------------------------------------------------------------------
// OFF

Mesh read_off(std::istream& in) {
  // Collect whitespace tokens per non-comment line so trailing per-element
  // attributes (colours) can be detected and dropped.
  std::vector<std::vector<std::string_view>> lines;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string_view rest(text);
  while (!rest.empty()) {
    std::size_t eol = rest.find('\n');
    std::string_view line = rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  if (lines.empty()) parse_error("OFF: empty file");

  std::size_t li = 0;
  std::vector<std::string_view> header = lines[li++];
  std::string magic = std::string(header.front());
  if (magic.size() < 3 || magic.substr(magic.size() - 3) != "OFF") {
    parse_error("OFF: missing OFF header");
  }
  if (magic != "OFF") warn("OFF: " + magic + " attributes dropped");
  header.erase(header.begin());
  if (header.empty()) {
    if (li >= lines.size()) parse_error("OFF: missing element counts");
    header = lines[li++];
  }
  if (header.size() < 2) parse_error("OFF: malformed element counts");
  const long long nv = to_integer(header[0]);
  const long long nf = to_integer(header[1]);
  if (nv < 0 || nf < 0) parse_error("OFF: negative element count");

  bool dropped = false;
  std::vector<Vec3> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long long i = 0; i < nv; ++i) {
    if (li >= lines.size()) parse_error("OFF: truncated vertex list");
    const auto& toks = lines[li++];
    if (toks.size() < 3) parse_error("OFF: vertex " + std::to_string(i) + " has < 3 coordinates");
    dropped |= toks.size() > 3;
    vertices.emplace_back(to_double(toks[0]), to_double(toks[1]), to_double(toks[2]));
  }
  std::vector<Face> faces;
  faces.reserve(static_cast<std::size_t>(nf));
  for (long long i = 0; i < nf; ++i) {
    if (li >= lines.size()) parse_error("OFF: truncated face list");
    const auto& toks = lines[li++];
    const long long n = to_integer(toks[0]);
    if (n < 0 || static_cast<long long>(toks.size()) < n + 1) {
      parse_error("OFF: malformed face " + std::to_string(i));
    }
    if (n != 3) non_triangular(static_cast<std::size_t>(i), static_cast<std::size_t>(n));
    dropped |= toks.size() > 4;
    faces.push_back({static_cast<int>(to_integer(toks[1])), static_cast<int>(to_integer(toks[2])),
                     static_cast<int>(to_integer(toks[3]))});
  }
  if (dropped) warn("OFF: per-element attributes beyond positions/faces dropped");
  return Mesh(std::move(vertices), std::move(faces));
}

void write_off(const Mesh& mesh, std::ostream& out) {
  std::string s = "OFF\n";
  s += std::to_string(mesh.num_vertices()) + ' ' + std::to_string(mesh.num_faces()) + " 0\n";
  for (const Vec3& p : mesh.positions()) {
    append_double(s, p.x());
    s += ' ';
    append_double(s, p.y());
    s += ' ';
    append_double(s, p.z());
    s += '\n';
  }
  for (const Face& f : mesh.faces()) {
    s += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' + std::to_string(f[2]) +
         '\n';
  }
  out << s;
}

// ----------------------------------------------------------------------------
// OBJ

int obj_index(std::string_view tok, std::size_t nv) {
  const std::string_view head = tok.substr(0, tok.find('/'));
  const long long raw = to_integer(head);
  long long idx = raw > 0 ? raw - 1 : static_cast<long long>(nv) + raw;
  if (raw == 0 || idx < 0) parse_error("OBJ: invalid vertex index '" + std::string(tok) + "'");
  return static_cast<int>(idx);
}

Mesh read_obj(std::istream& in) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  bool dropped = false;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    auto toks = split_ws(view);
    if (toks.empty()) continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) parse_error("OBJ: vertex with < 3 coordinates");
      dropped |= toks.size() > 4;
      vertices.emplace_back(to_double(toks[1]), to_double(toks[2]), to_double(toks[3]));
    } else if (toks[0] == "f") {
      if (toks.size() != 4) non_triangular(faces.size(), toks.size() - 1);
      dropped |= toks[1].find('/') != std::string_view::npos;
      faces.push_back({obj_index(toks[1], vertices.size()), obj_index(toks[2], vertices.size()),
                       obj_index(toks[3], vertices.size())});
    } else {
      dropped = true;
    }
  }
  if (dropped) warn("OBJ: attributes beyond positions/faces dropped");
  return Mesh(std::move(vertices), std::move(faces));
}

void write_obj(const Mesh& mesh, std::ostream& out) {
  std::string s;
  for (const Vec3& p : mesh.positions()) {
    s += "v ";
    append_double(s, p.x());
    s += ' ';
    append_double(s, p.y());
    s += ' ';
    append_double(s, p.z());
    s += '\n';
  }
  for (const Face& f : mesh.faces()) {
    s += "f " + std::to_string(f[0] + 1) + ' ' + std::to_string(f[1] + 1) + ' ' +
         std::to_string(f[2] + 1) + '\n';
  }
  out << s;
}

// ----------------------------------------------------------------------------
// PLY

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

PlyType ply_type(std::string_view name) {
  if (name == "char" || name == "int8") return PlyType::i8;
  if (name == "uchar" || name == "uint8") return PlyType::u8;
  if (name == "short" || name == "int16") return PlyType::i16;
  if (name == "ushort" || name == "uint16") return PlyType::u16;
  if (name == "int" || name == "int32") return PlyType::i32;
  if (name == "uint" || name == "uint32") return PlyType::u32;
  if (name == "float" || name == "float32") return PlyType::f32;
  if (name == "double" || name == "float64") return PlyType::f64;
  parse_error("PLY: unknown property type '" + std::string(name) + "'");
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8:
    case PlyType::u8: return 1;
    case PlyType::i16:
    case PlyType::u16: return 2;
    case PlyType::i32:
    case PlyType::u32:
    case PlyType::f32: return 4;
    case PlyType::f64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

class PlyValueReader {
 public:
  PlyValueReader(std::istream& in, std::string format) : in_(in), format_(std::move(format)) {}

  double read(PlyType type) {
    if (format_ == "ascii") return read_ascii();
    unsigned char buf[8];
    const std::size_t n = ply_size(type);
    if (!in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n))) {
      parse_error("PLY: unexpected end of binary data");
    }
    const bool file_little = format_ == "binary_little_endian";
    if (file_little != (std::endian::native == std::endian::little)) std::reverse(buf, buf + n);
    switch (type) {
      case PlyType::i8: return static_cast<double>(static_cast<std::int8_t>(buf[0]));
      case PlyType::u8: return static_cast<double>(buf[0]);
      case PlyType::i16: return static_cast<double>(load<std::int16_t>(buf));
      case PlyType::u16: return static_cast<double>(load<std::uint16_t>(buf));
      case PlyType::i32: return static_cast<double>(load<std::int32_t>(buf));
      case PlyType::u32: return static_cast<double>(load<std::uint32_t>(buf));
      case PlyType::f32: return static_cast<double>(load<float>(buf));
      case PlyType::f64: return load<double>(buf);
    }
    return 0.0;
  }

 private:
  template <class T>
  static T load(const unsigned char* buf) {
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
  }

  double read_ascii() {
    std::string tok;
    if (!(in_ >> tok)) parse_error("PLY: unexpected end of ascii data");
    return to_double(tok);
  }

  std::istream& in_;
  std::string format_;
};

Mesh read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) parse_error("PLY: missing magic");
  std::string format;
  std::vector<PlyElement> elements;
  while (true) {
    if (!std::getline(in, line)) parse_error("PLY: unterminated header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto toks = split_ws(line);
    if (toks.empty() || toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "end_header") break;
    if (toks[0] == "format") {
      if (toks.size() < 2) parse_error("PLY: malformed format line");
      format = std::string(toks[1]);
      if (format != "ascii" && format != "binary_little_endian" &&
          format != "binary_big_endian") {
        parse_error("PLY: unsupported format '" + format + "'");
      }
    } else if (toks[0] == "element") {
      if (toks.size() < 3) parse_error("PLY: malformed element line");
      const long long count = to_integer(toks[2]);
      if (count < 0) parse_error("PLY: negative element count");
      elements.push_back({std::string(toks[1]), static_cast<std::size_t>(count), {}});
    } else if (toks[0] == "property") {
      if (elements.empty()) parse_error("PLY: property before element");
      PlyProperty prop;
      if (toks.size() >= 5 && toks[1] == "list") {
        prop.is_list = true;
        prop.count_type = ply_type(toks[2]);
        prop.type = ply_type(toks[3]);
        prop.name = std::string(toks[4]);
      } else if (toks.size() >= 3) {
        prop.type = ply_type(toks[1]);
        prop.name = std::string(toks[2]);
      } else {
        parse_error("PLY: malformed property line");
      }
      elements.back().properties.push_back(prop);
    }
  }
  if (format.empty()) parse_error("PLY: missing format line");

  PlyValueReader reader(in, format);
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  bool dropped = false;
  for (const PlyElement& element : elements) {
    const bool is_vertex = element.name == "vertex";
    const bool is_face = element.name == "face";
    dropped |= !is_vertex && !is_face;
    for (std::size_t i = 0; i < element.count; ++i) {
      Vec3 p = Vec3::Zero();
      for (const PlyProperty& prop : element.properties) {
        if (prop.is_list) {
          const auto n = static_cast<std::size_t>(reader.read(prop.count_type));
          std::vector<int> idx(n);
          for (std::size_t k = 0; k < n; ++k) idx[k] = static_cast<int>(reader.read(prop.type));
          if (is_face && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
            if (n != 3) non_triangular(faces.size(), n);
            faces.push_back({idx[0], idx[1], idx[2]});
          } else {
            dropped = true;
          }
          continue;
        }
        const double value = reader.read(prop.type);
        if (is_vertex && prop.name == "x") {
          p.x() = value;
        } else if (is_vertex && prop.name == "y") {
          p.y() = value;
        } else if (is_vertex && prop.name == "z") {
          p.z() = value;
        } else {
          dropped = true;
        }
      }
      if (is_vertex) vertices.push_back(p);
    }
  }
  if (dropped) warn("PLY: attributes beyond positions/faces dropped");
  return Mesh(std::move(vertices), std::move(faces));
}

void write_ply(const Mesh& mesh, std::ostream& out, PlyEncoding encoding) {
  std::string s = "ply\nformat ";
  s += encoding == PlyEncoding::ascii ? "ascii" : "binary_little_endian";
  s += " 1.0\nelement vertex " + std::to_string(mesh.num_vertices()) +
       "\nproperty double x\nproperty double y\nproperty double z\nelement face " +
       std::to_string(mesh.num_faces()) + "\nproperty list uchar int vertex_indices\nend_header\n";
  if (encoding == PlyEncoding::ascii) {
    for (const Vec3& p : mesh.positions()) {
      append_double(s, p.x());
      s += ' ';
      append_double(s, p.y());
      s += ' ';
      append_double(s, p.z());
      s += '\n';
    }
    for (const Face& f : mesh.faces()) {
      s += "3 " + std::to_string(f[0]) + ' ' + std::to_string(f[1]) + ' ' +
           std::to_string(f[2]) + '\n';
    }
    out << s;
    return;
  }
  auto put = [&s](const auto& value) {
    char buf[sizeof(value)];
    std::memcpy(buf, &value, sizeof(value));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(value));
    s.append(buf, sizeof(value));
  };
  for (const Vec3& p : mesh.positions()) {
    put(p.x());
    put(p.y());
    put(p.z());
  }
  for (const Face& f : mesh.faces()) {
    put(static_cast<std::uint8_t>(3));
    for (int v : f) put(static_cast<std::int32_t>(v));
  }
  out << s;
}

}  // namespace

MeshFormat format_from_path(const std::filesystem::path& path) {
  const std::string ext = lower(path.extension().string());
  if (ext == ".off") return MeshFormat::off;
  if (ext == ".obj") return MeshFormat::obj;
  if (ext == ".ply") return MeshFormat::ply;
  throw Error(ErrorKind::invalid_argument,
              "cannot infer mesh format from extension '" + ext + "' (use .off, .obj or .ply)");
}

Mesh read_mesh(std::istream& in, MeshFormat format) {
  switch (format) {
    case MeshFormat::off: return read_off(in);
    case MeshFormat::obj: return read_obj(in);
    case MeshFormat::ply: return read_ply(in);
  }
  throw Error(ErrorKind::invalid_argument, "unknown mesh format");
}

Mesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format) {
  const MeshFormat fmt = format ? *format : format_from_path(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for reading");
  try {
    return read_mesh(in, fmt);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_mesh(const Mesh& mesh, std::ostream& out, MeshFormat format, PlyEncoding encoding) {
  switch (format) {
    case MeshFormat::off: write_off(mesh, out); break;
    case MeshFormat::obj: write_obj(mesh, out); break;
    case MeshFormat::ply: write_ply(mesh, out, encoding); break;
  }
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path,
               std::optional<MeshFormat> format, PlyEncoding encoding) {
  const MeshFormat fmt = format ? *format : format_from_path(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
  write_mesh(mesh, out, fmt, encoding);
  out.flush();
  if (!out) throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
}

}  // namespace dlinpaint
