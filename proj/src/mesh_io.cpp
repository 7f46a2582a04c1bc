/*
 * Copyright 2026 The morphfit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "morphfit/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "morphfit/error.hpp"

namespace morphfit {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

enum class Scalar { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

std::optional<Scalar> parse_scalar(std::string_view name) {
  if (name == "char" || name == "int8") return Scalar::kInt8;
  if (name == "uchar" || name == "uint8") return Scalar::kUint8;
  if (name == "short" || name == "int16") return Scalar::kInt16;
  if (name == "ushort" || name == "uint16") return Scalar::kUint16;
  if (name == "int" || name == "int32") return Scalar::kInt32;
  if (name == "uint" || name == "uint32") return Scalar::kUint32;
  if (name == "float" || name == "float32") return Scalar::kFloat32;
  if (name == "double" || name == "float64") return Scalar::kFloat64;
  return std::nullopt;
}

std::size_t scalar_size(Scalar s) {
  switch (s) {
    case Scalar::kInt8:
    case Scalar::kUint8:
      return 1;
    case Scalar::kInt16:
    case Scalar::kUint16:
      return 2;
    case Scalar::kInt32:
    case Scalar::kUint32:
    case Scalar::kFloat32:
      return 4;
    case Scalar::kFloat64:
      return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  Scalar type = Scalar::kFloat32;
  bool is_list = false;
  Scalar count_type = Scalar::kUint8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

// Cursor over the body of a PLY/OBJ buffer that knows its byte offset.
class Reader {
 public:
  Reader(const std::string& data, std::size_t pos) : data_(data), pos_(pos) {}

  std::size_t offset() const { return pos_; }

  double ascii_number() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (start == pos_) throw FormatError("unexpected end of file", start);
    double value = 0.0;
    const char* first = data_.data() + start;
    const char* last = data_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw FormatError("malformed number '" + std::string(first, last) + "'", start);
    }
    return value;
  }

  double binary(Scalar type) {
    const std::size_t n = scalar_size(type);
    if (pos_ + n > data_.size()) throw FormatError("unexpected end of binary data", pos_);
    const char* p = data_.data() + pos_;
    pos_ += n;
    switch (type) {
      case Scalar::kInt8: return load<std::int8_t>(p);
      case Scalar::kUint8: return load<std::uint8_t>(p);
      case Scalar::kInt16: return load<std::int16_t>(p);
      case Scalar::kUint16: return load<std::uint16_t>(p);
      case Scalar::kInt32: return load<std::int32_t>(p);
      case Scalar::kUint32: return load<std::uint32_t>(p);
      case Scalar::kFloat32: return load<float>(p);
      case Scalar::kFloat64: return load<double>(p);
    }
    return 0.0;
  }

 private:
  template <typename T>
  static double load(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
  }

  void skip_space() {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
  }

  const std::string& data_;
  std::size_t pos_;
};

std::int32_t as_index(double v, std::size_t offset) {
  if (v != std::floor(v) || v < -2147483648.0 || v > 2147483647.0) {
    throw FormatError("face index is not an int32", offset);
  }
  return static_cast<std::int32_t>(v);
}

MeshWithField parse_ply(const std::string& data) {
  std::size_t pos = 0;
  auto next_line = [&](std::size_t& line_start) -> std::string_view {
    line_start = pos;
    if (pos >= data.size()) throw FormatError("PLY header is not terminated", pos);
    std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    std::string_view line(data.data() + pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };

  std::size_t line_start = 0;
  if (next_line(line_start) != "ply") throw FormatError("missing 'ply' magic", 0);

  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  for (;;) {
    std::string_view line = next_line(line_start);
    std::istringstream ls{std::string(line)};
    std::string word;
    ls >> word;
    if (word == "end_header") break;
    if (word.empty() || word == "comment" || word == "obj_info") continue;
    if (word == "format") {
      std::string fmt, version;
      ls >> fmt >> version;
      if (fmt == "ascii") {
        binary = false;
      } else if (fmt == "binary_little_endian") {
        binary = true;
      } else {
        throw FormatError("unsupported PLY format '" + fmt + "'", line_start);
      }
      have_format = true;
    } else if (word == "element") {
      PlyElement e;
      long long count = -1;
      ls >> e.name >> count;
      if (!ls || count < 0) throw FormatError("malformed element line", line_start);
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (word == "property") {
      if (elements.empty()) throw FormatError("property before any element", line_start);
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> p.name;
        auto ct = parse_scalar(count_type);
        auto it = parse_scalar(item_type);
        if (!ct || !it || p.name.empty()) throw FormatError("malformed list property", line_start);
        p.is_list = true;
        p.count_type = *ct;
        p.type = *it;
      } else {
        auto t = parse_scalar(type);
        ls >> p.name;
        if (!t || p.name.empty()) throw FormatError("unknown property type '" + type + "'", line_start);
        p.type = *t;
      }
      elements.back().properties.push_back(std::move(p));
    } else {
      throw FormatError("unexpected header keyword '" + word + "'", line_start);
    }
  }
  if (!have_format) throw FormatError("PLY header has no format line", 0);

  Reader reader(data, pos);
  auto read_value = [&](Scalar t) {
    if (binary) return reader.binary(t);
    const double v = reader.ascii_number();
    return t == Scalar::kFloat32 ? static_cast<double>(static_cast<float>(v)) : v;
  };

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::optional<std::vector<double>> quality;
  bool seen_vertex = false;

  for (const PlyElement& e : elements) {
    if (e.name == "vertex") {
      seen_vertex = true;
      int ix = -1, iy = -1, iz = -1, iq = -1;
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& name = e.properties[k].name;
        if (name == "x") ix = static_cast<int>(k);
        if (name == "y") iy = static_cast<int>(k);
        if (name == "z") iz = static_cast<int>(k);
        if (name == "quality") iq = static_cast<int>(k);
      }
      if (ix < 0 || iy < 0 || iz < 0) throw FormatError("vertex element lacks x/y/z", pos);
      vertices.resize(e.count);
      if (iq >= 0) quality.emplace(e.count, 0.0);
      std::vector<double> row(e.properties.size());
      for (std::size_t i = 0; i < e.count; ++i) {
        for (std::size_t k = 0; k < e.properties.size(); ++k) {
          const PlyProperty& p = e.properties[k];
          if (p.is_list) {
            const auto n = static_cast<std::size_t>(read_value(p.count_type));
            for (std::size_t j = 0; j < n; ++j) read_value(p.type);
            row[k] = 0.0;
          } else {
            row[k] = read_value(p.type);
          }
        }
        vertices[i] = Vec3(row[ix], row[iy], row[iz]);
        if (iq >= 0) (*quality)[i] = row[iq];
      }
    } else if (e.name == "face") {
      faces.reserve(e.count);
      for (std::size_t i = 0; i < e.count; ++i) {
        bool got = false;
        for (const PlyProperty& p : e.properties) {
          if (!p.is_list) {
            read_value(p.type);
            continue;
          }
          const std::size_t at = reader.offset();
          const double n = read_value(p.count_type);
          std::vector<std::int32_t> idx;
          for (int j = 0; j < static_cast<int>(n); ++j) idx.push_back(as_index(read_value(p.type), at));
          if (p.name == "vertex_indices" || p.name == "vertex_index") {
            if (idx.size() != 3) {
              throw FormatError("face with " + std::to_string(idx.size()) + " vertices; only triangles are supported", at);
            }
            faces.push_back({idx[0], idx[1], idx[2]});
            got = true;
          }
        }
        if (!got) throw FormatError("face element lacks vertex_indices", reader.offset());
      }
    } else {
      for (std::size_t i = 0; i < e.count; ++i) {
        for (const PlyProperty& p : e.properties) {
          if (p.is_list) {
            const auto n = static_cast<std::size_t>(read_value(p.count_type));
            for (std::size_t j = 0; j < n; ++j) read_value(p.type);
          } else {
            read_value(p.type);
          }
        }
      }
    }
  }
  if (!seen_vertex) throw FormatError("PLY file has no vertex element", pos);
  return MeshWithField{TriangleMesh(std::move(vertices), std::move(faces)), std::move(quality)};
}

MeshWithField parse_obj(const std::string& data) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::size_t pos = 0;
  while (pos < data.size()) {
    const std::size_t line_start = pos;
    std::size_t end = data.find('\n', pos);
    if (end == std::string::npos) end = data.size();
    std::string line = data.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw FormatError("malformed vertex record", line_start);
      vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<std::int32_t> idx;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        long long v = 0;
        auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), v);
        if (ec != std::errc() || ptr != head.data() + head.size() || v == 0) {
          throw FormatError("malformed face index '" + tok + "'", line_start);
        }
        // Negative indices count back from the most recent vertex.
        const long long zero_based = v > 0 ? v - 1 : static_cast<long long>(vertices.size()) + v;
        idx.push_back(static_cast<std::int32_t>(zero_based));
      }
      if (idx.size() != 3) {
        throw FormatError("face with " + std::to_string(idx.size()) + " vertices; only triangles are supported",
                          line_start);
      }
      faces.push_back({idx[0], idx[1], idx[2]});
    }
    // Other records (vn, vt, g, o, s, usemtl, comments) are ignored.
  }
  return MeshWithField{TriangleMesh(std::move(vertices), std::move(faces)), std::nullopt};
}

}  // namespace

MeshFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".obj" ? MeshFormat::kObj : MeshFormat::kPlyBinary;
}

MeshWithField load_mesh_with_field(const std::filesystem::path& path, MeshFormat format) {
  const std::string data = read_file(path);
  if (format == MeshFormat::kObj) return parse_obj(data);
  MeshWithField out = parse_ply(data);
  return out;
}

MeshWithField load_mesh_with_field(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  if (data.rfind("ply", 0) == 0) return parse_ply(data);
  return parse_obj(data);
}

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  return load_mesh_with_field(path, format).mesh;
}

TriangleMesh load_mesh(const std::filesystem::path& path) { return load_mesh_with_field(path).mesh; }

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format,
               const std::optional<std::vector<double>>& quality) {
  if (quality && quality->size() != mesh.vertex_count()) {
    throw ValidationError("scalar field has " + std::to_string(quality->size()) + " values for " +
                          std::to_string(mesh.vertex_count()) + " vertices");
  }
  if (format == MeshFormat::kObj && quality) {
    throw ValidationError("OBJ cannot store a per-vertex scalar field; use PLY");
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  if (format == MeshFormat::kObj) {
    char buf[128];
    for (const Vec3& v : mesh.vertices()) {
      const int n = std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
      out.write(buf, n);
    }
    for (const Face& f : mesh.faces()) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  } else {
    const bool binary = format == MeshFormat::kPlyBinary;
    out << "ply\n" << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n");
    out << "element vertex " << mesh.vertex_count() << '\n'
        << "property float x\nproperty float y\nproperty float z\n";
    if (quality) out << "property float quality\n";
    out << "element face " << mesh.face_count() << '\n'
        << "property list uchar int vertex_indices\nend_header\n";

    auto put_float = [&](double v) {
      const float f = static_cast<float>(v);
      if (binary) {
        out.write(reinterpret_cast<const char*>(&f), sizeof f);
      } else {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, f);
        out.write(buf, res.ptr - buf);
      }
    };
    for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
      const Vec3& v = mesh.vertex(i);
      for (int k = 0; k < 3; ++k) {
        put_float(v[k]);
        if (!binary) out << (k < 2 || quality ? ' ' : '\n');
      }
      if (quality) {
        put_float((*quality)[i]);
        if (!binary) out << '\n';
      }
    }
    for (const Face& f : mesh.faces()) {
      if (binary) {
        const std::uint8_t three = 3;
        out.write(reinterpret_cast<const char*>(&three), 1);
        out.write(reinterpret_cast<const char*>(f.data()), 3 * sizeof(std::int32_t));
      } else {
        out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace morphfit
