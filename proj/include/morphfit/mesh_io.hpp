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

#ifndef MORPHFIT_MESH_IO_HPP
#define MORPHFIT_MESH_IO_HPP

#include <filesystem>
#include <optional>
#include <vector>

#include "morphfit/mesh.hpp"

namespace morphfit {

enum class MeshFormat { kPlyAscii, kPlyBinary, kObj };

/// Guess the format from the extension (.obj -> OBJ, anything else -> binary PLY).
/// Only used for writing; readers inspect the header.
MeshFormat format_from_extension(const std::filesystem::path& path);

struct MeshWithField {
  TriangleMesh mesh;
  /// Per-vertex `quality` property when the file carries one.
  std::optional<std::vector<double>> quality;
};

/// Reads PLY (ascii or binary_little_endian) or OBJ. Parse failures raise
/// FormatError with the byte offset; bad connectivity raises ValidationError.
MeshWithField load_mesh_with_field(const std::filesystem::path& path, MeshFormat format);

/// Detects PLY vs OBJ from the first bytes of the file.
MeshWithField load_mesh_with_field(const std::filesystem::path& path);

TriangleMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
TriangleMesh load_mesh(const std::filesystem::path& path);

/// Writes x,y,z as float32 and, when given, the field as a float32 `quality`
/// vertex property. OBJ cannot carry the field (ValidationError).
void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, MeshFormat format,
               const std::optional<std::vector<double>>& quality = std::nullopt);

}  // namespace morphfit

#endif  // MORPHFIT_MESH_IO_HPP
