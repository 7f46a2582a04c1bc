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

#ifndef MORPHFIT_MESH_HPP
#define MORPHFIT_MESH_HPP

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace morphfit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Face = std::array<std::int32_t, 3>;

/// Indexed triangle surface. Coordinates are in millimetres.
///
/// Construction validates that indices are in range, that no face repeats a
/// vertex and that every coordinate is finite. Instances are immutable.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces);

  const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t face_count() const noexcept { return faces_.size(); }
  bool empty() const noexcept { return faces_.empty(); }

  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }

  /// Vertices packed as x0,y0,z0,x1,... (length 3n).
  Eigen::VectorXd flattened() const;

  /// Same connectivity, new positions (length 3n, packed as in flattened()).
  TriangleMesh with_positions(const Eigen::Ref<const Eigen::VectorXd>& packed) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Face> faces_;
};

/// A point on a mesh surface together with its location on the owning face.
struct SurfacePoint {
  Vec3 position = Vec3::Zero();
  std::int32_t triangle = -1;
  Vec3 barycentric = Vec3::Zero();
  double distance = 0.0;
};

/// Unit normal per vertex.
struct VertexNormalField {
  std::vector<Vec3> normals;
};

/// Area-weighted vertex normals. Zero-area faces do not contribute.
/// Throws ValidationError listing every vertex without a usable incident face.
VertexNormalField vertex_normals(const TriangleMesh& mesh);

/// Like vertex_normals, but vertices without a defined normal get Vec3::Zero()
/// instead of raising.
std::vector<Vec3> vertex_normals_or_zero(const TriangleMesh& mesh);

/// Unit face normals; zero for degenerate faces.
std::vector<Vec3> face_normals(const TriangleMesh& mesh);

using Edge = std::pair<std::int32_t, std::int32_t>;  // first < second

/// Edges used by exactly one face, sorted.
std::vector<Edge> boundary_edges(const TriangleMesh& mesh);

/// Sorted indices of vertices touching a boundary edge.
std::vector<std::int32_t> boundary_vertices(const TriangleMesh& mesh);

/// Orthonormal right-handed frame {n, v1, v2} with n x v1 = v2.
/// Throws PreconditionError for a zero or non-finite normal.
std::pair<Vec3, Vec3> tangent_frame(const Vec3& normal);

/// Vertices whose distance from `center` is at most `radius` are removed
/// together with every face touching them; remaining vertices are compacted.
/// `kept` receives the original index of every surviving vertex.
TriangleMesh remove_vertices_within(const TriangleMesh& mesh, const Vec3& center, double radius,
                                    std::vector<std::int32_t>* kept = nullptr);

}  // namespace morphfit

#endif  // MORPHFIT_MESH_HPP
