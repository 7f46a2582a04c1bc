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

#ifndef MORPHFIT_BVH_HPP
#define MORPHFIT_BVH_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Geometry>

#include "morphfit/mesh.hpp"

namespace morphfit {

/// Closest point on triangle (a, b, c) to p. Handles zero-area triangles by
/// falling back to their edges. Barycentric weights are w.r.t. (a, b, c).
SurfacePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Axis-aligned bounding volume hierarchy over the faces of a mesh for exact
/// point-to-surface queries. Median split along the widest centroid axis,
/// at most four faces per leaf. Immutable once built; concurrent queries are
/// safe.
class TriangleBvh {
 public:
  static constexpr int kLeafSize = 4;

  /// Throws PreconditionError if the mesh has no faces.
  explicit TriangleBvh(TriangleMesh mesh);

  const TriangleMesh& mesh() const noexcept { return mesh_; }

  /// Exact closest point; ties go to the lowest face index.
  SurfacePoint closest_point(const Vec3& query) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    std::int32_t first = 0;  // into order_ for leaves, left child otherwise
    std::int32_t count = 0;  // > 0 for leaves
    std::int32_t right = -1;
  };

  std::int32_t build(std::int32_t begin, std::int32_t end, const std::vector<Vec3>& centroids);

  TriangleMesh mesh_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> order_;
};

/// Convenience overload that indexes the mesh for a single query.
SurfacePoint closest_point(const TriangleMesh& mesh, const Vec3& query);

}  // namespace morphfit

#endif  // MORPHFIT_BVH_HPP
