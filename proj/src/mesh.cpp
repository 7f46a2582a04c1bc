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

#include "morphfit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "morphfit/error.hpp"

namespace morphfit {

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Face> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const auto n = static_cast<std::int64_t>(vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!vertices_[i].allFinite()) {
      throw ValidationError("vertex " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Face& t = faces_[f];
    for (const auto idx : t) {
      if (idx < 0 || idx >= n) {
        throw ValidationError("face " + std::to_string(f) + " references vertex " +
                              std::to_string(idx) + " but the mesh has " + std::to_string(n) +
                              " vertices");
      }
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw ValidationError("face " + std::to_string(f) + " repeats a vertex index");
    }
  }
}

Eigen::VectorXd TriangleMesh::flattened() const {
  Eigen::VectorXd out(3 * vertices_.size());
  for (std::size_t i = 0; i < vertices_.size(); ++i) out.segment<3>(3 * i) = vertices_[i];
  return out;
}

TriangleMesh TriangleMesh::with_positions(const Eigen::Ref<const Eigen::VectorXd>& packed) const {
  if (packed.size() != static_cast<Eigen::Index>(3 * vertices_.size())) {
    throw ValidationError("position vector has length " + std::to_string(packed.size()) +
                          ", expected " + std::to_string(3 * vertices_.size()));
  }
  std::vector<Vec3> v(vertices_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = packed.segment<3>(3 * i);
  return TriangleMesh(std::move(v), faces_);
}

namespace {

// Sum of unnormalised (area-weighted) face normals per vertex.
std::vector<Vec3> accumulate_normals(const TriangleMesh& mesh) {
  std::vector<Vec3> acc(mesh.vertex_count(), Vec3::Zero());
  for (const Face& f : mesh.faces()) {
    const Vec3& a = mesh.vertex(f[0]);
    const Vec3 n = (mesh.vertex(f[1]) - a).cross(mesh.vertex(f[2]) - a);
    if (n.squaredNorm() == 0.0) continue;
    for (const auto idx : f) acc[idx] += n;
  }
  return acc;
}

Edge make_edge(std::int32_t a, std::int32_t b) { return a < b ? Edge{a, b} : Edge{b, a}; }

}  // namespace

VertexNormalField vertex_normals(const TriangleMesh& mesh) {
  std::vector<Vec3> acc = accumulate_normals(mesh);
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const double len = acc[i].norm();
    if (!(len > 0.0) || !std::isfinite(len)) {
      bad.push_back(i);
      continue;
    }
    acc[i] /= len;
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "vertices without an incident non-degenerate face:";
    for (auto i : bad) os << ' ' << i;
    throw ValidationError(os.str());
  }
  return VertexNormalField{std::move(acc)};
}

std::vector<Vec3> vertex_normals_or_zero(const TriangleMesh& mesh) {
  std::vector<Vec3> acc = accumulate_normals(mesh);
  for (auto& n : acc) {
    const double len = n.norm();
    n = (len > 0.0 && std::isfinite(len)) ? Vec3(n / len) : Vec3::Zero();
  }
  return acc;
}

std::vector<Vec3> face_normals(const TriangleMesh& mesh) {
  std::vector<Vec3> out;
  out.reserve(mesh.face_count());
  for (const Face& f : mesh.faces()) {
    const Vec3& a = mesh.vertex(f[0]);
    const Vec3 n = (mesh.vertex(f[1]) - a).cross(mesh.vertex(f[2]) - a);
    const double len = n.norm();
    out.push_back(len > 0.0 ? Vec3(n / len) : Vec3::Zero());
  }
  return out;
}

std::vector<Edge> boundary_edges(const TriangleMesh& mesh) {
  std::map<Edge, int> uses;
  for (const Face& f : mesh.faces()) {
    ++uses[make_edge(f[0], f[1])];
    ++uses[make_edge(f[1], f[2])];
    ++uses[make_edge(f[2], f[0])];
  }
  std::vector<Edge> out;
  for (const auto& [e, count] : uses) {
    if (count == 1) out.push_back(e);
  }
  return out;
}

std::vector<std::int32_t> boundary_vertices(const TriangleMesh& mesh) {
  std::vector<std::int32_t> out;
  for (const auto& [a, b] : boundary_edges(mesh)) {
    out.push_back(a);
    out.push_back(b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::pair<Vec3, Vec3> tangent_frame(const Vec3& normal) {
  const double len = normal.norm();
  if (!(len > 0.0) || !std::isfinite(len)) {
    throw PreconditionError("tangent_frame requires a non-zero finite normal");
  }
  const Vec3 n = normal / len;
  // Branchless orthonormal basis (Duff et al. 2017).
  const double sign = std::copysign(1.0, n.z());
  const double a = -1.0 / (sign + n.z());
  const double b = n.x() * n.y() * a;
  Vec3 v1(1.0 + sign * n.x() * n.x() * a, sign * b, -sign * n.x());
  v1.normalize();
  Vec3 v2 = n.cross(v1);
  v2.normalize();
  return {v1, v2};
}

TriangleMesh remove_vertices_within(const TriangleMesh& mesh, const Vec3& center, double radius,
                                    std::vector<std::int32_t>* kept) {
  std::vector<std::int32_t> remap(mesh.vertex_count(), -1);
  std::vector<Vec3> verts;
  std::vector<std::int32_t> origin;
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i) {
    if ((mesh.vertex(i) - center).norm() <= radius) continue;
    remap[i] = static_cast<std::int32_t>(verts.size());
    verts.push_back(mesh.vertex(i));
    origin.push_back(static_cast<std::int32_t>(i));
  }
  std::vector<Face> faces;
  for (const Face& f : mesh.faces()) {
    if (remap[f[0]] < 0 || remap[f[1]] < 0 || remap[f[2]] < 0) continue;
    faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  }
  // Drop vertices that lost all their faces.
  std::vector<char> used(verts.size(), 0);
  for (const Face& f : faces)
    for (auto i : f) used[i] = 1;
  std::vector<std::int32_t> compact(verts.size(), -1);
  std::vector<Vec3> out_verts;
  std::vector<std::int32_t> out_origin;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (!used[i]) continue;
    compact[i] = static_cast<std::int32_t>(out_verts.size());
    out_verts.push_back(verts[i]);
    out_origin.push_back(origin[i]);
  }
  for (Face& f : faces)
    for (auto& i : f) i = compact[i];
  if (kept) *kept = std::move(out_origin);
  return TriangleMesh(std::move(out_verts), std::move(faces));
}

}  // namespace morphfit
