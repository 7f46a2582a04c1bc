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

#include "morphfit/bvh.hpp"

#include <algorithm>
#include <limits>

#include "morphfit/error.hpp"

namespace morphfit {

namespace {

// Closest point on segment [a, b]; t in [0, 1] is the weight of b.
double closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b, double* t_out) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  *t_out = t;
  return (a + t * ab - p).squaredNorm();
}

SurfacePoint degenerate_closest(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3* v[3] = {&a, &b, &c};
  double best = std::numeric_limits<double>::infinity();
  SurfacePoint out;
  for (int e = 0; e < 3; ++e) {
    const int i = e, j = (e + 1) % 3;
    double t = 0.0;
    const double d2 = closest_on_segment(p, *v[i], *v[j], &t);
    if (d2 < best) {
      best = d2;
      out.barycentric = Vec3::Zero();
      out.barycentric[i] = 1.0 - t;
      out.barycentric[j] = t;
    }
  }
  out.position = out.barycentric[0] * a + out.barycentric[1] * b + out.barycentric[2] * c;
  out.distance = (out.position - p).norm();
  return out;
}

}  // namespace

SurfacePoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  if (ab.cross(ac).squaredNorm() <= 1e-30 * std::max(ab.squaredNorm(), ac.squaredNorm()) *
                                        std::max(ab.squaredNorm(), ac.squaredNorm())) {
    return degenerate_closest(p, a, b, c);
  }

  // Voronoi-region walk (Ericson, Real-Time Collision Detection, 5.1.5).
  SurfacePoint out;
  auto finish = [&](double u, double v, double w) {
    out.barycentric = Vec3(u, v, w);
    out.position = u * a + v * b + w * c;
    out.distance = (out.position - p).norm();
    return out;
  };

  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return finish(1, 0, 0);

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return finish(0, 1, 0);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return finish(1 - v, v, 0);
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return finish(0, 0, 1);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return finish(1 - w, 0, w);
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return finish(0, 1 - w, w);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return finish(1.0 - v - w, v, w);
}

TriangleBvh::TriangleBvh(TriangleMesh mesh) : mesh_(std::move(mesh)) {
  if (mesh_.empty()) throw PreconditionError("closest-point index needs a mesh with faces");
  const auto nf = static_cast<std::int32_t>(mesh_.face_count());
  std::vector<Vec3> centroids(nf);
  order_.resize(nf);
  for (std::int32_t f = 0; f < nf; ++f) {
    const Face& t = mesh_.faces()[f];
    centroids[f] = (mesh_.vertex(t[0]) + mesh_.vertex(t[1]) + mesh_.vertex(t[2])) / 3.0;
    order_[f] = f;
  }
  nodes_.reserve(2 * static_cast<std::size_t>(nf) / kLeafSize + 1);
  build(0, nf, centroids);
}

std::int32_t TriangleBvh::build(std::int32_t begin, std::int32_t end,
                                const std::vector<Vec3>& centroids) {
  const auto index = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d cbox;
  for (std::int32_t i = begin; i < end; ++i) {
    const Face& t = mesh_.faces()[order_[i]];
    for (auto v : t) box.extend(mesh_.vertex(v));
    cbox.extend(centroids[order_[i]]);
  }
  nodes_[index].box = box;

  if (end - begin <= kLeafSize) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }

  int axis = 0;
  cbox.sizes().maxCoeff(&axis);
  const std::int32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::int32_t l, std::int32_t r) {
                     const double cl = centroids[l][axis], cr = centroids[r][axis];
                     return cl < cr || (cl == cr && l < r);
                   });
  const std::int32_t left = build(begin, mid, centroids);
  const std::int32_t right = build(mid, end, centroids);
  nodes_[index].first = left;
  nodes_[index].right = right;
  return index;
}

SurfacePoint TriangleBvh::closest_point(const Vec3& query) const {
  SurfacePoint best;
  double best_d2 = std::numeric_limits<double>::infinity();

  std::int32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (node.box.squaredExteriorDistance(query) > best_d2) continue;
    if (node.count > 0) {
      for (std::int32_t i = node.first; i < node.first + node.count; ++i) {
        const std::int32_t f = order_[i];
        const Face& t = mesh_.faces()[f];
        SurfacePoint sp =
            closest_point_on_triangle(query, mesh_.vertex(t[0]), mesh_.vertex(t[1]), mesh_.vertex(t[2]));
        const double d2 = (sp.position - query).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && f < best.triangle)) {
          best_d2 = d2;
          best = sp;
          best.triangle = f;
        }
      }
      continue;
    }
    const Node& l = nodes_[node.first];
    const Node& r = nodes_[node.right];
    const double dl = l.box.squaredExteriorDistance(query);
    const double dr = r.box.squaredExteriorDistance(query);
    // Push the farther child first so the nearer one is expanded next.
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.first;
    } else {
      stack[top++] = node.first;
      stack[top++] = node.right;
    }
  }
  return best;
}

SurfacePoint closest_point(const TriangleMesh& mesh, const Vec3& query) {
  return TriangleBvh(mesh).closest_point(query);
}

}  // namespace morphfit
