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

#include "morphfit/synth.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "morphfit/error.hpp"

namespace morphfit {

namespace {
constexpr double kPi = std::numbers::pi;
}

TriangleMesh make_ellipsoid(int resolution, const Vec3& semi_axes) {
  if (resolution < 4) throw ValidationError("ellipsoid resolution must be at least 4");
  const int rings = resolution;
  const int segments = 2 * resolution;
  std::vector<Vec3> v;
  v.emplace_back(0.0, 0.0, semi_axes.z());
  for (int i = 1; i < rings; ++i) {
    const double theta = kPi * i / rings;
    for (int j = 0; j < segments; ++j) {
      const double phi = 2.0 * kPi * j / segments;
      v.emplace_back(semi_axes.x() * std::sin(theta) * std::cos(phi), semi_axes.y() * std::sin(theta) * std::sin(phi),
                     semi_axes.z() * std::cos(theta));
    }
  }
  v.emplace_back(0.0, 0.0, -semi_axes.z());
  const auto south = static_cast<std::int32_t>(v.size() - 1);
  auto at = [&](int ring, int seg) { return static_cast<std::int32_t>(1 + (ring - 1) * segments + (seg % segments)); };

  std::vector<Face> f;
  for (int j = 0; j < segments; ++j) f.push_back({0, at(1, j), at(1, j + 1)});
  for (int i = 1; i < rings - 1; ++i) {
    for (int j = 0; j < segments; ++j) {
      f.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
      f.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
    }
  }
  for (int j = 0; j < segments; ++j) f.push_back({south, at(rings - 1, j + 1), at(rings - 1, j)});
  return TriangleMesh(std::move(v), std::move(f));
}

TriangleMesh make_icosphere(int subdivisions, double radius) {
  if (subdivisions < 0) throw ValidationError("subdivisions must be non-negative");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                         {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                         {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> mid;
    auto midpoint = [&](std::int32_t a, std::int32_t b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const auto idx = static_cast<std::int32_t>(v.size() - 1);
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<Face> next;
    for (const Face& tri : f) {
      const auto ab = midpoint(tri[0], tri[1]);
      const auto bc = midpoint(tri[1], tri[2]);
      const auto ca = midpoint(tri[2], tri[0]);
      next.push_back({tri[0], ab, ca});
      next.push_back({tri[1], bc, ab});
      next.push_back({tri[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  for (auto& p : v) p *= radius;
  return TriangleMesh(std::move(v), std::move(f));
}

TriangleMesh make_capped_cylinder(int resolution, double radius, double length) {
  if (resolution < 4) throw ValidationError("cylinder resolution must be at least 4");
  const int segments = 2 * resolution;
  // Roughly square side faces.
  const int bands = std::max(1, static_cast<int>(std::lround(length / (2.0 * kPi * radius / segments))));
  std::vector<Vec3> v;
  for (int i = 0; i <= bands; ++i) {
    const double z = -length / 2.0 + length * i / bands;
    for (int j = 0; j < segments; ++j) {
      const double phi = 2.0 * kPi * j / segments;
      v.emplace_back(radius * std::cos(phi), radius * std::sin(phi), z);
    }
  }
  auto at = [&](int band, int seg) { return static_cast<std::int32_t>(band * segments + (seg % segments)); };
  std::vector<Face> f;
  for (int i = 0; i < bands; ++i) {
    for (int j = 0; j < segments; ++j) {
      f.push_back({at(i, j), at(i, j + 1), at(i + 1, j + 1)});
      f.push_back({at(i, j), at(i + 1, j + 1), at(i + 1, j)});
    }
  }
  v.emplace_back(0.0, 0.0, -length / 2.0);
  const auto bottom = static_cast<std::int32_t>(v.size() - 1);
  v.emplace_back(0.0, 0.0, length / 2.0);
  const auto top = static_cast<std::int32_t>(v.size() - 1);
  for (int j = 0; j < segments; ++j) {
    f.push_back({bottom, at(0, j + 1), at(0, j)});
    f.push_back({top, at(bands, j), at(bands, j + 1)});
  }
  return TriangleMesh(std::move(v), std::move(f));
}

TriangleMesh make_bump_plate(int resolution, double size, double bump_height, double bump_width) {
  if (resolution < 1) throw ValidationError("plate resolution must be positive");
  const int n = resolution + 1;
  std::vector<Vec3> v;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = -size / 2.0 + size * j / resolution;
      const double y = -size / 2.0 + size * i / resolution;
      const double z = bump_width > 0.0 ? bump_height * std::exp(-(x * x + y * y) / (bump_width * bump_width)) : 0.0;
      v.emplace_back(x, y, z);
    }
  }
  std::vector<Face> f;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const auto a = static_cast<std::int32_t>(i * n + j);
      const auto b = a + 1;
      const auto c = a + n;
      const auto d = c + 1;
      f.push_back({a, b, d});
      f.push_back({a, d, c});
    }
  }
  return TriangleMesh(std::move(v), std::move(f));
}

void SynthSpec::validate() const {
  if (resolution < 4) throw ValidationError("synthetic resolution must be at least 4");
  if (!(excision_radius >= 0.0)) throw ValidationError("excision radius must be non-negative");
}

std::string to_string(SynthSpec::Shape shape) {
  switch (shape) {
    case SynthSpec::Shape::kEllipsoid: return "ellipsoid";
    case SynthSpec::Shape::kThinCylinder: return "thin-cylinder";
    case SynthSpec::Shape::kBumpPlate: return "face-plate";
  }
  return "?";
}

SynthSpec::Shape shape_from_string(const std::string& name) {
  if (name == "ellipsoid") return SynthSpec::Shape::kEllipsoid;
  if (name == "thin-cylinder" || name == "cylinder") return SynthSpec::Shape::kThinCylinder;
  if (name == "face-plate" || name == "plate") return SynthSpec::Shape::kBumpPlate;
  throw ValidationError("unknown shape '" + name + "' (expected ellipsoid, thin-cylinder or face-plate)");
}

TriangleMesh synthesize(const SynthSpec& spec) {
  spec.validate();
  TriangleMesh base;
  switch (spec.shape) {
    case SynthSpec::Shape::kEllipsoid:
      base = make_ellipsoid(spec.resolution, spec.size);
      break;
    case SynthSpec::Shape::kThinCylinder:
      base = make_capped_cylinder(spec.resolution, spec.size.x(), spec.size.y());
      break;
    case SynthSpec::Shape::kBumpPlate:
      base = make_bump_plate(spec.resolution, spec.size.x(), spec.size.y(), spec.size.z());
      break;
  }
  if (spec.excision_radius <= 0.0) return base;
  TriangleMesh cut = remove_vertices_within(base, spec.excision_center, spec.excision_radius);
  if (cut.empty()) throw ValidationError("excision removes the whole surface");
  return cut;
}

}  // namespace morphfit
