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

#ifndef MORPHFIT_SYNTH_HPP
#define MORPHFIT_SYNTH_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "morphfit/mesh.hpp"

namespace morphfit {

/// Closed UV ellipsoid centred at the origin: `resolution` latitude bands and
/// 2 * resolution longitude segments, outward winding.
TriangleMesh make_ellipsoid(int resolution, const Vec3& semi_axes);

/// Subdivided icosahedron projected onto a sphere (closed, outward winding).
TriangleMesh make_icosphere(int subdivisions, double radius);

/// Closed cylinder along z from -length/2 to length/2 with flat capped ends.
TriangleMesh make_capped_cylinder(int resolution, double radius, double length);

/// Square (resolution+1)^2 vertex grid in the z = 0 plane spanning
/// [-size/2, size/2]^2, raised by a Gaussian bump h * exp(-r^2 / w^2) at the
/// centre. Normals point towards +z.
TriangleMesh make_bump_plate(int resolution, double size, double bump_height, double bump_width);

/// Synthetic stand-ins for the experiment data.
struct SynthSpec {
  enum class Shape { kEllipsoid, kThinCylinder, kBumpPlate };
  Shape shape = Shape::kEllipsoid;
  int resolution = 16;
  Vec3 size = Vec3(60.0, 40.0, 30.0);  // ellipsoid semi-axes; cylinder (radius, length, -); plate (side, h, w)
  double excision_radius = 0.0;
  Vec3 excision_center = Vec3::Zero();

  void validate() const;
};

std::string to_string(SynthSpec::Shape shape);
SynthSpec::Shape shape_from_string(const std::string& name);

/// Base mesh for the spec with the excision (if any) applied.
TriangleMesh synthesize(const SynthSpec& spec);

}  // namespace morphfit

#endif  // MORPHFIT_SYNTH_HPP
