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

#ifndef MORPHFIT_LIKELIHOOD_HPP
#define MORPHFIT_LIKELIHOOD_HPP

#include <string>
#include <unordered_set>
#include <vector>

#include "morphfit/bvh.hpp"
#include "morphfit/mesh.hpp"

namespace morphfit {

/// A target mesh with its closest-point index and boundary information.
/// Immutable and shareable between chains.
class TargetSurface {
 public:
  explicit TargetSurface(TriangleMesh mesh);

  const TriangleMesh& mesh() const noexcept { return index_.mesh(); }
  const TriangleBvh& index() const noexcept { return index_; }

  bool has_boundary() const noexcept { return !boundary_edges_.empty(); }
  bool is_boundary_vertex(std::size_t v) const { return boundary_vertex_[v] != 0; }

  /// True if the point lies on a boundary edge (or boundary vertex) of the
  /// face it was found on.
  bool on_boundary(const SurfacePoint& point) const;

 private:
  TriangleBvh index_;
  std::vector<char> boundary_vertex_;
  std::unordered_set<std::uint64_t> boundary_edges_;
};

struct LikelihoodConfig {
  enum class Kind { kL2, kHausdorff, kCollective };
  Kind kind = Kind::kL2;
  double sigma_l2 = 1.0;    // mm
  double lambda_h = 1.0;    // 1/mm
  double sigma_cl = 1.0;    // mm^2
  bool filter_boundary = true;  // collective only

  void validate() const;
};

std::string to_string(LikelihoodConfig::Kind kind);
LikelihoodConfig::Kind likelihood_kind_from_string(const std::string& name);

/// Likelihood value plus the distance statistics computed on the way.
struct LikelihoodEvaluation {
  double log_likelihood = 0.0;
  double mean_distance = 0.0;  // mean instance-vertex to target-surface distance
  double hausdorff = 0.0;      // symmetric, vertex-sampled; NaN for L2 unless requested
  std::size_t filtered = 0;    // instance vertices dropped by boundary filtering
};

LikelihoodEvaluation evaluate_likelihood(const LikelihoodConfig& config, const TargetSurface& target,
                                         const TriangleMesh& instance, bool with_hausdorff = false);

/// sum_i log N(d_i; 0, sigma^2), d_i = distance of instance vertex i to the target.
double log_likelihood_l2(const TargetSurface& target, const TriangleMesh& instance, double sigma);

/// log(lambda) - lambda * d_H.
double log_likelihood_hausdorff(const TargetSurface& target, const TriangleMesh& instance, double lambda);

/// log N(d_CL; 0, sigma_cl^2) + log(lambda) - lambda * d_H, where d_CL is the
/// mean squared distance over instance vertices whose closest target point is
/// not on the target boundary (when filtering). Filtered vertices are also
/// left out of the instance-to-target half of d_H. Throws ValidationError if
/// every vertex is filtered.
double log_likelihood_collective(const TargetSurface& target, const TriangleMesh& instance, double sigma_cl,
                                 double lambda_h, bool filter_boundary);

/// max over both directions of vertex-to-opposite-surface distances.
double hausdorff_distance(const TargetSurface& target, const TriangleMesh& instance);

/// Mean closest-point distance from instance vertices to the target surface.
double mean_distance(const TargetSurface& target, const TriangleMesh& instance);

}  // namespace morphfit

#endif  // MORPHFIT_LIKELIHOOD_HPP
