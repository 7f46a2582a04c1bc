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

#include "morphfit/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "morphfit/error.hpp"

namespace morphfit {

namespace {

std::uint64_t edge_key(std::int32_t a, std::int32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

double log_normal(double x, double variance) {
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - 0.5 * x * x / variance;
}

double log_exponential(double x, double rate) { return std::log(rate) - rate * x; }

}  // namespace

TargetSurface::TargetSurface(TriangleMesh mesh) : index_(std::move(mesh)) {
  const TriangleMesh& m = index_.mesh();
  boundary_vertex_.assign(m.vertex_count(), 0);
  for (const auto& [a, b] : boundary_edges(m)) {
    boundary_edges_.insert(edge_key(a, b));
    boundary_vertex_[a] = boundary_vertex_[b] = 1;
  }
}

bool TargetSurface::on_boundary(const SurfacePoint& point) const {
  if (boundary_edges_.empty() || point.triangle < 0) return false;
  const Face& f = mesh().faces()[point.triangle];
  constexpr double kEps = 1e-12;
  int zeros = 0;
  int zero_at = -1;
  for (int k = 0; k < 3; ++k) {
    if (point.barycentric[k] <= kEps) {
      ++zeros;
      zero_at = k;
    }
  }
  if (zeros == 0) return false;
  if (zeros >= 2) {
    int corner = 0;
    point.barycentric.maxCoeff(&corner);
    return is_boundary_vertex(f[corner]);
  }
  return boundary_edges_.count(edge_key(f[(zero_at + 1) % 3], f[(zero_at + 2) % 3])) > 0;
}

void LikelihoodConfig::validate() const {
  if (!(sigma_l2 > 0.0)) throw ValidationError("sigma_l2 must be positive");
  if (!(lambda_h > 0.0)) throw ValidationError("lambda_h must be positive");
  if (!(sigma_cl > 0.0)) throw ValidationError("sigma_cl must be positive");
}

std::string to_string(LikelihoodConfig::Kind kind) {
  switch (kind) {
    case LikelihoodConfig::Kind::kL2: return "l2";
    case LikelihoodConfig::Kind::kHausdorff: return "hausdorff";
    case LikelihoodConfig::Kind::kCollective: return "collective";
  }
  return "?";
}

LikelihoodConfig::Kind likelihood_kind_from_string(const std::string& name) {
  if (name == "l2") return LikelihoodConfig::Kind::kL2;
  if (name == "hausdorff") return LikelihoodConfig::Kind::kHausdorff;
  if (name == "collective") return LikelihoodConfig::Kind::kCollective;
  throw ValidationError("unknown likelihood '" + name + "' (expected l2, hausdorff or collective)");
}

LikelihoodEvaluation evaluate_likelihood(const LikelihoodConfig& config, const TargetSurface& target,
                                         const TriangleMesh& instance, bool with_hausdorff) {
  using Kind = LikelihoodConfig::Kind;
  const std::size_t n = instance.vertex_count();
  const bool filter = config.kind == Kind::kCollective && config.filter_boundary;

  LikelihoodEvaluation out;
  double sum = 0.0, sum_sq = 0.0, forward_max = 0.0, kept_sq = 0.0, log_l2 = 0.0;
  std::size_t kept = 0;
  const double var_l2 = config.sigma_l2 * config.sigma_l2;
  for (std::size_t i = 0; i < n; ++i) {
    const SurfacePoint cp = target.index().closest_point(instance.vertex(i));
    const double d = cp.distance;
    sum += d;
    sum_sq += d * d;
    if (config.kind == Kind::kL2) log_l2 += log_normal(d, var_l2);
    if (filter && target.on_boundary(cp)) {
      ++out.filtered;
      continue;
    }
    ++kept;
    kept_sq += d * d;
    forward_max = std::max(forward_max, d);
  }
  out.mean_distance = n ? sum / static_cast<double>(n) : 0.0;

  // Reverse direction of the Hausdorff distance needs the instance surface.
  double backward_max = 0.0;
  if (config.kind != Kind::kL2 || with_hausdorff) {
    const TriangleBvh instance_index(instance);
    for (const Vec3& t : target.mesh().vertices()) {
      backward_max = std::max(backward_max, instance_index.closest_point(t).distance);
    }
  }
  out.hausdorff = config.kind != Kind::kL2 || with_hausdorff ? std::max(forward_max, backward_max)
                                                               : std::numeric_limits<double>::quiet_NaN();

  switch (config.kind) {
    case Kind::kL2:
      out.log_likelihood = log_l2;
      break;
    case Kind::kHausdorff:
      out.log_likelihood = log_exponential(out.hausdorff, config.lambda_h);
      break;
    case Kind::kCollective: {
      if (kept == 0) throw ValidationError("every instance vertex maps onto the target boundary; no overlap left");
      const double d_cl = kept_sq / static_cast<double>(kept);
      out.log_likelihood =
          log_normal(d_cl, config.sigma_cl * config.sigma_cl) + log_exponential(out.hausdorff, config.lambda_h);
      break;
    }
  }
  return out;
}

double log_likelihood_l2(const TargetSurface& target, const TriangleMesh& instance, double sigma) {
  LikelihoodConfig c;
  c.kind = LikelihoodConfig::Kind::kL2;
  c.sigma_l2 = sigma;
  c.validate();
  return evaluate_likelihood(c, target, instance).log_likelihood;
}

double log_likelihood_hausdorff(const TargetSurface& target, const TriangleMesh& instance, double lambda) {
  LikelihoodConfig c;
  c.kind = LikelihoodConfig::Kind::kHausdorff;
  c.lambda_h = lambda;
  c.validate();
  return evaluate_likelihood(c, target, instance).log_likelihood;
}

double log_likelihood_collective(const TargetSurface& target, const TriangleMesh& instance, double sigma_cl,
                                 double lambda_h, bool filter_boundary) {
  LikelihoodConfig c;
  c.kind = LikelihoodConfig::Kind::kCollective;
  c.sigma_cl = sigma_cl;
  c.lambda_h = lambda_h;
  c.filter_boundary = filter_boundary;
  c.validate();
  return evaluate_likelihood(c, target, instance).log_likelihood;
}

double hausdorff_distance(const TargetSurface& target, const TriangleMesh& instance) {
  LikelihoodConfig c;
  c.kind = LikelihoodConfig::Kind::kHausdorff;
  return evaluate_likelihood(c, target, instance, true).hausdorff;
}

double mean_distance(const TargetSurface& target, const TriangleMesh& instance) {
  double sum = 0.0;
  for (const Vec3& v : instance.vertices()) sum += target.index().closest_point(v).distance;
  return instance.vertex_count() ? sum / static_cast<double>(instance.vertex_count()) : 0.0;
}

}  // namespace morphfit
