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

#include "morphfit/cp_proposal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "morphfit/error.hpp"

namespace morphfit {

namespace {

constexpr std::size_t kAllPointsLimit = 5000;
constexpr std::size_t kSubsetSize = 1000;
constexpr std::size_t kCacheSize = 4;

std::vector<std::size_t> choose_points(std::size_t n, std::size_t requested, std::uint64_t seed) {
  std::size_t m = requested;
  if (m == 0) m = n <= kAllPointsLimit ? n : kSubsetSize;
  m = std::min(m, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (m == n) return idx;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

void CpProposalConfig::validate() const {
  if (!(normal_variance > 0.0) || !(tangential_variance > 0.0)) {
    throw ValidationError("cp proposal: variances must be positive");
  }
  if (steps.empty()) throw ValidationError("cp proposal: no step lengths");
  std::vector<double> w;
  for (const auto& s : steps) {
    if (!(s.length > 0.0) || s.length > 1.0) {
      throw ValidationError("cp proposal: step lengths must lie in (0, 1]");
    }
    w.push_back(s.weight);
  }
  check_weights(w, "cp proposal steps");
  if (!(flip_probability >= 0.0 && flip_probability <= 1.0)) {
    throw ValidationError("cp proposal: flip probability must lie in [0, 1]");
  }
  if (!(fallback_scale > 0.0)) throw ValidationError("cp proposal: fallback scale must be positive");
}

CpProposal::CpProposal(const LowRankGP& model, const TargetSurface& target, CpProposalConfig config)
    : model_(model), target_(target), config_(std::move(config)) {
  config_.validate();
  model_points_ = choose_points(model_.vertex_count(), config_.model_points, config_.subset_seed);
  target_points_ = choose_points(target_.mesh().vertex_count(), config_.model_points, config_.subset_seed + 1);
}

std::vector<LandmarkObservation> CpProposal::observations_at(const Coefficients& state, bool flipped) const {
  const TriangleMesh instance = model_.instance(state);
  const std::vector<Vec3> normals = vertex_normals_or_zero(instance);
  const auto& ref = model_.reference().vertices();

  auto noise_at = [&](std::size_t j) -> Mat3 {
    if (normals[j].squaredNorm() == 0.0) return config_.tangential_variance * Mat3::Identity();
    return landmark_noise(normals[j], config_.normal_variance, config_.tangential_variance);
  };

  std::vector<LandmarkObservation> obs;
  if (!flipped) {
    obs.reserve(model_points_.size());
    for (std::size_t j : model_points_) {
      const SurfacePoint cp = target_.index().closest_point(instance.vertex(j));
      if (config_.filter_boundary && target_.on_boundary(cp)) continue;
      obs.push_back({j, cp.position - ref[j], noise_at(j)});
    }
    return obs;
  }

  const TriangleBvh instance_index(instance);
  obs.reserve(target_points_.size());
  for (std::size_t t : target_points_) {
    if (config_.filter_boundary && target_.is_boundary_vertex(t)) continue;
    const Vec3& p = target_.mesh().vertex(t);
    const SurfacePoint cp = instance_index.closest_point(p);
    int corner = 0;
    cp.barycentric.maxCoeff(&corner);
    const auto j = static_cast<std::size_t>(instance.faces()[cp.triangle][corner]);
    obs.push_back({j, p - ref[j], noise_at(j)});
  }
  return obs;
}

CpProposal::CacheEntry& CpProposal::entry(const Coefficients& state) {
  for (auto it = cache_.begin(); it != cache_.end(); ++it) {
    if (it->state.size() == state.size() && it->state == state) {
      cache_.splice(cache_.begin(), cache_, it);
      return cache_.front();
    }
  }
  cache_.push_front(CacheEntry{state, std::nullopt, std::nullopt});
  if (cache_.size() > kCacheSize) cache_.pop_back();
  return cache_.front();
}

const PosteriorModel* CpProposal::posterior_at(const Coefficients& state, bool flipped) {
  CacheEntry& e = entry(state);
  auto& slot = flipped ? e.flipped : e.forward;
  if (!slot) {
    const std::vector<LandmarkObservation> obs = observations_at(state, flipped);
    if (obs.empty()) {
      slot.emplace(std::nullopt);
    } else {
      slot.emplace(regress(model_, obs));
    }
  }
  return slot->has_value() ? &**slot : nullptr;
}

ProposalDraw CpProposal::propose(const Coefficients& current, Rng& rng) {
  const bool flipped = uniform01(rng) < config_.flip_probability;
  std::vector<double> w;
  for (const auto& s : config_.steps) w.push_back(s.weight);
  const double d = config_.steps[pick_component(w, rng)].length;

  const PosteriorModel* post = posterior_at(current, flipped);
  if (!post) {
    last_sample_.resize(0);
    last_step_ = 0.0;
    return {current + config_.fallback_scale * standard_normal(current.size(), rng), "cp-fallback"};
  }
  last_sample_ = post->sample(rng);
  last_step_ = d;
  return {current + d * (last_sample_ - current), flipped ? "cp-flip" : "cp"};
}

double CpProposal::log_transition_given(const PosteriorModel* posterior, const Coefficients& from,
                                        const Coefficients& to) const {
  const double r = static_cast<double>(from.size());
  if (!posterior) {
    const double var = config_.fallback_scale * config_.fallback_scale;
    return -0.5 * r * std::log(2.0 * std::numbers::pi * var) - 0.5 * (to - from).squaredNorm() / var;
  }
  std::vector<double> terms;
  terms.reserve(config_.steps.size());
  for (const auto& s : config_.steps) {
    if (s.weight <= 0.0) continue;
    const Coefficients sample = from + (to - from) / s.length;
    terms.push_back(std::log(s.weight) + posterior->log_density(sample) - r * std::log(s.length));
  }
  return log_sum_exp(terms);
}

double CpProposal::log_transition(const Coefficients& from, const Coefficients& to) {
  std::vector<double> terms;
  const double p = config_.flip_probability;
  if (p < 1.0) terms.push_back(std::log1p(-p) + log_transition_given(posterior_at(from, false), from, to));
  if (p > 0.0) terms.push_back(std::log(p) + log_transition_given(posterior_at(from, true), from, to));
  return log_sum_exp(terms);
}

}  // namespace morphfit
