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

#ifndef MORPHFIT_CP_PROPOSAL_HPP
#define MORPHFIT_CP_PROPOSAL_HPP

#include <cstdint>
#include <list>
#include <optional>
#include <vector>

#include "morphfit/gp_regression.hpp"
#include "morphfit/likelihood.hpp"
#include "morphfit/proposal.hpp"

namespace morphfit {

struct StepLength {
  double length;
  double weight;
};

struct CpProposalConfig {
  /// Number of model vertices used for correspondences; 0 picks all vertices
  /// up to 5000 and a fixed random subset of 1000 above that.
  std::size_t model_points = 0;
  double normal_variance = 3.0;        // mm^2
  double tangential_variance = 100.0;  // mm^2
  std::vector<StepLength> steps{{0.1, 0.7}, {0.5, 0.2}, {1.0, 0.1}};
  /// Probability of matching target vertices to the instance instead of the
  /// other way round.
  double flip_probability = 0.2;
  /// Drop correspondences whose target point lies on the target boundary.
  bool filter_boundary = false;
  /// Random-walk scale used when no correspondence survives filtering.
  double fallback_scale = 1.0;
  std::uint64_t subset_seed = 0;

  /// Throws ValidationError (also for step length 0, which would freeze the chain).
  void validate() const;
};

/// Closest-point proposal. From state a:
///   1. take the selected model vertices on instance(a),
///   2. match them to their closest target points (or, with probability
///      flip_probability, match target vertices to the instance surface and
///      assign each to the nearest vertex of the hit face),
///   3. build observations with noise from the instance normals,
///   4. regress the model on them,
///   5. draw a_o from that posterior,
///   6. return a + d (a_o - a) with d drawn from the step-length mixture.
///
/// Correspondences are a deterministic function of (a, direction), so
///   q(a'|a) = sum_dir p_dir sum_j w_j N(a + (a'-a)/d_j; mu_dir, S_dir) d_j^-r.
class CpProposal final : public Proposal {
 public:
  CpProposal(const LowRankGP& model, const TargetSurface& target, CpProposalConfig config);

  ProposalDraw propose(const Coefficients& current, Rng& rng) override;
  double log_transition(const Coefficients& from, const Coefficients& to) override;
  std::string tag() const override { return "cp"; }

  /// Posterior built from the correspondences at `state`; nullptr when every
  /// correspondence was filtered (the fallback random walk applies).
  const PosteriorModel* posterior_at(const Coefficients& state, bool flipped);

  /// Correspondences used at `state`.
  std::vector<LandmarkObservation> observations_at(const Coefficients& state, bool flipped) const;

  /// a_o drawn by the most recent propose() (empty for fallback steps).
  const Coefficients& last_posterior_sample() const noexcept { return last_sample_; }
  double last_step_length() const noexcept { return last_step_; }

  const CpProposalConfig& config() const noexcept { return config_; }
  const std::vector<std::size_t>& model_points() const noexcept { return model_points_; }

 private:
  struct CacheEntry {
    Coefficients state;
    std::optional<std::optional<PosteriorModel>> forward;
    std::optional<std::optional<PosteriorModel>> flipped;
  };

  CacheEntry& entry(const Coefficients& state);
  double log_transition_given(const PosteriorModel* posterior, const Coefficients& from, const Coefficients& to) const;

  const LowRankGP& model_;
  const TargetSurface& target_;
  CpProposalConfig config_;
  std::vector<std::size_t> model_points_;
  std::vector<std::size_t> target_points_;
  std::list<CacheEntry> cache_;
  Coefficients last_sample_;
  double last_step_ = 0.0;
};

}  // namespace morphfit

#endif  // MORPHFIT_CP_PROPOSAL_HPP
