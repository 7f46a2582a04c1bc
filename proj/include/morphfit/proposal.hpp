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

#ifndef MORPHFIT_PROPOSAL_HPP
#define MORPHFIT_PROPOSAL_HPP

#include <memory>
#include <string>
#include <vector>

#include "morphfit/random.hpp"
#include "morphfit/shape_model.hpp"

namespace morphfit {

struct ProposalDraw {
  Coefficients state;
  std::string tag;
};

/// Stochastic proposal Q(a' | a) with a computable transition density.
///
/// Implementations may cache per-state work, so neither method is const;
/// give every chain its own proposal.
class Proposal {
 public:
  virtual ~Proposal() = default;

  virtual ProposalDraw propose(const Coefficients& current, Rng& rng) = 0;

  /// log q(to | from).
  virtual double log_transition(const Coefficients& from, const Coefficients& to) = 0;

  virtual std::string tag() const = 0;
};

/// log(sum exp(x_i)), stable; -inf for an empty or all -inf input.
double log_sum_exp(const std::vector<double>& terms);

/// Mixture of isotropic Gaussian random walks; each draw picks one scale by
/// weight. Transition density is the full mixture density.
class RandomWalkProposal final : public Proposal {
 public:
  RandomWalkProposal(std::vector<double> scales, std::vector<double> weights);

  /// Six decade-spaced scales 1 .. 1e-5, equally likely.
  static RandomWalkProposal standard();

  ProposalDraw propose(const Coefficients& current, Rng& rng) override;
  double log_transition(const Coefficients& from, const Coefficients& to) override;
  std::string tag() const override { return "rw"; }

  const std::vector<double>& scales() const noexcept { return scales_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

 private:
  std::vector<double> scales_;
  std::vector<double> weights_;
};

/// Picks one of several proposals by weight per draw.
class MixtureProposal final : public Proposal {
 public:
  struct Component {
    std::unique_ptr<Proposal> proposal;
    double weight;
  };

  explicit MixtureProposal(std::vector<Component> components);

  ProposalDraw propose(const Coefficients& current, Rng& rng) override;
  double log_transition(const Coefficients& from, const Coefficients& to) override;
  std::string tag() const override { return "mixture"; }

 private:
  std::vector<Component> components_;
};

/// Validates mixture weights (non-negative, sum to 1 within 1e-9) and returns
/// the index selected by a uniform draw.
void check_weights(const std::vector<double>& weights, const char* what);
std::size_t pick_component(const std::vector<double>& weights, Rng& rng);

}  // namespace morphfit

#endif  // MORPHFIT_PROPOSAL_HPP
