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

#include "morphfit/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "morphfit/error.hpp"

namespace morphfit {

double log_sum_exp(const std::vector<double>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

void check_weights(const std::vector<double>& weights, const char* what) {
  if (weights.empty()) throw ValidationError(std::string(what) + ": no mixture components");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError(std::string(what) + ": weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError(std::string(what) + ": weights must sum to 1");
}

std::size_t pick_component(const std::vector<double>& weights, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding left u beyond the last cumulative weight.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return 0;
}

RandomWalkProposal::RandomWalkProposal(std::vector<double> scales, std::vector<double> weights)
    : scales_(std::move(scales)), weights_(std::move(weights)) {
  if (scales_.size() != weights_.size()) throw ValidationError("random walk: one weight per scale");
  for (double s : scales_)
    if (!(s > 0.0)) throw ValidationError("random walk: scales must be positive");
  check_weights(weights_, "random walk");
}

RandomWalkProposal RandomWalkProposal::standard() {
  return RandomWalkProposal({1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5}, std::vector<double>(6, 1.0 / 6.0));
}

ProposalDraw RandomWalkProposal::propose(const Coefficients& current, Rng& rng) {
  const std::size_t k = pick_component(weights_, rng);
  return {current + scales_[k] * standard_normal(current.size(), rng), tag()};
}

double RandomWalkProposal::log_transition(const Coefficients& from, const Coefficients& to) {
  const double r = static_cast<double>(from.size());
  const double d2 = (to - from).squaredNorm();
  std::vector<double> terms;
  terms.reserve(scales_.size());
  for (std::size_t k = 0; k < scales_.size(); ++k) {
    if (weights_[k] <= 0.0) continue;
    const double var = scales_[k] * scales_[k];
    terms.push_back(std::log(weights_[k]) - 0.5 * r * std::log(2.0 * std::numbers::pi * var) - 0.5 * d2 / var);
  }
  return log_sum_exp(terms);
}

MixtureProposal::MixtureProposal(std::vector<Component> components) : components_(std::move(components)) {
  std::vector<double> w;
  for (const auto& c : components_) {
    if (!c.proposal) throw ValidationError("mixture proposal: null component");
    w.push_back(c.weight);
  }
  check_weights(w, "mixture proposal");
}

ProposalDraw MixtureProposal::propose(const Coefficients& current, Rng& rng) {
  std::vector<double> w;
  for (const auto& c : components_) w.push_back(c.weight);
  return components_[pick_component(w, rng)].proposal->propose(current, rng);
}

double MixtureProposal::log_transition(const Coefficients& from, const Coefficients& to) {
  std::vector<double> terms;
  for (const auto& c : components_) {
    if (c.weight <= 0.0) continue;
    terms.push_back(std::log(c.weight) + c.proposal->log_transition(from, to));
  }
  return log_sum_exp(terms);
}

}  // namespace morphfit
