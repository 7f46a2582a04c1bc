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

#ifndef MORPHFIT_METROPOLIS_HASTINGS_HPP
#define MORPHFIT_METROPOLIS_HASTINGS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "morphfit/proposal.hpp"
#include "morphfit/random.hpp"
#include "morphfit/shape_model.hpp"

namespace morphfit {

/// Unnormalised log posterior split into its parts.
struct PosteriorTerms {
  double log_likelihood = 0.0;
  double log_prior = 0.0;
  /// Optional diagnostic carried into the chain record (mean surface distance).
  double mean_distance = std::numeric_limits<double>::quiet_NaN();

  double total() const { return log_likelihood + log_prior; }
};

using PosteriorFunction = std::function<PosteriorTerms(const Coefficients&)>;

struct ChainStep {
  Coefficients state;
  PosteriorTerms terms;
  bool accepted = false;
  std::string tag;
  double wall_ms = 0.0;  // since the chain started

  double log_posterior() const { return terms.total(); }
};

struct ChainRecord {
  std::vector<ChainStep> steps;
  std::uint64_t seed = 0;
  std::string config;  // snapshot of the run configuration

  double acceptance_rate() const;
  /// Index of the step with the largest log posterior (first on ties).
  std::size_t map_index() const;

  /// iteration,log_posterior,log_likelihood,log_prior,accepted,proposal,wall_ms,mean_distance
  /// (wall_ms omitted without timing, which makes the file reproducible).
  void write_csv(std::ostream& out, bool with_timing = true) const;
};

/// Metropolis-Hastings in log space. Per iteration: draw a' ~ Q(.|a), compute
///   ln t = [ln q(a|a') + ln p(a')] - [ln q(a'|a) + ln p(a)]
/// and accept iff ln t > ln u, u ~ U(0,1); a rejected step repeats the state.
/// Throws ValidationError if iterations < 1 and NumericError if the initial
/// state has a non-finite log posterior.
ChainRecord metropolis_hastings(const Coefficients& init, Proposal& proposal, const PosteriorFunction& posterior,
                                int iterations, Rng& rng);

/// Variant that reports the acceptance log-ratio of every step (NaN when the
/// proposed state has zero posterior) for diagnostics.
ChainRecord metropolis_hastings(const Coefficients& init, Proposal& proposal, const PosteriorFunction& posterior,
                                int iterations, Rng& rng, std::vector<double>* log_ratios);

}  // namespace morphfit

#endif  // MORPHFIT_METROPOLIS_HASTINGS_HPP
