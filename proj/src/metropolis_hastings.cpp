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

#include "morphfit/metropolis_hastings.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "morphfit/error.hpp"

namespace morphfit {

double ChainRecord::acceptance_rate() const {
  if (steps.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& s : steps) n += s.accepted ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(steps.size());
}

std::size_t ChainRecord::map_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i].log_posterior() > steps[best].log_posterior()) best = i;
  }
  return best;
}

void ChainRecord::write_csv(std::ostream& out, bool with_timing) const {
  out << (with_timing ? "iteration,log_posterior,log_likelihood,log_prior,accepted,proposal,wall_ms,mean_distance\n"
                      : "iteration,log_posterior,log_likelihood,log_prior,accepted,proposal,mean_distance\n");
  char buf[256];
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const ChainStep& s = steps[i];
    int n = std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%d,%s,", i, s.log_posterior(),
                          s.terms.log_likelihood, s.terms.log_prior, s.accepted ? 1 : 0, s.tag.c_str());
    if (with_timing) n += std::snprintf(buf + n, sizeof buf - static_cast<std::size_t>(n), "%.3f,", s.wall_ms);
    std::snprintf(buf + n, sizeof buf - static_cast<std::size_t>(n), "%.17g\n", s.terms.mean_distance);
    out << buf;
  }
}

ChainRecord metropolis_hastings(const Coefficients& init, Proposal& proposal, const PosteriorFunction& posterior,
                                int iterations, Rng& rng) {
  return metropolis_hastings(init, proposal, posterior, iterations, rng, nullptr);
}

ChainRecord metropolis_hastings(const Coefficients& init, Proposal& proposal, const PosteriorFunction& posterior,
                                int iterations, Rng& rng, std::vector<double>* log_ratios) {
  if (iterations < 1) throw ValidationError("metropolis_hastings needs at least one iteration");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  Coefficients current = init;
  PosteriorTerms current_terms = posterior(current);
  if (!std::isfinite(current_terms.total())) {
    throw NumericError("initial state has a non-finite log posterior");
  }

  ChainRecord record;
  record.steps.reserve(static_cast<std::size_t>(iterations));
  if (log_ratios) log_ratios->clear();

  for (int i = 0; i < iterations; ++i) {
    ProposalDraw draw = proposal.propose(current, rng);
    const PosteriorTerms proposed_terms = posterior(draw.state);

    double log_t = -std::numeric_limits<double>::infinity();
    if (std::isfinite(proposed_terms.total())) {
      log_t = (proposal.log_transition(draw.state, current) + proposed_terms.total()) -
              (proposal.log_transition(current, draw.state) + current_terms.total());
    }
    const double log_u = std::log(uniform01(rng));
    const bool accept = std::isfinite(proposed_terms.total()) && log_t > log_u;
    if (log_ratios) {
      log_ratios->push_back(std::isfinite(proposed_terms.total()) ? log_t
                                                                  : std::numeric_limits<double>::quiet_NaN());
    }
    if (accept) {
      current = std::move(draw.state);
      current_terms = proposed_terms;
    }

    ChainStep step;
    step.state = current;
    step.terms = current_terms;
    step.accepted = accept;
    step.tag = std::move(draw.tag);
    step.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    record.steps.push_back(std::move(step));
  }
  return record;
}

}  // namespace morphfit
