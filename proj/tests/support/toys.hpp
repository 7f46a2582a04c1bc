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

// Small problems shared by unit tests and the acceptance suite.

#ifndef MORPHFIT_TESTS_TOYS_HPP
#define MORPHFIT_TESTS_TOYS_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "morphfit/cp_proposal.hpp"
#include "morphfit/likelihood.hpp"
#include "morphfit/proposal.hpp"
#include "morphfit/shape_model.hpp"
#include "morphfit/synth.hpp"

namespace morphfit::testing {

/// Rank-2 model on a sphere with an in-span target.
struct CpToy {
  LowRankGP model;
  TargetSurface target;

  static CpToy make() {
    const TriangleMesh ref = make_icosphere(1, 10.0);
    LowRankGP model = build_low_rank(GaussianKernel(4.0, 20.0), ref, 2);
    Coefficients truth(2);
    truth << 1.2, -0.7;
    TargetSurface target(model.instance(truth));
    return {std::move(model), std::move(target)};
  }
};

/// Compares a Monte Carlo estimate of a 2D proposal density with its
/// analytic density over a disc around `probe`. The disc radius is the
/// distance to the `neighbours`-th nearest draw; the analytic side
/// integrates exp(log_transition) over the same disc on a polar grid, so
/// smoothing bias cancels.
struct DensityCheck {
  double empirical = 0.0;  // draws in disc / (N * area)
  double analytic = 0.0;   // mean of exp(log_transition) over the disc
  double relative_error() const { return std::abs(empirical - analytic) / analytic; }
};

inline DensityCheck check_density(Proposal& proposal, const Coefficients& from, const std::vector<Coefficients>& draws,
                                  const Coefficients& probe, std::size_t neighbours) {
  std::vector<double> dist;
  dist.reserve(draws.size());
  for (const auto& d : draws) dist.push_back((d - probe).norm());
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(neighbours), dist.end());
  const double h = dist[neighbours];
  const double area = std::numbers::pi * h * h;

  DensityCheck out;
  out.empirical = static_cast<double>(neighbours) / (static_cast<double>(draws.size()) * area);

  constexpr int kRadial = 48;
  constexpr int kAngular = 64;
  double mass = 0.0;
  for (int i = 0; i < kRadial; ++i) {
    const double r0 = h * i / kRadial;
    const double r1 = h * (i + 1) / kRadial;
    const double rm = 0.5 * (r0 + r1);
    const double ring = 0.5 * (r1 * r1 - r0 * r0) * (2.0 * std::numbers::pi / kAngular);
    for (int k = 0; k < kAngular; ++k) {
      const double t = 2.0 * std::numbers::pi * (k + 0.5) / kAngular;
      Coefficients p = probe;
      p[0] += rm * std::cos(t);
      p[1] += rm * std::sin(t);
      mass += std::exp(proposal.log_transition(from, p)) * ring;
    }
  }
  out.analytic = mass / area;
  return out;
}

}  // namespace morphfit::testing

#endif  // MORPHFIT_TESTS_TOYS_HPP
