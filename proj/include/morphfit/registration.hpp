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

#ifndef MORPHFIT_REGISTRATION_HPP
#define MORPHFIT_REGISTRATION_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "morphfit/cp_proposal.hpp"
#include "morphfit/likelihood.hpp"
#include "morphfit/metropolis_hastings.hpp"
#include "morphfit/shape_model.hpp"

namespace morphfit {

/// Posterior over model coefficients for one target; thread-compatible
/// (holds only references to immutable data).
class RegistrationPosterior {
 public:
  RegistrationPosterior(const LowRankGP& model, const TargetSurface& target, LikelihoodConfig likelihood);

  PosteriorTerms operator()(const Coefficients& alpha) const;

 private:
  const LowRankGP& model_;
  const TargetSurface& target_;
  LikelihoodConfig likelihood_;
};

struct RandomWalkConfig {
  std::vector<double> scales{1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<double> weights{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};
};

struct McmcSettings {
  enum class ProposalKind { kCp, kRandomWalk, kMixture };
  LikelihoodConfig likelihood;
  ProposalKind proposal = ProposalKind::kCp;
  CpProposalConfig cp;
  RandomWalkConfig random_walk;
  double cp_weight = 0.5;  // share of CP draws in the mixture proposal
  int iterations = 1000;
  int burn_in = 300;
  int thinning = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string to_string(McmcSettings::ProposalKind kind);
McmcSettings::ProposalKind proposal_kind_from_string(const std::string& name);

std::unique_ptr<Proposal> make_proposal(const McmcSettings& settings, const LowRankGP& model,
                                        const TargetSurface& target);

/// Per-vertex variance of registered positions.
struct UncertaintyMap {
  Eigen::VectorXd total;       // trace of the 3x3 position covariance (mm^2)
  Eigen::VectorXd normal;      // n^T C n
  Eigen::VectorXd tangential;  // total - normal
};

struct RegistrationResult {
  std::string method;  // "mcmc" or "icp"
  Coefficients map_coefficients;
  TriangleMesh map_mesh;
  double map_log_posterior = 0.0;
  std::vector<Coefficients> samples;  // post burn-in, thinned
  std::optional<UncertaintyMap> uncertainty;
  double mean_l2 = 0.0;    // MAP mean distance to target (mm)
  double hausdorff = 0.0;  // MAP symmetric Hausdorff distance (mm)
  double acceptance_rate = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  std::optional<ChainRecord> chain;
  std::vector<Coefficients> trajectory;  // ICP iterates
  std::vector<double> trajectory_distance;
};

/// Runs one Metropolis-Hastings chain from `init` (zero when empty), takes the
/// recorded state with the largest log posterior as MAP and keeps every
/// `thinning`-th state after burn-in as posterior samples.
RegistrationResult register_mcmc(const LowRankGP& model, const TargetSurface& target, const McmcSettings& settings,
                                 const Coefficients& init = {});

struct IcpSettings {
  int iterations = 100;
  double sigma = 1.0;  // isotropic correspondence noise (mm)
  double tolerance = 1e-4;  // stop when the mean distance changes less (mm)
  bool filter_boundary = false;

  void validate() const;
};

/// Deterministic non-rigid ICP in model space: closest points from the current
/// instance, isotropic-noise regression, jump to the posterior mean.
RegistrationResult register_icp(const LowRankGP& model, const TargetSurface& target, const IcpSettings& settings,
                                const Coefficients& init = {});

/// Throws ValidationError for fewer than two samples.
UncertaintyMap uncertainty_map(const LowRankGP& model, const std::vector<Coefficients>& samples,
                               const std::vector<Vec3>& normals);

/// Classical point distribution model from deformation samples, rank
/// min(3n, samples - 1).
LowRankGP build_pdm(const std::vector<DeformationField>& samples, const TriangleMesh& reference);

/// Eigenvalues above 1e-10 of the largest (and above 1e-12 absolute).
int count_nonzero_eigenvalues(const LowRankGP& model);

struct GeneralizationCurve {
  /// errors[c - 1] = root-mean-square vertex error (mm) using the leading c
  /// components; the least-squares objective, hence non-increasing in c.
  std::vector<double> errors;
};

/// Reconstructs the held-out deformation with 1..max_components leading
/// components (capped at the model rank; further entries repeat the last).
GeneralizationCurve generalization(const LowRankGP& pdm, const DeformationField& held_out, int max_components);

/// Triangles whose normal points against the same triangle on the reference.
int count_fold_overs(const TriangleMesh& reference, const TriangleMesh& deformed);

}  // namespace morphfit

#endif  // MORPHFIT_REGISTRATION_HPP
