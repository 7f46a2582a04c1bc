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

#include "morphfit/registration.hpp"

#include <chrono>
#include <cmath>

#include "morphfit/error.hpp"
#include "morphfit/gp_regression.hpp"

namespace morphfit {

RegistrationPosterior::RegistrationPosterior(const LowRankGP& model, const TargetSurface& target,
                                             LikelihoodConfig likelihood)
    : model_(model), target_(target), likelihood_(likelihood) {
  likelihood_.validate();
}

PosteriorTerms RegistrationPosterior::operator()(const Coefficients& alpha) const {
  PosteriorTerms terms;
  terms.log_prior = model_.log_prior(alpha);
  const LikelihoodEvaluation eval = evaluate_likelihood(likelihood_, target_, model_.instance(alpha));
  terms.log_likelihood = eval.log_likelihood;
  terms.mean_distance = eval.mean_distance;
  return terms;
}

void McmcSettings::validate() const {
  likelihood.validate();
  if (iterations < 1) throw ValidationError("iterations must be at least 1");
  if (burn_in < 0 || burn_in >= iterations) throw ValidationError("burn-in must lie in [0, iterations)");
  if (thinning < 1) throw ValidationError("thinning must be at least 1");
  if (proposal != ProposalKind::kRandomWalk) cp.validate();
  if (proposal == ProposalKind::kMixture && !(cp_weight > 0.0 && cp_weight < 1.0)) {
    throw ValidationError("mixture cp weight must lie in (0, 1)");
  }
}

std::string to_string(McmcSettings::ProposalKind kind) {
  switch (kind) {
    case McmcSettings::ProposalKind::kCp: return "cp";
    case McmcSettings::ProposalKind::kRandomWalk: return "random-walk";
    case McmcSettings::ProposalKind::kMixture: return "mixture";
  }
  return "?";
}

McmcSettings::ProposalKind proposal_kind_from_string(const std::string& name) {
  if (name == "cp") return McmcSettings::ProposalKind::kCp;
  if (name == "random-walk" || name == "rw") return McmcSettings::ProposalKind::kRandomWalk;
  if (name == "mixture") return McmcSettings::ProposalKind::kMixture;
  throw ValidationError("unknown proposal '" + name + "' (expected cp, random-walk or mixture)");
}

std::unique_ptr<Proposal> make_proposal(const McmcSettings& settings, const LowRankGP& model,
                                        const TargetSurface& target) {
  using Kind = McmcSettings::ProposalKind;
  auto rw = [&] {
    return std::make_unique<RandomWalkProposal>(settings.random_walk.scales, settings.random_walk.weights);
  };
  switch (settings.proposal) {
    case Kind::kCp:
      return std::make_unique<CpProposal>(model, target, settings.cp);
    case Kind::kRandomWalk:
      return rw();
    case Kind::kMixture: {
      std::vector<MixtureProposal::Component> parts;
      parts.push_back({std::make_unique<CpProposal>(model, target, settings.cp), settings.cp_weight});
      parts.push_back({rw(), 1.0 - settings.cp_weight});
      return std::make_unique<MixtureProposal>(std::move(parts));
    }
  }
  throw ValidationError("unknown proposal kind");
}

RegistrationResult register_mcmc(const LowRankGP& model, const TargetSurface& target, const McmcSettings& settings,
                                 const Coefficients& init) {
  settings.validate();
  const auto start = std::chrono::steady_clock::now();
  const Coefficients alpha0 = init.size() ? init : Coefficients(Coefficients::Zero(model.rank()));
  if (alpha0.size() != model.rank()) throw ValidationError("initial coefficients do not match the model rank");

  RegistrationPosterior posterior(model, target, settings.likelihood);
  std::unique_ptr<Proposal> proposal = make_proposal(settings, model, target);
  Rng rng(settings.seed);
  ChainRecord chain = metropolis_hastings(alpha0, *proposal, std::cref(posterior), settings.iterations, rng);
  chain.seed = settings.seed;

  RegistrationResult out;
  out.method = "mcmc";
  const std::size_t map = chain.map_index();
  out.map_coefficients = chain.steps[map].state;
  out.map_log_posterior = chain.steps[map].log_posterior();
  out.map_mesh = model.instance(out.map_coefficients);
  for (std::size_t i = static_cast<std::size_t>(settings.burn_in); i < chain.steps.size();
       i += static_cast<std::size_t>(settings.thinning)) {
    out.samples.push_back(chain.steps[i].state);
  }
  if (out.samples.size() >= 2) {
    out.uncertainty = uncertainty_map(model, out.samples, vertex_normals_or_zero(out.map_mesh));
  }
  out.mean_l2 = mean_distance(target, out.map_mesh);
  out.hausdorff = hausdorff_distance(target, out.map_mesh);
  out.acceptance_rate = chain.acceptance_rate();
  out.iterations = settings.iterations;
  out.chain = std::move(chain);
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void IcpSettings::validate() const {
  if (iterations < 1) throw ValidationError("ICP needs at least one iteration");
  if (!(sigma > 0.0)) throw ValidationError("ICP noise sigma must be positive");
  if (!(tolerance >= 0.0)) throw ValidationError("ICP tolerance must be non-negative");
}

RegistrationResult register_icp(const LowRankGP& model, const TargetSurface& target, const IcpSettings& settings,
                                const Coefficients& init) {
  settings.validate();
  const auto start = std::chrono::steady_clock::now();
  Coefficients alpha = init.size() ? init : Coefficients(Coefficients::Zero(model.rank()));
  if (alpha.size() != model.rank()) throw ValidationError("initial coefficients do not match the model rank");

  const Mat3 noise = settings.sigma * settings.sigma * Mat3::Identity();
  const auto& ref = model.reference().vertices();

  RegistrationResult out;
  out.method = "icp";
  TriangleMesh current = model.instance(alpha);
  double distance = mean_distance(target, current);
  out.trajectory.push_back(alpha);
  out.trajectory_distance.push_back(distance);

  int done = 0;
  for (int it = 0; it < settings.iterations; ++it) {
    std::vector<LandmarkObservation> obs;
    obs.reserve(current.vertex_count());
    for (std::size_t j = 0; j < current.vertex_count(); ++j) {
      const SurfacePoint cp = target.index().closest_point(current.vertex(j));
      if (settings.filter_boundary && target.on_boundary(cp)) continue;
      obs.push_back({j, cp.position - ref[j], noise});
    }
    ++done;
    if (obs.empty()) break;
    alpha = regress(model, obs).mean();
    current = model.instance(alpha);
    const double next = mean_distance(target, current);
    out.trajectory.push_back(alpha);
    out.trajectory_distance.push_back(next);
    const bool converged = std::abs(next - distance) < settings.tolerance;
    distance = next;
    if (converged) break;
  }

  out.map_coefficients = alpha;
  out.map_mesh = std::move(current);
  out.map_log_posterior = std::numeric_limits<double>::quiet_NaN();
  out.mean_l2 = distance;
  out.hausdorff = hausdorff_distance(target, out.map_mesh);
  out.iterations = done;
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

UncertaintyMap uncertainty_map(const LowRankGP& model, const std::vector<Coefficients>& samples,
                               const std::vector<Vec3>& normals) {
  if (samples.size() < 2) throw ValidationError("uncertainty needs at least two samples");
  const std::size_t n = model.vertex_count();
  if (normals.size() != n) throw ValidationError("one normal per vertex required");

  Eigen::MatrixXd positions(3 * n, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t s = 0; s < samples.size(); ++s) {
    positions.col(static_cast<Eigen::Index>(s)) = model.instance_positions(samples[s]);
  }
  const Eigen::VectorXd mean = positions.rowwise().mean();
  positions.colwise() -= mean;
  const double denom = static_cast<double>(samples.size() - 1);

  UncertaintyMap out{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const auto rows = positions.middleRows(3 * static_cast<Eigen::Index>(j), 3);
    const Mat3 cov = rows * rows.transpose() / denom;
    const double total = cov.trace();
    const Vec3& nrm = normals[j];
    const double along = nrm.squaredNorm() > 0.0 ? nrm.dot(cov * nrm) / nrm.squaredNorm() : 0.0;
    out.total[j] = total;
    out.normal[j] = along;
    out.tangential[j] = std::max(total - along, 0.0);
  }
  return out;
}

LowRankGP build_pdm(const std::vector<DeformationField>& samples, const TriangleMesh& reference) {
  return build_from_samples(samples, reference).to_low_rank(reference);
}

int count_nonzero_eigenvalues(const LowRankGP& model) {
  const Eigen::VectorXd& l = model.eigenvalues();
  const double cut = std::max(1e-10 * l[0], 1e-12);
  int n = 0;
  for (Eigen::Index i = 0; i < l.size(); ++i) n += l[i] > cut ? 1 : 0;
  return n;
}

GeneralizationCurve generalization(const LowRankGP& pdm, const DeformationField& held_out, int max_components) {
  if (held_out.size() != pdm.mean().size()) {
    throw ValidationError("held-out shape has " + std::to_string(held_out.size() / 3) + " vertices, model has " +
                          std::to_string(pdm.vertex_count()));
  }
  if (max_components < 1) throw ValidationError("need at least one component");
  const Eigen::VectorXd centered = held_out - pdm.mean();
  const Eigen::VectorXd coeff = pdm.basis().transpose() * centered;
  const double cut = std::max(1e-10 * pdm.eigenvalues()[0], 1e-12);

  GeneralizationCurve curve;
  Eigen::VectorXd residual = centered;
  const auto n = static_cast<Eigen::Index>(pdm.vertex_count());
  for (int c = 1; c <= max_components; ++c) {
    const Eigen::Index i = c - 1;
    if (i < pdm.rank() && pdm.eigenvalues()[i] > cut) residual -= coeff[i] * pdm.basis().col(i);
    curve.errors.push_back(n ? std::sqrt(residual.squaredNorm() / static_cast<double>(n)) : 0.0);
  }
  return curve;
}

int count_fold_overs(const TriangleMesh& reference, const TriangleMesh& deformed) {
  if (reference.face_count() != deformed.face_count()) throw ValidationError("meshes differ in face count");
  const auto a = face_normals(reference);
  const auto b = face_normals(deformed);
  int n = 0;
  for (std::size_t f = 0; f < a.size(); ++f) n += a[f].dot(b[f]) < 0.0 ? 1 : 0;
  return n;
}

}  // namespace morphfit
