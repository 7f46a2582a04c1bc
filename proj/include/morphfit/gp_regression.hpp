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

#ifndef MORPHFIT_GP_REGRESSION_HPP
#define MORPHFIT_GP_REGRESSION_HPP

#include <span>

#include <Eigen/Core>

#include "morphfit/random.hpp"
#include "morphfit/shape_model.hpp"

namespace morphfit {

/// Noisy observation of the deformation at a reference vertex:
/// deformation = l_T - l_R, observed with N(0, noise).
struct LandmarkObservation {
  std::size_t vertex = 0;
  Vec3 deformation = Vec3::Zero();
  Mat3 noise = Mat3::Identity();
};

/// Builds an observation from a reference point and its matched target point.
/// The reference point must coincide with a reference vertex (within 1e-9 mm),
/// otherwise ValidationError.
LandmarkObservation make_observation(const LowRankGP& model, const Vec3& reference_point, const Vec3& target_point,
                                     const Mat3& noise);

/// Noise with variance `normal_variance` along `normal` and
/// `tangential_variance` along the two tangent directions.
Mat3 landmark_noise(const Vec3& normal, double normal_variance, double tangential_variance);

/// Gaussian distribution over the coefficients of a parent model.
///
/// The parent is referenced, not owned; it must outlive the posterior.
class PosteriorModel {
 public:
  /// Covariance must be symmetric PSD; a ridge of 1e-10 * trace / r is added
  /// before factorization. Throws NumericError if it is not PSD.
  PosteriorModel(const LowRankGP& parent, Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  const LowRankGP& parent() const noexcept { return *parent_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  int rank() const noexcept { return static_cast<int>(mean_.size()); }

  /// mean + A z with A A^T = covariance (+ ridge), z ~ N(0, I).
  Coefficients sample(Rng& rng) const;

  /// Log density of N(mean, covariance + ridge) at alpha.
  double log_density(const Coefficients& alpha) const;

 private:
  const LowRankGP* parent_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd factor_;  // A with A A^T = covariance + ridge
  bool triangular_ = true;  // factor_ is lower triangular (Cholesky)
  double log_det_ = 0.0;
  bool invertible_ = true;
};

/// Conditions the model on noisy landmark observations. In coefficient space:
///   Sigma_post = (Psi^T S^-1 Psi + I)^-1,  mu_post = Sigma_post Psi^T S^-1 (U - mu_X)
/// where Psi stacks sqrt(lambda_i) phi_i at the observed vertices and S is the
/// block-diagonal noise covariance.
PosteriorModel regress(const LowRankGP& model, std::span<const LandmarkObservation> observations);

/// instance(parent, posterior mean).
TriangleMesh posterior_mean_mesh(const PosteriorModel& posterior);

}  // namespace morphfit

#endif  // MORPHFIT_GP_REGRESSION_HPP
