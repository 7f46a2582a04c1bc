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

#include "morphfit/gp_regression.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "morphfit/error.hpp"

namespace morphfit {

LandmarkObservation make_observation(const LowRankGP& model, const Vec3& reference_point, const Vec3& target_point,
                                     const Mat3& noise) {
  const auto& verts = model.reference().vertices();
  for (std::size_t j = 0; j < verts.size(); ++j) {
    if ((verts[j] - reference_point).norm() <= 1e-9) {
      return LandmarkObservation{j, target_point - verts[j], noise};
    }
  }
  throw ValidationError("landmark is not located at a reference vertex");
}

Mat3 landmark_noise(const Vec3& normal, double normal_variance, double tangential_variance) {
  const auto [v1, v2] = tangent_frame(normal);
  Mat3 frame;
  frame << normal.normalized(), v1, v2;
  const Eigen::Vector3d variances(normal_variance, tangential_variance, tangential_variance);
  return frame * variances.asDiagonal() * frame.transpose();
}

PosteriorModel::PosteriorModel(const LowRankGP& parent, Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : parent_(&parent), mean_(std::move(mean)), covariance_(std::move(covariance)) {
  const Eigen::Index r = mean_.size();
  if (r != parent.rank() || covariance_.rows() != r || covariance_.cols() != r) {
    throw ValidationError("posterior dimensions do not match the model rank");
  }
  const double ridge = 1e-10 * covariance_.trace() / static_cast<double>(r);
  Eigen::MatrixXd reg = covariance_;
  reg.diagonal().array() += ridge;

  Eigen::LLT<Eigen::MatrixXd> llt(reg);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    log_det_ = 2.0 * factor_.diagonal().array().log().sum();
    return;
  }

  // Semi-definite (e.g. zero) covariance: symmetric square root.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reg);
  if (es.info() != Eigen::Success) throw NumericError("posterior covariance eigensolve failed");
  const Eigen::VectorXd& s = es.eigenvalues();
  const double scale = std::max(std::abs(covariance_.trace()), 1e-300);
  if (s.minCoeff() < -1e-10 * scale) throw NumericError("posterior covariance is not positive semi-definite");
  triangular_ = false;
  factor_ = es.eigenvectors() * s.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  invertible_ = s.minCoeff() > 0.0;
  log_det_ = invertible_ ? s.array().log().sum() : -std::numeric_limits<double>::infinity();
}

Coefficients PosteriorModel::sample(Rng& rng) const {
  const Eigen::VectorXd z = standard_normal(mean_.size(), rng);
  if (triangular_) return mean_ + factor_.triangularView<Eigen::Lower>() * z;
  return mean_ + factor_ * z;
}

double PosteriorModel::log_density(const Coefficients& alpha) const {
  if (alpha.size() != mean_.size()) throw ValidationError("coefficient vector length does not match posterior");
  const double r = static_cast<double>(mean_.size());
  const Eigen::VectorXd d = alpha - mean_;
  double mahalanobis = 0.0;
  if (triangular_) {
    mahalanobis = factor_.triangularView<Eigen::Lower>().solve(d).squaredNorm();
  } else {
    if (!invertible_) throw NumericError("posterior covariance is singular; density undefined");
    // factor_ = V S^1/2, so d^T Sigma^-1 d = |S^-1/2 V^T d|^2 = |factor_^T d|^2 / s^2 per column.
    const Eigen::VectorXd proj = factor_.transpose() * d;
    const Eigen::VectorXd norms2 = factor_.colwise().squaredNorm().transpose();
    mahalanobis = (proj.array().square() / norms2.array().square()).sum();
  }
  return -0.5 * (r * std::log(2.0 * std::numbers::pi) + log_det_ + mahalanobis);
}

PosteriorModel regress(const LowRankGP& model, std::span<const LandmarkObservation> observations) {
  if (observations.empty()) throw ValidationError("regression needs at least one observation");
  const Eigen::Index r = model.rank();
  const auto m = static_cast<Eigen::Index>(observations.size());
  const Eigen::VectorXd& prior_mean = model.mean();

  // Whitened design: rows W_i^1/2 Psi_i with W_i = Sigma_i^-1.
  Eigen::MatrixXd design(3 * m, r);
  Eigen::VectorXd rhs(3 * m);
  Eigen::SelfAdjointEigenSolver<Mat3> es;
  for (Eigen::Index i = 0; i < m; ++i) {
    const LandmarkObservation& obs = observations[static_cast<std::size_t>(i)];
    if (obs.vertex >= model.vertex_count()) {
      throw ValidationError("observation references vertex " + std::to_string(obs.vertex) + " outside the model");
    }
    if (!obs.deformation.allFinite() || !obs.noise.allFinite()) {
      throw ValidationError("observation " + std::to_string(i) + " is not finite");
    }
    if ((obs.noise - obs.noise.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, obs.noise.norm())) {
      throw ValidationError("observation noise covariance is not symmetric");
    }
    es.computeDirect(obs.noise);
    if (es.eigenvalues().minCoeff() <= 1e-12) {
      throw ValidationError("observation noise covariance is singular");
    }
    const Mat3 whiten =
        es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    design.middleRows<3>(3 * i).noalias() = whiten * model.vertex_rows(obs.vertex);
    rhs.segment<3>(3 * i) = whiten * (obs.deformation - prior_mean.segment<3>(3 * static_cast<Eigen::Index>(obs.vertex)));
  }

  Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(r, r);
  precision.selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
  precision.triangularView<Eigen::StrictlyUpper>() = precision.transpose();

  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) throw NumericError("posterior precision is not positive definite");
  Eigen::VectorXd mean = llt.solve(design.transpose() * rhs);
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(r, r));
  cov = 0.5 * (cov + cov.transpose()).eval();
  return PosteriorModel(model, std::move(mean), std::move(cov));
}

TriangleMesh posterior_mean_mesh(const PosteriorModel& posterior) {
  return posterior.parent().instance(posterior.mean());
}

}  // namespace morphfit
