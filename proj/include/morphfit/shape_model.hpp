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

#ifndef MORPHFIT_SHAPE_MODEL_HPP
#define MORPHFIT_SHAPE_MODEL_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "morphfit/mesh.hpp"

namespace morphfit {

/// Coefficients of a shape in a low-rank model (one entry per basis function).
using Coefficients = Eigen::VectorXd;

/// Per-vertex deformation field packed as (dx0, dy0, dz0, dx1, ...).
using DeformationField = Eigen::VectorXd;

/// k(x, x') = s * exp(-|x - x'|^2 / sigma^2) * I3.
class GaussianKernel {
 public:
  /// scale s in mm^2, bandwidth sigma in mm; both must be positive.
  GaussianKernel(double scale, double bandwidth);

  double scale() const noexcept { return scale_; }
  double bandwidth() const noexcept { return bandwidth_; }

  /// Scalar part g(x, x').
  double operator()(const Vec3& x, const Vec3& y) const;

 private:
  double scale_;
  double bandwidth_;
};

/// Result of projecting a deformation field into a model.
struct Projection {
  Coefficients coefficients;
  /// Components whose eigenvalue is zero (within 1e-12); their coefficient is 0.
  std::vector<int> zeroed;
};

/// Truncated Karhunen-Loeve expansion of a Gaussian process over the vertices
/// of a reference mesh:
///
///   u[a](x_j) = mu(x_j) + sum_i a_i sqrt(lambda_i) phi_i(x_j)
///
/// Basis columns are orthonormal under the plain sum over vertices of 3D dot
/// products. Eigenvalues are non-negative and non-increasing.
class LowRankGP {
 public:
  LowRankGP(TriangleMesh reference, Eigen::VectorXd mean, Eigen::VectorXd eigenvalues,
            Eigen::MatrixXd basis);

  const TriangleMesh& reference() const noexcept { return reference_; }
  int rank() const noexcept { return static_cast<int>(eigenvalues_.size()); }
  std::size_t vertex_count() const noexcept { return reference_.vertex_count(); }

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  /// 3n x r, column i is phi_i.
  const Eigen::MatrixXd& basis() const noexcept { return basis_; }
  /// 3n x r, column i is sqrt(lambda_i) phi_i.
  const Eigen::MatrixXd& scaled_basis() const noexcept { return scaled_basis_; }
  /// Rows 3j..3j+2 of scaled_basis().
  auto vertex_rows(std::size_t j) const { return scaled_basis_.middleRows(3 * static_cast<Eigen::Index>(j), 3); }

  DeformationField deformation(const Coefficients& alpha) const;
  /// Packed vertex positions of instance(alpha).
  Eigen::VectorXd instance_positions(const Coefficients& alpha) const;
  TriangleMesh instance(const Coefficients& alpha) const;

  double log_prior(const Coefficients& alpha) const;

  /// Least-squares coefficients of `field` (deformation relative to the
  /// reference, mean included).
  Projection project(const DeformationField& field) const;

  /// Keeps the leading `rank` components.
  LowRankGP truncated(int rank) const;

 private:
  void check_length(const Coefficients& alpha) const;

  TriangleMesh reference_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd scaled_basis_;
  Eigen::VectorXd reference_positions_;
};

/// Log of the standard multivariate normal density, -(r/2) ln(2 pi) - |a|^2 / 2.
double log_prior(const Coefficients& alpha);

struct LowRankOptions {
  /// Above this many vertices the eigenproblem is approximated by Nystrom
  /// sampling instead of an exact dense eigensolve.
  std::size_t nystrom_threshold = 2000;
  std::size_t nystrom_points = 600;
  std::uint64_t nystrom_seed = 0;
};

/// Leading `rank` eigenpairs of the 3n x 3n kernel matrix over the reference
/// vertices (zero mean). Throws ValidationError if rank is not in [1, 3n] and
/// NumericError if the spectrum is significantly negative.
LowRankGP build_low_rank(const GaussianKernel& kernel, const TriangleMesh& reference, int rank,
                         const LowRankOptions& options = {});

/// Empirical mean and covariance of corresponding deformation fields:
///   mean(x)   = 1/n sum u_i(x)
///   k(x, x')  = 1/(n-1) sum (u_i(x) - mean(x)) (u_i(x') - mean(x'))^T
class SampleKernel {
 public:
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  /// 3n x n matrix of centered samples.
  const Eigen::MatrixXd& centered() const noexcept { return centered_; }
  std::size_t sample_count() const noexcept { return static_cast<std::size_t>(centered_.cols()); }

  /// 3x3 covariance block between vertices i and j.
  Mat3 covariance(std::size_t i, std::size_t j) const;

  /// Eigen-decomposition into a model of rank min(3n, samples - 1).
  LowRankGP to_low_rank(const TriangleMesh& reference) const;

 private:
  friend SampleKernel build_from_samples(const std::vector<DeformationField>&, const TriangleMesh&);
  Eigen::VectorXd mean_;
  Eigen::MatrixXd centered_;
};

/// Needs at least two samples with one 3D vector per reference vertex.
SampleKernel build_from_samples(const std::vector<DeformationField>& samples, const TriangleMesh& reference);

/// Flips each column so its largest-magnitude entry is positive.
void canonicalize_signs(Eigen::MatrixXd& columns);

}  // namespace morphfit

#endif  // MORPHFIT_SHAPE_MODEL_HPP
