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

#include "morphfit/shape_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "morphfit/error.hpp"

namespace morphfit {

GaussianKernel::GaussianKernel(double scale, double bandwidth) : scale_(scale), bandwidth_(bandwidth) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ValidationError("kernel scale must be positive");
  if (!(bandwidth > 0.0)) throw ValidationError("kernel bandwidth must be positive");
}

double GaussianKernel::operator()(const Vec3& x, const Vec3& y) const {
  if (std::isinf(bandwidth_)) return scale_;
  return scale_ * std::exp(-(x - y).squaredNorm() / (bandwidth_ * bandwidth_));
}

LowRankGP::LowRankGP(TriangleMesh reference, Eigen::VectorXd mean, Eigen::VectorXd eigenvalues,
                     Eigen::MatrixXd basis)
    : reference_(std::move(reference)),
      mean_(std::move(mean)),
      eigenvalues_(std::move(eigenvalues)),
      basis_(std::move(basis)) {
  const auto dim = static_cast<Eigen::Index>(3 * reference_.vertex_count());
  if (mean_.size() != dim) throw ValidationError("model mean has wrong length");
  if (basis_.rows() != dim || basis_.cols() != eigenvalues_.size()) {
    throw ValidationError("model basis must be 3n x r");
  }
  if (eigenvalues_.size() == 0) throw ValidationError("model rank must be positive");
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    if (!(eigenvalues_[i] >= 0.0)) throw ValidationError("model eigenvalues must be non-negative");
    if (i > 0 && eigenvalues_[i] > eigenvalues_[i - 1]) {
      throw ValidationError("model eigenvalues must be non-increasing");
    }
  }
  scaled_basis_ = basis_ * eigenvalues_.cwiseSqrt().asDiagonal();
  reference_positions_ = reference_.flattened();
}

void LowRankGP::check_length(const Coefficients& alpha) const {
  if (alpha.size() != eigenvalues_.size()) {
    throw ValidationError("coefficient vector has length " + std::to_string(alpha.size()) +
                          ", model rank is " + std::to_string(eigenvalues_.size()));
  }
}

DeformationField LowRankGP::deformation(const Coefficients& alpha) const {
  check_length(alpha);
  return mean_ + scaled_basis_ * alpha;
}

Eigen::VectorXd LowRankGP::instance_positions(const Coefficients& alpha) const {
  return reference_positions_ + deformation(alpha);
}

TriangleMesh LowRankGP::instance(const Coefficients& alpha) const {
  return reference_.with_positions(instance_positions(alpha));
}

double LowRankGP::log_prior(const Coefficients& alpha) const {
  check_length(alpha);
  return morphfit::log_prior(alpha);
}

Projection LowRankGP::project(const DeformationField& field) const {
  if (field.size() != mean_.size()) {
    throw ValidationError("deformation field has length " + std::to_string(field.size()) +
                          ", expected " + std::to_string(mean_.size()));
  }
  Projection out;
  out.coefficients = basis_.transpose() * (field - mean_);
  for (Eigen::Index i = 0; i < eigenvalues_.size(); ++i) {
    if (eigenvalues_[i] <= 1e-12) {
      out.coefficients[i] = 0.0;
      out.zeroed.push_back(static_cast<int>(i));
    } else {
      out.coefficients[i] /= std::sqrt(eigenvalues_[i]);
    }
  }
  return out;
}

LowRankGP LowRankGP::truncated(int rank) const {
  if (rank < 1 || rank > this->rank()) throw ValidationError("truncation rank out of range");
  return LowRankGP(reference_, mean_, eigenvalues_.head(rank), basis_.leftCols(rank));
}

double log_prior(const Coefficients& alpha) {
  const double r = static_cast<double>(alpha.size());
  return -0.5 * r * std::log(2.0 * std::numbers::pi) - 0.5 * alpha.squaredNorm();
}

void canonicalize_signs(Eigen::MatrixXd& columns) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    Eigen::Index arg = 0;
    columns.col(c).cwiseAbs().maxCoeff(&arg);
    if (columns(arg, c) < 0.0) columns.col(c) *= -1.0;
  }
}

namespace {

// Descending eigenpairs of a symmetric PSD matrix; validates the spectrum.
void sorted_eigenpairs(const Eigen::MatrixXd& m, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw NumericError("kernel eigendecomposition did not converge");
  values = es.eigenvalues().reverse();
  vectors = es.eigenvectors().rowwise().reverse();
  const double top = values.size() ? values[0] : 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) {
      if (values[i] < -1e-8 * std::max(top, 0.0)) {
        throw NumericError("kernel matrix is not positive semi-definite (eigenvalue " +
                           std::to_string(values[i]) + ")");
      }
      values[i] = 0.0;
    }
  }
  canonicalize_signs(vectors);
}

// Eigenpairs of the n x n scalar kernel matrix, exact or via Nystrom.
void scalar_spectrum(const GaussianKernel& kernel, const std::vector<Vec3>& pts, std::size_t wanted,
                     const LowRankOptions& options, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  if (pts.size() <= options.nystrom_threshold) {
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      g(i, i) = kernel(pts[i], pts[i]);
      for (Eigen::Index j = 0; j < i; ++j) g(i, j) = g(j, i) = kernel(pts[i], pts[j]);
    }
    sorted_eigenpairs(g, values, vectors);
    return;
  }

  // Nystrom: G ~= G_nm G_mm^-1 G_mn = B B^T with B = G_nm U L^-1/2; the
  // eigenvectors of B B^T come from the small Gram matrix B^T B.
  const std::size_t m = std::min<std::size_t>(std::max(options.nystrom_points, wanted), pts.size());
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(options.nystrom_seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());

  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd gmm(mm, mm), gnm(n, mm);
  for (Eigen::Index a = 0; a < mm; ++a)
    for (Eigen::Index b = 0; b < mm; ++b) gmm(a, b) = kernel(pts[idx[a]], pts[idx[b]]);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index b = 0; b < mm; ++b) gnm(i, b) = kernel(pts[i], pts[idx[b]]);

  Eigen::VectorXd lm;
  Eigen::MatrixXd um;
  sorted_eigenpairs(gmm, lm, um);
  Eigen::Index keep = 0;
  while (keep < lm.size() && lm[keep] > 1e-10 * lm[0]) ++keep;
  const Eigen::MatrixXd b = gnm * um.leftCols(keep) * lm.head(keep).cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
  sorted_eigenpairs(b.transpose() * b, s, v);
  Eigen::Index pos = 0;
  while (pos < s.size() && s[pos] > 1e-12 * s[0]) ++pos;
  values = s.head(pos);
  vectors = b * v.leftCols(pos) * s.head(pos).cwiseSqrt().cwiseInverse().asDiagonal();
  canonicalize_signs(vectors);
}

}  // namespace

LowRankGP build_low_rank(const GaussianKernel& kernel, const TriangleMesh& reference, int rank,
                         const LowRankOptions& options) {
  const std::size_t n = reference.vertex_count();
  if (n == 0) throw ValidationError("reference mesh has no vertices");
  if (rank < 1 || static_cast<std::size_t>(rank) > 3 * n) {
    throw ValidationError("rank " + std::to_string(rank) + " outside [1, " + std::to_string(3 * n) + "]");
  }

  // k = g * I3, so the 3n x 3n matrix is G (x) I3: every eigenpair (l, e) of
  // G yields three eigenpairs (l, e (x) e_d), d = x, y, z.
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  scalar_spectrum(kernel, reference.vertices(), (static_cast<std::size_t>(rank) + 2) / 3, options, values,
                  vectors);
  if (3 * values.size() < rank) {
    throw NumericError("Nystrom approximation yields only " + std::to_string(3 * values.size()) +
                       " components; increase nystrom_points");
  }

  const auto dim = static_cast<Eigen::Index>(3 * n);
  Eigen::VectorXd lambda(rank);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, rank);
  for (int c = 0; c < rank; ++c) {
    const int k = c / 3;
    const int d = c % 3;
    lambda[c] = values[k];
    for (std::size_t j = 0; j < n; ++j) basis(static_cast<Eigen::Index>(3 * j + d), c) = vectors(j, k);
  }
  return LowRankGP(reference, Eigen::VectorXd::Zero(dim), std::move(lambda), std::move(basis));
}

SampleKernel build_from_samples(const std::vector<DeformationField>& samples, const TriangleMesh& reference) {
  if (samples.size() < 2) throw ValidationError("need at least two samples to estimate a covariance");
  const auto dim = static_cast<Eigen::Index>(3 * reference.vertex_count());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != dim) {
      throw ValidationError("sample " + std::to_string(i) + " has " + std::to_string(samples[i].size() / 3) +
                            " vertices, reference has " + std::to_string(reference.vertex_count()));
    }
  }
  SampleKernel k;
  k.mean_ = Eigen::VectorXd::Zero(dim);
  for (const auto& s : samples) k.mean_ += s;
  k.mean_ /= static_cast<double>(samples.size());
  k.centered_.resize(dim, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) k.centered_.col(static_cast<Eigen::Index>(i)) = samples[i] - k.mean_;
  return k;
}

Mat3 SampleKernel::covariance(std::size_t i, std::size_t j) const {
  const auto rows_i = centered_.middleRows(3 * static_cast<Eigen::Index>(i), 3);
  const auto rows_j = centered_.middleRows(3 * static_cast<Eigen::Index>(j), 3);
  return rows_i * rows_j.transpose() / static_cast<double>(centered_.cols() - 1);
}

LowRankGP SampleKernel::to_low_rank(const TriangleMesh& reference) const {
  const Eigen::Index dim = centered_.rows();
  const Eigen::Index rank = std::min<Eigen::Index>(dim, centered_.cols() - 1);
  const Eigen::MatrixXd scaled = centered_ / std::sqrt(static_cast<double>(centered_.cols() - 1));

  Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU);
  Eigen::VectorXd lambda = svd.singularValues().head(rank).array().square();
  Eigen::MatrixXd basis = svd.matrixU().leftCols(rank);
  canonicalize_signs(basis);
  return LowRankGP(reference, mean_, std::move(lambda), std::move(basis));
}

}  // namespace morphfit
