// Copyright 2026 The bosonbench authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bosonbench/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bosonbench {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kUncertaintyTol = 1e-9;

int modes_from_dim(long dim, const char* op) {
  if (dim < 2 || dim % 2 != 0)
    throw std::invalid_argument(std::string(op) + ": phase-space dimension must be even, >= 2");
  return static_cast<int>(dim / 2);
}

void check_uncertainty(const Eigen::MatrixXd& cov, const char* op) {
  for (double nu : symplectic_eigenvalues(cov))
    if (nu < 0.5 - kUncertaintyTol)
      throw std::invalid_argument(std::string(op) + ": symplectic eigenvalue " +
                                  std::to_string(nu) + " violates the uncertainty condition");
}

}  // namespace

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : modes_(modes_from_dim(mean.size(), "GaussianState")),
      mean_(std::move(mean)),
      covariance_(std::move(covariance)) {
  if (covariance_.rows() != 2 * modes_ || covariance_.cols() != 2 * modes_)
    throw std::invalid_argument("GaussianState: covariance dimension mismatch");
  if (!mean_.allFinite() || !covariance_.allFinite())
    throw std::invalid_argument("GaussianState: non-finite entries");
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    throw std::invalid_argument("GaussianState: covariance not symmetric within 1e-12");
  covariance_ = 0.5 * (covariance_ + covariance_.transpose());
  check_uncertainty(covariance_, "GaussianState");
}

double GaussianState::wigner_density(const Eigen::VectorXd& r) const {
  if (r.size() != mean_.size())
    throw std::invalid_argument("wigner_density: wrong phase-space dimension");
  const Eigen::VectorXd delta = r - mean_;
  const Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("wigner_density: covariance not positive definite");
  const double quad = delta.dot(llt.solve(delta));
  double log_det = 0.0;
  for (long i = 0; i < covariance_.rows(); ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
  const double dim = static_cast<double>(mean_.size());
  return std::exp(-0.5 * quad - 0.5 * log_det - 0.5 * dim * std::log(2.0 * std::numbers::pi));
}

GaussianState vacuum_state(int m) {
  if (m < 1) throw std::invalid_argument("vacuum_state: m must be >= 1");
  return GaussianState(Eigen::VectorXd::Zero(2 * m),
                       0.5 * Eigen::MatrixXd::Identity(2 * m, 2 * m));
}

GaussianState coherent_state(const std::vector<std::pair<double, double>>& displacements) {
  const int m = static_cast<int>(displacements.size());
  if (m < 1) throw std::invalid_argument("coherent_state: need at least one mode");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2 * m);
  for (int j = 0; j < m; ++j) {
    mean(j) = displacements[j].first;
    mean(m + j) = displacements[j].second;
  }
  return GaussianState(std::move(mean), 0.5 * Eigen::MatrixXd::Identity(2 * m, 2 * m));
}

GaussianState squeezed_state(const std::vector<double>& squeezing) {
  const int m = static_cast<int>(squeezing.size());
  if (m < 1) throw std::invalid_argument("squeezed_state: need at least one mode");
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    cov(j, j) = 0.5 * std::exp(2.0 * squeezing[j]);
    cov(m + j, m + j) = 0.5 * std::exp(-2.0 * squeezing[j]);
  }
  return GaussianState(Eigen::VectorXd::Zero(2 * m), std::move(cov));
}

Eigen::MatrixXd symplectic_form(int m) {
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  omega.topRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
  omega.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  return omega;
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& covariance) {
  const int m = modes_from_dim(covariance.rows(), "symplectic_eigenvalues");
  const Eigen::MatrixXd product = symplectic_form(m) * covariance;
  const Eigen::EigenSolver<Eigen::MatrixXd> solver(product, /*computeEigenvectors=*/false);
  std::vector<double> out;
  out.reserve(2 * m);
  for (long i = 0; i < solver.eigenvalues().size(); ++i)
    out.push_back(std::abs(solver.eigenvalues()(i)));
  return out;
}

GaussianChannel::GaussianChannel(Eigen::MatrixXd X, Eigen::MatrixXd Y, Eigen::VectorXd d)
    : modes_(modes_from_dim(d.size(), "GaussianChannel")),
      X_(std::move(X)),
      Y_(std::move(Y)),
      d_(std::move(d)) {
  const long dim = 2 * modes_;
  if (X_.rows() != dim || X_.cols() != dim || Y_.rows() != dim || Y_.cols() != dim)
    throw std::invalid_argument("GaussianChannel: dimension mismatch");
  if (!X_.allFinite() || !Y_.allFinite() || !d_.allFinite())
    throw std::invalid_argument("GaussianChannel: non-finite entries");
  if ((Y_ - Y_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
    throw std::invalid_argument("GaussianChannel: Y not symmetric within 1e-12");
  Y_ = 0.5 * (Y_ + Y_.transpose());

  // Complete positivity: Y + (i/2)(Omega - X Omega X^T) >= 0 as a Hermitian
  // matrix, to 1e-9.
  const Eigen::MatrixXd omega = symplectic_form(modes_);
  const Eigen::MatrixXd commutator_defect = omega - X_ * omega * X_.transpose();
  Eigen::MatrixXcd herm =
      Y_.cast<std::complex<double>>() +
      std::complex<double>(0.0, 0.5) * commutator_defect.cast<std::complex<double>>();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("GaussianChannel: CP eigenvalue check failed to converge");
  if (solver.eigenvalues().minCoeff() < -kUncertaintyTol)
    throw std::invalid_argument("GaussianChannel: not completely positive (min eigenvalue " +
                                std::to_string(solver.eigenvalues().minCoeff()) + ")");
}

GaussianChannel passive_network_channel(const ComplexMatrix& U) {
  if (!is_unitary(U)) throw std::invalid_argument("passive_network_channel: U is not unitary");
  const int m = static_cast<int>(U.rows());
  Eigen::MatrixXd X(2 * m, 2 * m);
  X.topLeftCorner(m, m) = U.real();
  X.topRightCorner(m, m) = -U.imag();
  X.bottomLeftCorner(m, m) = U.imag();
  X.bottomRightCorner(m, m) = U.real();
  return GaussianChannel(std::move(X), Eigen::MatrixXd::Zero(2 * m, 2 * m),
                         Eigen::VectorXd::Zero(2 * m));
}

GaussianChannel lossy_channel(double eta, int m) {
  if (!(eta >= 0.0) || !(eta <= 1.0))
    throw std::invalid_argument("lossy_channel: eta must lie in [0, 1]");
  if (m < 1) throw std::invalid_argument("lossy_channel: m must be >= 1");
  const long dim = 2 * m;
  return GaussianChannel(std::sqrt(eta) * Eigen::MatrixXd::Identity(dim, dim),
                         (0.5 * (1.0 - eta)) * Eigen::MatrixXd::Identity(dim, dim),
                         Eigen::VectorXd::Zero(dim));
}

GaussianChannel compose(const GaussianChannel& first, const GaussianChannel& second) {
  if (first.modes() != second.modes())
    throw std::invalid_argument("compose: channels act on different mode counts");
  return GaussianChannel(second.X() * first.X(),
                         second.X() * first.Y() * second.X().transpose() + second.Y(),
                         second.X() * first.d() + second.d());
}

GaussianState apply_channel(const GaussianState& state, const GaussianChannel& channel) {
  if (state.modes() != channel.modes())
    throw std::invalid_argument("apply_channel: dimension mismatch");
  Eigen::VectorXd mean = channel.X() * state.mean() + channel.d();
  Eigen::MatrixXd cov =
      channel.X() * state.covariance() * channel.X().transpose() + channel.Y();
  try {
    return GaussianState(std::move(mean), std::move(cov));
  } catch (const std::invalid_argument& e) {
    // A valid channel on a valid state cannot leave the physical set.
    throw std::runtime_error(std::string("apply_channel: output state invalid (") + e.what() +
                             ")");
  }
}

PhasePoint sample_phase_point(const GaussianState& state, RngStream& rng) {
  const Eigen::LLT<Eigen::MatrixXd> llt(state.covariance());
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_phase_point: covariance Cholesky failed");
  Eigen::VectorXd z(state.mean().size());
  for (long i = 0; i < z.size(); ++i) z(i) = rng.next_gaussian();
  PhasePoint point;
  point.r = state.mean() + llt.matrixL() * z;
  return point;
}

std::vector<int> bucket_detect(const PhasePoint& point, const BucketDetector& detector) {
  if (!(detector.radius > 0.0)) throw std::invalid_argument("bucket_detect: radius must be > 0");
  const int m = modes_from_dim(point.r.size(), "bucket_detect");
  const double r2 = detector.radius * detector.radius;
  std::vector<int> bits(m);
  for (int j = 0; j < m; ++j) {
    const double x = point.r(j);
    const double p = point.r(m + j);
    bits[j] = (x * x + p * p < r2) ? 0 : 1;
  }
  return bits;
}

std::vector<std::vector<int>> classical_sample(const GaussianState& input,
                                               const GaussianChannel& network,
                                               const BucketDetector& detector, std::uint64_t l,
                                               RngStream& rng) {
  const GaussianState output = apply_channel(input, network);
  std::vector<std::vector<int>> patterns;
  patterns.reserve(l);
  for (std::uint64_t i = 0; i < l; ++i)
    patterns.push_back(bucket_detect(sample_phase_point(output, rng), detector));
  return patterns;
}

}  // namespace bosonbench
