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

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bosonbench/linalg.hpp"
#include "bosonbench/rng.hpp"

// Phase-space conventions, fixed once for the whole module:
//  * Quadratures use BLOCK ordering r = (x_1..x_m, p_1..p_m). Mode j owns
//    components (r_j, r_{m+j}). Interleaved pair ordering also appears in the
//    literature; mixing the two silently is the classic bug, so only the
//    block form exists here.
//  * The symplectic form is Omega = [[0, I], [-I, 0]] in that ordering.
//  * Vacuum covariance is I/2 and Wigner functions are normalized to
//    integrate to 1, so the vacuum Wigner density is pi^{-m} e^{-|r|^2};
//    overlaps are Tr[A B] = (2 pi)^m Int W_A W_B. A coherent state of
//    amplitude alpha has mean (Re alpha, Im alpha) and photon number
//    |alpha|^2.

namespace bosonbench {

struct PhasePoint {
  Eigen::VectorXd r;  // length 2m, block ordering
};

/// Gaussian state: mean vector and covariance matrix in block ordering.
/// Construction enforces symmetry (1e-12) and the uncertainty condition
/// (symplectic eigenvalues >= 1/2 - 1e-9).
class GaussianState {
 public:
  GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  int modes() const { return modes_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }

  /// Wigner density at r (a proper Gaussian probability density here).
  double wigner_density(const Eigen::VectorXd& r) const;

 private:
  int modes_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
};

GaussianState vacuum_state(int m);
/// One (r1, r2) displacement per mode; covariance stays I/2.
GaussianState coherent_state(const std::vector<std::pair<double, double>>& displacements);
/// Squeezed vacuum per mode: x-variance e^{2s}/2, p-variance e^{-2s}/2.
GaussianState squeezed_state(const std::vector<double>& squeezing);

/// Omega = [[0, I], [-I, 0]] on 2m components.
Eigen::MatrixXd symplectic_form(int m);
/// Moduli of the eigenvalues of Omega * covariance (each value twice).
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& covariance);

/// Gaussian channel acting affinely: mean -> X mean + d,
/// cov -> X cov X^T + Y. Construction checks complete positivity:
/// Y + (i/2)(Omega - X Omega X^T) >= 0 within 1e-9.
class GaussianChannel {
 public:
  GaussianChannel(Eigen::MatrixXd X, Eigen::MatrixXd Y, Eigen::VectorXd d);

  int modes() const { return modes_; }
  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::MatrixXd& Y() const { return Y_; }
  const Eigen::VectorXd& d() const { return d_; }

 private:
  int modes_;
  Eigen::MatrixXd X_;
  Eigen::MatrixXd Y_;
  Eigen::VectorXd d_;
};

/// Lossless passive network for mode unitary U:
/// X = [[Re U, -Im U], [Im U, Re U]], Y = 0, d = 0. X is symplectic and
/// orthogonal.
GaussianChannel passive_network_channel(const ComplexMatrix& U);

/// Uniform loss: X = sqrt(eta) I, Y = ((1-eta)/2) I, d = 0.
GaussianChannel lossy_channel(double eta, int m);

/// second o first as a single channel.
GaussianChannel compose(const GaussianChannel& first, const GaussianChannel& second);

GaussianState apply_channel(const GaussianState& state, const GaussianChannel& channel);

/// Dichotomic detector: no-click iff the sampled phase point of a mode lies
/// inside the disk of this radius (the no-click POVM element has the flat
/// disk Wigner function 1/(2 pi) on |r| < R).
struct BucketDetector {
  double radius = 1.6;
};

/// Draws from the state's Wigner function (an ordinary multivariate normal).
PhasePoint sample_phase_point(const GaussianState& state, RngStream& rng);

/// Per-mode click bits: s_j = 0 iff sqrt(r_j^2 + r_{m+j}^2) < R.
std::vector<int> bucket_detect(const PhasePoint& point, const BucketDetector& detector);

/// l detection patterns of the state channel(input), sampled exactly: every
/// Wigner function involved is a positive density and the per-point outcome
/// is a deterministic disk indicator.
std::vector<std::vector<int>> classical_sample(const GaussianState& input,
                                               const GaussianChannel& network,
                                               const BucketDetector& detector, std::uint64_t l,
                                               RngStream& rng);

}  // namespace bosonbench
