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

#include <complex>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "bosonbench/rng.hpp"

namespace bosonbench {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr int kNaivePermanentMaxDim = 10;
inline constexpr int kRyserPermanentMaxDim = 30;

bool all_finite(const ComplexMatrix& M);

/// max_{j,k} |(U^dagger U - I)_{j,k}|
double unitarity_defect(const ComplexMatrix& U);
bool is_unitary(const ComplexMatrix& U, double tol = 1e-10);

/// Permanent by direct enumeration of all n! permutations. Square matrices
/// with n <= 10 only; this is the reference oracle for permanent_ryser.
Complex permanent_naive(const ComplexMatrix& M);

/// Permanent via Ryser's inclusion-exclusion with Gray-code subset order,
/// O(2^n n). Square matrices with n <= 30.
Complex permanent_ryser(const ComplexMatrix& M);

/// Ryser kernel on a packed row-major n-by-n buffer (no allocation). Exposed
/// for hot loops that gather submatrices into scratch storage.
Complex permanent_ryser_packed(const Complex* data, int n);

/// Haar-distributed U(m) element: QR of a complex Ginibre matrix with each
/// column of Q rephased by the corresponding R diagonal, which makes the
/// distribution exactly Haar rather than merely approximately.
ComplexMatrix haar_unitary(int m, RngStream& rng);

/// n-by-n matrix with i.i.d. N(0, sigma^2) real and imaginary parts per entry
/// (the mu_{G(sigma)} ensemble).
ComplexMatrix sample_gaussian_matrix(int n, double sigma, RngStream& rng);

/// Row-repeated Gaussian ensemble mu_{G_S(sigma)}: draws |S~| x n as above
/// (S~ is S with zeros removed, order preserved), then stacks s~_j copies of
/// row j. occupations must sum to n > 0.
ComplexMatrix sample_row_repeated_gaussian(std::span<const int> occupations,
                                           double sigma, RngStream& rng);

/// JSON matrix format used by the CLI:
/// {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major.
std::string matrix_to_json(const ComplexMatrix& M);
ComplexMatrix matrix_from_json(const std::string& text);

}  // namespace bosonbench
