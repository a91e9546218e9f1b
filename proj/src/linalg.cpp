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

#include "bosonbench/linalg.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace bosonbench {

namespace {

void require_square(const ComplexMatrix& M, const char* op) {
  if (M.rows() != M.cols() || M.rows() < 1) {
    throw std::invalid_argument(std::string(op) + ": matrix must be square and nonempty, got " +
                                std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  }
}

}  // namespace

bool all_finite(const ComplexMatrix& M) {
  return M.allFinite();
}

double unitarity_defect(const ComplexMatrix& U) {
  const ComplexMatrix G = U.adjoint() * U - ComplexMatrix::Identity(U.cols(), U.cols());
  return G.cwiseAbs().maxCoeff();
}

bool is_unitary(const ComplexMatrix& U, double tol) {
  return U.rows() == U.cols() && all_finite(U) && unitarity_defect(U) <= tol;
}

Complex permanent_naive(const ComplexMatrix& M) {
  require_square(M, "permanent_naive");
  const int n = static_cast<int>(M.rows());
  if (n > kNaivePermanentMaxDim) {
    throw std::invalid_argument("permanent_naive: n = " + std::to_string(n) +
                                " exceeds the factorial-cost guard n <= " +
                                std::to_string(kNaivePermanentMaxDim));
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Complex sum = 0.0;
  do {
    Complex prod = 1.0;
    for (int j = 0; j < n; ++j) prod *= M(j, perm[j]);
    sum += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum;
}

Complex permanent_ryser_packed(const Complex* data, int n) {
  // Perm(M) = (-1)^n sum_{T != 0} (-1)^{|T|} prod_j (sum_{k in T} M_{j,k}),
  // visiting subsets in Gray-code order so each step updates one column.
  Complex row_sums[kRyserPermanentMaxDim];
  for (int j = 0; j < n; ++j) row_sums[j] = 0.0;

  Complex total = 0.0;
  std::uint64_t gray = 0;
  const std::uint64_t count = 1ULL << n;
  int odd_subset = 0;  // |T| mod 2
  for (std::uint64_t k = 1; k < count; ++k) {
    const std::uint64_t next_gray = k ^ (k >> 1);
    const std::uint64_t diff = gray ^ next_gray;
    const int col = std::countr_zero(diff);
    const bool added = (next_gray & diff) != 0;
    const double sign = added ? 1.0 : -1.0;
    for (int j = 0; j < n; ++j) row_sums[j] += sign * data[j * n + col];
    gray = next_gray;
    odd_subset ^= 1;

    Complex prod = row_sums[0];
    for (int j = 1; j < n; ++j) prod *= row_sums[j];
    total += odd_subset ? -prod : prod;  // (-1)^{|T|}
  }
  return ((n % 2) == 0) ? total : -total;  // overall (-1)^n
}

Complex permanent_ryser(const ComplexMatrix& M) {
  require_square(M, "permanent_ryser");
  const int n = static_cast<int>(M.rows());
  if (n > kRyserPermanentMaxDim) {
    throw std::invalid_argument("permanent_ryser: n = " + std::to_string(n) +
                                " exceeds the guard n <= " + std::to_string(kRyserPermanentMaxDim));
  }
  std::vector<Complex> buf(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) buf[static_cast<std::size_t>(j) * n + k] = M(j, k);
  return permanent_ryser_packed(buf.data(), n);
}

ComplexMatrix haar_unitary(int m, RngStream& rng) {
  if (m < 1) throw std::invalid_argument("haar_unitary: m must be >= 1");
  ComplexMatrix G(m, m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) G(j, k) = rng.next_complex_gaussian(1.0);

  Eigen::HouseholderQR<ComplexMatrix> qr(G);
  ComplexMatrix Q = qr.householderQ();
  const auto diag = qr.matrixQR().diagonal();
  for (int j = 0; j < m; ++j) {
    const Complex d = diag(j);
    const double mag = std::abs(d);
    Q.col(j) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
  }
  return Q;
}

ComplexMatrix sample_gaussian_matrix(int n, double sigma, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_gaussian_matrix: n must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sample_gaussian_matrix: sigma must be > 0");
  ComplexMatrix X(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) X(j, k) = rng.next_complex_gaussian(sigma);
  return X;
}

ComplexMatrix sample_row_repeated_gaussian(std::span<const int> occupations, double sigma,
                                           RngStream& rng) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("sample_row_repeated_gaussian: sigma must be > 0");
  long n = 0;
  std::vector<int> nonzero;
  for (int s : occupations) {
    if (s < 0) throw std::invalid_argument("sample_row_repeated_gaussian: negative occupation");
    if (s > 0) nonzero.push_back(s);
    n += s;
  }
  if (n == 0)
    throw std::invalid_argument("sample_row_repeated_gaussian: occupation sequence sums to zero");

  const int rows = static_cast<int>(nonzero.size());
  ComplexMatrix base(rows, n);
  for (int j = 0; j < rows; ++j)
    for (int k = 0; k < n; ++k) base(j, k) = rng.next_complex_gaussian(sigma);

  ComplexMatrix X(n, n);
  int r = 0;
  for (int j = 0; j < rows; ++j)
    for (int c = 0; c < nonzero[j]; ++c) X.row(r++) = base.row(j);
  return X;
}

std::string matrix_to_json(const ComplexMatrix& M) {
  nlohmann::json j;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  nlohmann::json entries = nlohmann::json::array();
  for (long r = 0; r < M.rows(); ++r)
    for (long c = 0; c < M.cols(); ++c)
      entries.push_back({M(r, c).real(), M(r, c).imag()});
  j["entries"] = std::move(entries);
  return j.dump();
}

ComplexMatrix matrix_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  const long rows = j.at("rows").get<long>();
  const long cols = j.at("cols").get<long>();
  if (rows < 1 || cols < 1) throw std::invalid_argument("matrix_from_json: bad dimensions");
  const auto& entries = j.at("entries");
  if (static_cast<long>(entries.size()) != rows * cols)
    throw std::invalid_argument("matrix_from_json: entries length != rows*cols");
  ComplexMatrix M(rows, cols);
  long idx = 0;
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) {
      const auto& e = entries[idx++];
      M(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  if (!all_finite(M)) throw std::invalid_argument("matrix_from_json: non-finite entry");
  return M;
}

}  // namespace bosonbench
