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

#include "bosonbench/flatness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bosonbench/parallel.hpp"

namespace bosonbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// ln |Phi_{m,n}| = ln binomial(m+n-1, n)
double log_full_space_size(std::uint64_t m, int n) {
  const double md = static_cast<double>(m);
  return std::lgamma(md + n) - std::lgamma(md) - log_factorial(n);
}

double mean_of(std::span<const double> xs) {
  long double s = 0.0L;
  for (double x : xs) s += x;
  return static_cast<double>(s / xs.size());
}

double standard_error_of(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  long double ss = 0.0L;
  for (double x : xs) {
    const long double d = x - mean;
    ss += d * d;
  }
  const double var = static_cast<double>(ss / (xs.size() - 1));
  return std::sqrt(var / xs.size());
}

}  // namespace

double gaussian_concentration_bound(int n, double sigma, double xi) {
  if (n < 1) throw std::invalid_argument("gaussian_concentration_bound: n must be >= 1");
  if (!(sigma > 0.0) || !(xi > 0.0))
    throw std::invalid_argument("gaussian_concentration_bound: sigma and xi must be > 0");
  const double tail = std::erfc(xi / (std::sqrt(2.0) * sigma));
  const double keep = 1.0 - tail;
  if (keep <= 0.0) return 1.0;
  return 1.0 - std::pow(keep, static_cast<double>(n) * n);
}

double permanent_moment_closed_form(int n, int m, int order) {
  if (n < 1 || m < 1 || (order != 2 && order != 4))
    throw std::invalid_argument("permanent_moment_closed_form: need n, m >= 1 and order in {2,4}");
  const double nd = static_cast<double>(n);
  if (order == 2)
    return std::exp(nd * std::log(2.0) + log_factorial(n) - nd * std::log(m));
  return std::exp(2.0 * nd * std::log(2.0) + 2.0 * log_factorial(n) + std::log(nd + 1.0) -
                  2.0 * nd * std::log(m));
}

MomentEstimate permanent_moment_mc(int n, int m, int order, std::uint64_t trials, RngStream& rng) {
  if (n < 1 || n > 8)
    throw std::invalid_argument("permanent_moment_mc: n must lie in [1, 8] (oracle range)");
  if (order != 2 && order != 4)
    throw std::invalid_argument("permanent_moment_mc: order must be 2 or 4");
  if (trials < 1000) throw std::invalid_argument("permanent_moment_mc: need trials >= 1000");

  const double sigma = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> values(trials);
  RngStream base = rng.split();
  parallel_for(0, trials, [&](std::size_t i) {
    RngStream local = base.derive(i);
    std::vector<Complex> buf(static_cast<std::size_t>(n) * n);
    for (auto& x : buf) x = local.next_complex_gaussian(sigma);
    const double p2 = std::norm(permanent_ryser_packed(buf.data(), n));
    values[i] = (order == 2) ? p2 : p2 * p2;
  });

  MomentEstimate est;
  est.order = order;
  est.n = n;
  est.m = m;
  est.trials = trials;
  est.mc_mean = mean_of(values);
  est.mc_standard_error = standard_error_of(values, est.mc_mean);
  est.closed_form = permanent_moment_closed_form(n, m, order);

  // Median of 16 block means.
  const std::size_t blocks = 16;
  const std::size_t per_block = trials / blocks;
  if (per_block >= 1) {
    std::vector<double> block_means(blocks);
    for (std::size_t b = 0; b < blocks; ++b)
      block_means[b] =
          mean_of(std::span(values).subspan(b * per_block, per_block));
    std::nth_element(block_means.begin(), block_means.begin() + blocks / 2, block_means.end());
    const double hi = block_means[blocks / 2];
    std::nth_element(block_means.begin(), block_means.begin() + blocks / 2 - 1, block_means.end());
    est.median_of_means = 0.5 * (hi + block_means[blocks / 2 - 1]);
  } else {
    est.median_of_means = est.mc_mean;
  }
  return est;
}

namespace {

double probe_value(ProbeFunction f, const ComplexMatrix& X, double threshold,
                   double factorial_product) {
  switch (f) {
    case ProbeFunction::One:
      return 1.0;
    case ProbeFunction::MaxEntryAtLeast:
      return X.cwiseAbs().maxCoeff() >= threshold ? 1.0 : 0.0;
    case ProbeFunction::PermSquaredAtLeast:
      return (std::norm(permanent_ryser(X)) / factorial_product >= threshold) ? 1.0 : 0.0;
  }
  throw std::invalid_argument("multiplicative_bound_probe: unknown probe function");
}

// First n columns of a Haar unitary as an m x n isometry (thin QR of a
// Ginibre block with the R-diagonal phase fix). Agrees in distribution with
// haar_unitary(m).leftCols(n).
ComplexMatrix haar_isometry(int m, int n, RngStream& rng) {
  ComplexMatrix G(m, n);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < n; ++k) G(j, k) = rng.next_complex_gaussian(1.0);
  Eigen::HouseholderQR<ComplexMatrix> qr(G);
  ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(m, n);
  const auto diag = qr.matrixQR().diagonal();
  for (int k = 0; k < n; ++k) {
    const Complex d = diag(k);
    const double mag = std::abs(d);
    Q.col(k) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
  }
  return Q;
}

}  // namespace

MultiplicativeBoundReport multiplicative_bound_probe(int m, int n, const OutcomeSequence& S,
                                                     ProbeFunction f, double threshold,
                                                     double sigma, std::uint64_t trials,
                                                     RngStream& rng) {
  if (m < 1 || n < 1 || n > m)
    throw std::invalid_argument("multiplicative_bound_probe: need 1 <= n <= m");
  if (static_cast<int>(S.occ.size()) != m || S.total() != n)
    throw std::invalid_argument("multiplicative_bound_probe: S invalid for (m, n)");
  if (!(sigma > 0.0)) throw std::invalid_argument("multiplicative_bound_probe: sigma must be > 0");
  if (trials < 1) throw std::invalid_argument("multiplicative_bound_probe: trials must be >= 1");

  const std::vector<int> tilde = S.nonzero();
  double fact = 1.0;
  for (int s : S.occ)
    for (int i = 2; i <= s; ++i) fact *= i;

  std::vector<double> haar_vals(trials), gauss_vals(trials);
  std::vector<double> haar_e2(trials), gauss_e2(trials);
  RngStream base = rng.split();
  const bool full_haar = m <= 64;

  parallel_for(0, trials, [&](std::size_t i) {
    RngStream hs = base.derive(2 * i);
    RngStream gs = base.derive(2 * i + 1);

    ComplexMatrix US(n, n);
    if (full_haar) {
      const ComplexMatrix U = haar_unitary(m, hs);
      US = build_submatrix(U, S.occ, n);
    } else {
      // Haar invariance under row permutations: the joint law of the rows
      // selected by S equals that of the leading |S~| rows of an isometry.
      const ComplexMatrix V = haar_isometry(m, n, hs);
      int r = 0;
      for (std::size_t j = 0; j < tilde.size(); ++j)
        for (int c = 0; c < tilde[j]; ++c) US.row(r++) = V.row(static_cast<int>(j));
    }
    haar_vals[i] = probe_value(f, US, threshold, fact);
    haar_e2[i] = US.cwiseAbs2().mean();

    const ComplexMatrix X = sample_row_repeated_gaussian(S.occ, sigma, gs);
    gauss_vals[i] = probe_value(f, X, threshold, fact);
    gauss_e2[i] = X.cwiseAbs2().mean();
  });

  MultiplicativeBoundReport rep;
  rep.m = m;
  rep.n = n;
  rep.outcome = S.occ;
  rep.sigma = sigma;
  rep.threshold = threshold;
  rep.trials = trials;
  rep.haar_mean = mean_of(haar_vals);
  rep.haar_se = standard_error_of(haar_vals, rep.haar_mean);
  rep.gaussian_mean = mean_of(gauss_vals);
  rep.gaussian_se = standard_error_of(gauss_vals, rep.gaussian_mean);
  rep.ratio = rep.gaussian_mean > 0.0 ? rep.haar_mean / rep.gaussian_mean
                                      : (rep.haar_mean > 0.0 ? kInf : 1.0);
  rep.haar_entry_second_moment = mean_of(haar_e2);
  rep.gaussian_entry_second_moment = mean_of(gauss_e2);
  rep.entry_moment_ratio = rep.haar_entry_second_moment / rep.gaussian_entry_second_moment;
  return rep;
}

FlatnessReport empirical_flatness(int m, int n, std::uint64_t trials, bool restricted,
                                  double threshold, RngStream& rng, std::uint64_t cap) {
  const auto space = SampleSpace::enumerate(m, n, restricted, cap);
  if (space->empty())
    throw std::invalid_argument("empirical_flatness: empty sample space (restricted with m < n)");
  if (n > m) throw std::invalid_argument("empirical_flatness: n > m is not a valid device");

  FlatnessReport report;
  report.m = m;
  report.n = n;
  report.restricted = restricted;
  report.threshold = threshold > 0.0 ? threshold : std::exp(-2.0 * n);
  report.trials.resize(trials);

  const std::uint64_t total = space->size();
  const std::uint64_t chunk = std::max<std::uint64_t>(64, total / (thread_budget() * 16 + 1));
  const std::uint64_t num_chunks = (total + chunk - 1) / chunk;

  RngStream base = rng.split();
  for (std::uint64_t t = 0; t < trials; ++t) {
    RngStream ts = base.derive(t);
    const ComplexMatrix U = haar_unitary(m, ts);
    std::vector<Complex> cols(static_cast<std::size_t>(m) * n);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < n; ++k) cols[static_cast<std::size_t>(j) * n + k] = U(j, k);

    std::vector<double> chunk_max(num_chunks, 0.0);
    std::vector<std::uint64_t> chunk_arg(num_chunks, 0);
    parallel_for(0, num_chunks, [&](std::size_t ci) {
      const std::uint64_t lo = ci * chunk;
      const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
      std::vector<int> occ(m);
      std::vector<Complex> sub(static_cast<std::size_t>(n) * n);
      space->element_into(lo, occ);
      double best = -1.0;
      std::uint64_t best_idx = lo;
      for (std::uint64_t i = lo; i < hi; ++i) {
        int r = 0;
        double fact = 1.0;
        for (int j = 0; j < m; ++j) {
          for (int c = 0; c < occ[j]; ++c) {
            std::copy_n(cols.begin() + static_cast<std::size_t>(j) * n, n,
                        sub.begin() + static_cast<std::size_t>(r) * n);
            ++r;
          }
          for (int c = 2; c <= occ[j]; ++c) fact *= c;
        }
        const double p = std::norm(permanent_ryser_packed(sub.data(), n)) / fact;
        if (p > best) {
          best = p;
          best_idx = i;
        }
        if (i + 1 < hi) space->next_in_place(occ);
      }
      chunk_max[ci] = best;
      chunk_arg[ci] = best_idx;
    });

    double best = -1.0;
    std::uint64_t best_idx = 0;
    for (std::uint64_t ci = 0; ci < num_chunks; ++ci)
      if (chunk_max[ci] > best) {
        best = chunk_max[ci];
        best_idx = chunk_arg[ci];
      }
    report.trials[t].max_prob = best;
    report.trials[t].argmax = space->element(best_idx).occ;
  }

  std::uint64_t exceed = 0;
  for (const auto& tr : report.trials)
    if (tr.max_prob >= report.threshold) ++exceed;
  report.exceedance_fraction = trials ? static_cast<double>(exceed) / trials : 0.0;
  return report;
}

TheoremBound theorem_bound_evaluator(int n, std::uint64_t m, double epsilon,
                                     TheoremBoundVariant variant) {
  if (n < 1 || m < 1) throw std::invalid_argument("theorem_bound_evaluator: need n, m >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("theorem_bound_evaluator: epsilon must be > 0");

  TheoremBound out;
  const double log_phi = log_full_space_size(m, n);
  const double nd = static_cast<double>(n);

  if (variant == TheoremBoundVariant::Thm5Chain) {
    // xi = (sqrt(eps)/n!)^{1/n}, sigma = 1/sqrt(m); geometric-series step
    // needs n^2 e^{1 - xi^2/(2 sigma^2)} <= 1/2.
    const double log_xi = (0.5 * std::log(epsilon) - log_factorial(n)) / nd;
    const double xi2_over_2sigma2 = 0.5 * static_cast<double>(m) * std::exp(2.0 * log_xi);
    const double log_series_term = 2.0 * std::log(nd) + 1.0 - xi2_over_2sigma2;
    if (log_series_term > std::log(0.5)) {
      out.value = 1.0;
      out.vacuous = true;
      return out;
    }
    const double log_value = log_phi + std::log(2.0) + log_series_term;
    out.value = std::min(1.0, std::exp(log_value));
    out.vacuous = log_value >= 0.0;
    return out;
  }

  // Thm6Markov
  const double log_value = log_phi + 2.0 * nd * std::log(2.0) + 2.0 * log_factorial(n) +
                           std::log(nd + 1.0) - 2.0 * nd * std::log(static_cast<double>(m)) -
                           2.0 * std::log(epsilon);
  out.value = std::min(1.0, std::exp(log_value));
  out.vacuous = log_value >= 0.0;
  return out;
}

}  // namespace bosonbench
