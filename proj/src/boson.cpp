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

#include "bosonbench/boson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "bosonbench/parallel.hpp"

namespace bosonbench {

long OutcomeSequence::total() const {
  return std::accumulate(occ.begin(), occ.end(), 0L);
}

bool OutcomeSequence::collision_free() const {
  return std::all_of(occ.begin(), occ.end(), [](int s) { return s == 0 || s == 1; });
}

std::vector<int> OutcomeSequence::nonzero() const {
  std::vector<int> out;
  for (int s : occ)
    if (s != 0) out.push_back(s);
  return out;
}

OutcomeSequence make_outcome(std::vector<int> occ, int m, int n) {
  if (static_cast<int>(occ.size()) != m)
    throw std::invalid_argument("make_outcome: expected " + std::to_string(m) + " modes, got " +
                                std::to_string(occ.size()));
  long sum = 0;
  for (int s : occ) {
    if (s < 0) throw std::invalid_argument("make_outcome: negative occupation");
    sum += s;
  }
  if (sum != n)
    throw std::invalid_argument("make_outcome: occupations sum to " + std::to_string(sum) +
                                ", expected " + std::to_string(n));
  return OutcomeSequence(std::move(occ));
}

std::optional<std::uint64_t> binomial_checked(std::uint64_t a, std::uint64_t b) {
  if (b > a) return 0;
  b = std::min(b, a - b);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= b; ++i) {
    r = r * (a - b + i) / i;  // exact: product of i consecutive integers is divisible by i!
    if (r > static_cast<unsigned __int128>(UINT64_MAX)) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t sample_space_size(int m, int n, bool restricted) {
  if (m < 1 || n < 1) throw std::invalid_argument("sample_space_size: m, n must be >= 1");
  const auto count = restricted
                         ? binomial_checked(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n))
                         : binomial_checked(static_cast<std::uint64_t>(m) + n - 1,
                                            static_cast<std::uint64_t>(n));
  if (!count) throw std::overflow_error("sample_space_size: |Phi| overflows uint64");
  return *count;
}

namespace {

// Completions of a partial sequence: r bosons over k trailing modes.
std::uint64_t completions(std::uint64_t r, int k, bool restricted) {
  if (k == 0) return r == 0 ? 1 : 0;
  const auto c = restricted
                     ? binomial_checked(static_cast<std::uint64_t>(k), r)
                     : binomial_checked(r + static_cast<std::uint64_t>(k) - 1, r);
  return c.value();  // bounded by the space size, which fit uint64
}

}  // namespace

std::shared_ptr<const SampleSpace> SampleSpace::enumerate(int m, int n, bool restricted,
                                                          std::uint64_t cap) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("enumerate_sample_space: m, n must be >= 1");
  std::uint64_t size = 0;
  if (restricted && m < n) {
    size = 0;  // legal: no collision-free sequence exists
  } else {
    const auto count =
        restricted ? binomial_checked(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(n))
                   : binomial_checked(static_cast<std::uint64_t>(m) + n - 1,
                                      static_cast<std::uint64_t>(n));
    if (!count || *count > cap)
      throw std::length_error("enumerate_sample_space: |Phi| for m=" + std::to_string(m) +
                              ", n=" + std::to_string(n) + " exceeds the enumeration cap " +
                              std::to_string(cap));
    size = *count;
  }
  return std::shared_ptr<const SampleSpace>(new SampleSpace(m, n, restricted, size));
}

void SampleSpace::element_into(std::uint64_t i, std::span<int> occ) const {
  if (i >= size_) throw std::out_of_range("SampleSpace::element: index out of range");
  if (occ.size() != static_cast<std::size_t>(m_))
    throw std::invalid_argument("SampleSpace::element_into: buffer length != m");
  std::uint64_t rank = i;
  int rem = n_;
  for (int j = 0; j < m_; ++j) {
    const int vmax = restricted_ ? std::min(rem, 1) : rem;
    int chosen = vmax;
    for (int v = 0; v <= vmax; ++v) {
      const std::uint64_t cnt =
          completions(static_cast<std::uint64_t>(rem - v), m_ - j - 1, restricted_);
      if (rank < cnt) {
        chosen = v;
        break;
      }
      rank -= cnt;
    }
    occ[j] = chosen;
    rem -= chosen;
  }
}

OutcomeSequence SampleSpace::element(std::uint64_t i) const {
  std::vector<int> occ(m_);
  element_into(i, occ);
  return OutcomeSequence(std::move(occ));
}

std::uint64_t SampleSpace::index_of(std::span<const int> occ) const {
  if (occ.size() != static_cast<std::size_t>(m_))
    throw std::invalid_argument("SampleSpace::index_of: wrong length");
  long sum = 0;
  for (int s : occ) {
    if (s < 0 || (restricted_ && s > 1))
      throw std::invalid_argument("SampleSpace::index_of: sequence not in space");
    sum += s;
  }
  if (sum != n_) throw std::invalid_argument("SampleSpace::index_of: occupations do not sum to n");
  std::uint64_t rank = 0;
  int rem = n_;
  for (int j = 0; j < m_; ++j) {
    for (int v = 0; v < occ[j]; ++v)
      rank += completions(static_cast<std::uint64_t>(rem - v), m_ - j - 1, restricted_);
    rem -= occ[j];
  }
  return rank;
}

void SampleSpace::next_in_place(std::span<int> occ) const {
  // Lexicographic successor: bump the slot left of the last nonzero, move the
  // leftover mass to the tail in its smallest arrangement.
  int p = m_ - 1;
  while (p >= 0 && occ[p] == 0) --p;
  if (!restricted_) {
    if (p <= 0) throw std::out_of_range("SampleSpace::next_in_place: already at last element");
    const int r = occ[p] - 1;
    occ[p - 1] += 1;
    occ[p] = 0;
    occ[m_ - 1] = r;
  } else {
    int j = p - 1;
    while (j >= 0 && occ[j] == 1) --j;
    if (j < 0) throw std::out_of_range("SampleSpace::next_in_place: already at last element");
    int ones_after = 0;
    for (int t = j + 1; t < m_; ++t) {
      ones_after += occ[t];
      occ[t] = 0;
    }
    occ[j] = 1;
    for (int t = m_ - (ones_after - 1); t < m_; ++t) occ[t] = 1;
  }
}

DiscreteDistribution::DiscreteDistribution(std::shared_ptr<const SampleSpace> space,
                                           std::vector<double> probs)
    : space_(std::move(space)), probs_(std::move(probs)) {
  if (!space_) throw std::invalid_argument("DiscreteDistribution: null space");
  if (probs_.size() != space_->size())
    throw std::invalid_argument("DiscreteDistribution: probability vector length != space size");
  if (probs_.empty()) throw std::invalid_argument("DiscreteDistribution: empty space");
  long double sum = 0.0L;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument("DiscreteDistribution: probabilities must be finite and >= 0");
    sum += p;
  }
  if (std::abs(static_cast<double>(sum) - 1.0) > 1e-9)
    throw std::invalid_argument("DiscreteDistribution: probabilities sum to " +
                                std::to_string(static_cast<double>(sum)) + ", not 1 within 1e-9");
}

double DiscreteDistribution::max_prob() const {
  return *std::max_element(probs_.begin(), probs_.end());
}

double DiscreteDistribution::min_entropy_bits() const { return -std::log2(max_prob()); }

ComplexMatrix build_submatrix(const ComplexMatrix& U, std::span<const int> occupations, int n) {
  const int m = static_cast<int>(U.rows());
  if (U.cols() != m) throw std::invalid_argument("build_submatrix: U must be square");
  if (static_cast<int>(occupations.size()) != m)
    throw std::invalid_argument("build_submatrix: sequence length != m");
  if (n > m) throw std::invalid_argument("build_submatrix: n > m");
  long sum = 0;
  for (int s : occupations) sum += s;
  if (sum != n) throw std::invalid_argument("build_submatrix: occupations do not sum to n");

  ComplexMatrix out(n, n);
  int r = 0;
  for (int j = 0; j < m; ++j)
    for (int c = 0; c < occupations[j]; ++c) out.row(r++) = U.row(j).head(n);
  return out;
}

namespace {

// s! as double; exact through 18!, adequate beyond (probabilities are doubles).
double factorial_d(int s) {
  double f = 1.0;
  for (int i = 2; i <= s; ++i) f *= i;
  return f;
}

double occupation_factorial_product(std::span<const int> occupations) {
  double prod = 1.0;
  for (int s : occupations) prod *= factorial_d(s);
  return prod;
}

}  // namespace

double outcome_probability(const ComplexMatrix& U, std::span<const int> occupations) {
  long n = 0;
  for (int s : occupations) n += s;
  const ComplexMatrix US = build_submatrix(U, occupations, static_cast<int>(n));
  const Complex perm = permanent_ryser(US);
  return std::norm(perm) / occupation_factorial_product(occupations);
}

namespace {

// Shared worker: probability of every element of `space` under U, with the
// stated factorial convention, assembled in enumeration order.
std::vector<double> distribution_values(const ComplexMatrix& U, const SampleSpace& space,
                                        bool with_factorials) {
  const int m = space.modes();
  const int n = space.photons();
  if (U.rows() != m || U.cols() != m)
    throw std::invalid_argument("distribution: U must be m x m with m = " + std::to_string(m));
  if (!is_unitary(U))
    throw std::invalid_argument("distribution: U is not unitary within 1e-10");
  if (n > m) throw std::invalid_argument("distribution: n > m is not a valid device");

  std::vector<double> probs(space.size());
  // Row-major copy of the first n columns; submatrices gather from here.
  std::vector<Complex> cols(static_cast<std::size_t>(m) * n);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < n; ++k) cols[static_cast<std::size_t>(j) * n + k] = U(j, k);

  const std::uint64_t total = space.size();
  const std::uint64_t chunk = std::max<std::uint64_t>(1, total / (thread_budget() * 64 + 1));
  const std::uint64_t num_chunks = (total + chunk - 1) / chunk;

  parallel_for(0, num_chunks, [&](std::size_t ci) {
    const std::uint64_t lo = ci * chunk;
    const std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
    std::vector<int> occ(m);
    std::vector<Complex> sub(static_cast<std::size_t>(n) * n);
    space.element_into(lo, occ);
    for (std::uint64_t i = lo; i < hi; ++i) {
      int r = 0;
      for (int j = 0; j < m; ++j)
        for (int c = 0; c < occ[j]; ++c) {
          std::copy_n(cols.begin() + static_cast<std::size_t>(j) * n, n, sub.begin() + r * n);
          ++r;
        }
      const double p = std::norm(permanent_ryser_packed(sub.data(), n));
      probs[i] = with_factorials ? p / occupation_factorial_product(occ) : p;
      if (i + 1 < hi) space.next_in_place(occ);
    }
  });
  return probs;
}

}  // namespace

DiscreteDistribution full_distribution(const ComplexMatrix& U, int m, int n, std::uint64_t cap) {
  auto space = SampleSpace::enumerate(m, n, false, cap);
  std::vector<double> probs = distribution_values(U, *space, true);
  long double sum = 0.0L;
  for (double p : probs) sum += p;
  if (std::abs(static_cast<double>(sum) - 1.0) > 1e-9)
    throw std::runtime_error("full_distribution: probabilities sum to " +
                             std::to_string(static_cast<double>(sum)) +
                             "; internal consistency violated (unitarity or permanent bug)");
  return DiscreteDistribution(std::move(space), std::move(probs));
}

DiscreteDistribution postselected_distribution(const ComplexMatrix& U, int m, int n,
                                               std::uint64_t cap) {
  auto space = SampleSpace::enumerate(m, n, true, cap);
  if (space->empty())
    throw std::invalid_argument("postselected_distribution: collision-free space is empty (m < n)");
  std::vector<double> probs = distribution_values(U, *space, false);
  long double mass = 0.0L;
  for (double p : probs) mass += p;
  if (static_cast<double>(mass) <= 1e-12)
    throw std::runtime_error("postselected_distribution: collision-free mass " +
                             std::to_string(static_cast<double>(mass)) +
                             " <= 1e-12; post-selection is degenerate for this unitary");
  for (double& p : probs) p = static_cast<double>(p / mass);
  return DiscreteDistribution(std::move(space), std::move(probs));
}

double collision_free_fraction(const ComplexMatrix& U, int m, int n, std::uint64_t cap) {
  auto space = SampleSpace::enumerate(m, n, true, cap);
  if (space->empty()) return 0.0;
  const std::vector<double> probs = distribution_values(U, *space, false);
  long double mass = 0.0L;
  for (double p : probs) mass += p;
  return static_cast<double>(mass);
}

DiscreteDistribution uniform_distribution(std::shared_ptr<const SampleSpace> space) {
  if (!space || space->empty())
    throw std::invalid_argument("uniform_distribution: empty sample space");
  const std::size_t size = space->size();
  return DiscreteDistribution(std::move(space), std::vector<double>(size, 1.0 / size));
}

AliasTable::AliasTable(std::span<const double> probs) {
  const std::size_t n = probs.size();
  if (n == 0) throw std::invalid_argument("AliasTable: empty distribution");
  if (n > UINT32_MAX) throw std::invalid_argument("AliasTable: too many categories");
  long double sum = 0.0L;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("AliasTable: negative probability");
    sum += p;
  }
  if (!(sum > 0.0L)) throw std::invalid_argument("AliasTable: zero total mass");

  threshold_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i)
    scaled[i] = static_cast<double>(probs[i] / sum * static_cast<long double>(n));

  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i)
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));

  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t g = large.back();
    threshold_[s] = scaled[s];
    alias_[s] = g;
    scaled[g] = (scaled[g] + scaled[s]) - 1.0;
    if (scaled[g] < 1.0) {
      large.pop_back();
      small.push_back(g);
    }
  }
  for (std::uint32_t i : large) threshold_[i] = 1.0;
  for (std::uint32_t i : small) threshold_[i] = 1.0;  // numerical leftovers
}

std::uint64_t AliasTable::sample(RngStream& rng) const {
  const std::uint64_t i = rng.uniform_below(threshold_.size());
  return rng.next_double() < threshold_[i] ? i : alias_[i];
}

std::vector<std::uint64_t> draw_sample_indices(const DiscreteDistribution& dist, std::uint64_t l,
                                               RngStream& rng) {
  const AliasTable table(dist.probs());
  std::vector<std::uint64_t> out(l);
  for (auto& s : out) s = table.sample(rng);
  return out;
}

std::vector<OutcomeSequence> draw_samples(const DiscreteDistribution& dist, std::uint64_t l,
                                          RngStream& rng) {
  const auto idx = draw_sample_indices(dist, l, rng);
  std::vector<OutcomeSequence> out;
  out.reserve(idx.size());
  for (std::uint64_t i : idx) out.push_back(dist.space().element(i));
  return out;
}

}  // namespace bosonbench
