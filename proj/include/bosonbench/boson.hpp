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
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "bosonbench/linalg.hpp"
#include "bosonbench/rng.hpp"

namespace bosonbench {

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Mode-occupation list (s_1, ..., s_m) with sum n.
struct OutcomeSequence {
  std::vector<int> occ;

  OutcomeSequence() = default;
  explicit OutcomeSequence(std::vector<int> o) : occ(std::move(o)) {}

  long total() const;
  bool collision_free() const;  // all s_j in {0, 1}
  /// Occupations with zeros removed, order preserved.
  std::vector<int> nonzero() const;

  friend bool operator==(const OutcomeSequence&, const OutcomeSequence&) = default;
};

/// Throws unless occ has length m, entries >= 0 and sum n.
OutcomeSequence make_outcome(std::vector<int> occ, int m, int n);

/// binomial(a, b) or nullopt on uint64 overflow.
std::optional<std::uint64_t> binomial_checked(std::uint64_t a, std::uint64_t b);

/// |Phi_{m,n}| = binomial(m+n-1, n), or |Phi*_{m,n}| = binomial(m, n).
/// Throws if the count overflows uint64.
std::uint64_t sample_space_size(int m, int n, bool restricted);

/// The occupation-sequence space of n bosons in m modes, enumerated in
/// lexicographic order on (s_1, ..., s_m). Elements are ranked/unranked
/// combinatorially, so the space never materializes its elements; index_of
/// and element are exact inverses. restricted = collision-free subspace.
/// Immutable and safe to share across threads.
class SampleSpace {
 public:
  static std::shared_ptr<const SampleSpace> enumerate(
      int m, int n, bool restricted, std::uint64_t cap = kDefaultEnumerationCap);

  int modes() const { return m_; }
  int photons() const { return n_; }
  bool restricted() const { return restricted_; }
  std::uint64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Unranks index i (0-based, lexicographic).
  OutcomeSequence element(std::uint64_t i) const;
  /// Lexicographic rank of S; throws if S is not in the space.
  std::uint64_t index_of(std::span<const int> occ) const;

  /// Overwrites occ with its lexicographic successor. occ must not be the
  /// last element.
  void next_in_place(std::span<int> occ) const;
  /// Unranks i into a caller-provided buffer of length m.
  void element_into(std::uint64_t i, std::span<int> occ) const;

 private:
  SampleSpace(int m, int n, bool restricted, std::uint64_t size)
      : m_(m), n_(n), restricted_(restricted), size_(size) {}
  int m_, n_;
  bool restricted_;
  std::uint64_t size_;
};

/// Probability vector aligned with a SampleSpace enumeration.
class DiscreteDistribution {
 public:
  /// Requires probs.size() == space->size(), entries >= 0 and
  /// |sum - 1| <= 1e-9.
  DiscreteDistribution(std::shared_ptr<const SampleSpace> space, std::vector<double> probs);

  const SampleSpace& space() const { return *space_; }
  std::shared_ptr<const SampleSpace> space_ptr() const { return space_; }
  std::span<const double> probs() const { return probs_; }
  double prob(std::uint64_t i) const { return probs_[i]; }
  std::uint64_t size() const { return probs_.size(); }

  /// epsilon-flatness: the largest outcome probability.
  double max_prob() const;
  /// H_inf = -log2(max_prob), in bits.
  double min_entropy_bits() const;

 private:
  std::shared_ptr<const SampleSpace> space_;
  std::vector<double> probs_;
};

/// n x n submatrix U_S: first n columns of U, s_j copies of row j, rows in
/// increasing mode order (copies adjacent). The permanent is invariant under
/// the row order, so any consistent convention is equivalent; this one is
/// fixed for reproducibility.
ComplexMatrix build_submatrix(const ComplexMatrix& U, std::span<const int> occupations, int n);

/// Pr[S] = |Perm(U_S)|^2 / prod_j s_j!
double outcome_probability(const ComplexMatrix& U, std::span<const int> occupations);

/// The exact output distribution D_U over Phi_{m,n}. Verifies normalization
/// to 1e-9 before returning (a failure signals a unitarity or permanent bug).
DiscreteDistribution full_distribution(const ComplexMatrix& U, int m, int n,
                                       std::uint64_t cap = kDefaultEnumerationCap);

/// D*_U: D_U restricted to the collision-free subspace and renormalized.
/// Throws if the collision-free mass is <= 1e-12 (degenerate unitary).
DiscreteDistribution postselected_distribution(const ComplexMatrix& U, int m, int n,
                                               std::uint64_t cap = kDefaultEnumerationCap);

/// Total D_U mass on the collision-free subspace.
double collision_free_fraction(const ComplexMatrix& U, int m, int n,
                               std::uint64_t cap = kDefaultEnumerationCap);

DiscreteDistribution uniform_distribution(std::shared_ptr<const SampleSpace> space);

/// Walker/Vose alias table for O(1) categorical sampling.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> probs);
  std::uint64_t sample(RngStream& rng) const;

 private:
  std::vector<double> threshold_;
  std::vector<std::uint32_t> alias_;
};

/// l i.i.d. draws as indices into the space enumeration; deterministic per
/// RngStream.
std::vector<std::uint64_t> draw_sample_indices(const DiscreteDistribution& dist, std::uint64_t l,
                                               RngStream& rng);
std::vector<OutcomeSequence> draw_samples(const DiscreteDistribution& dist, std::uint64_t l,
                                          RngStream& rng);

}  // namespace bosonbench
