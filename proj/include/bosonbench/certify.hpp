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
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bosonbench/boson.hpp"

namespace bosonbench {

/// Fingerprint tensor C of k sample sequences over a label space of size N:
/// C_{k_1,...,k_k} counts the labels that appear exactly k_j times in
/// sequence j, for all j simultaneously. Sparse storage, dense semantics
/// (absent indices count 0; the all-zero index carries the unseen labels).
/// This is the complete reorder/relabel-invariant summary of the data.
class FingerprintTensor {
 public:
  /// sequences: k lists of equal length l; every label must be < space_size.
  static FingerprintTensor from_sequences(std::span<const std::vector<std::uint64_t>> sequences,
                                          std::uint64_t space_size);

  int num_sequences() const { return k_; }
  std::uint64_t samples_per_sequence() const { return l_; }
  std::uint64_t space_size() const { return space_size_; }

  /// Dense accessor; index must have length k with entries in [0, l].
  std::uint64_t at(std::span<const int> index) const;
  const std::map<std::vector<int>, std::uint64_t>& nonzeros() const { return counts_; }

  /// True iff no label occurs more than once across all sequences combined
  /// (C equals the trivial tensor for its (k, l, N)).
  bool trivial() const;

  /// {"k":, "l":, "N":, "nonzeros": [[[k1,...,kk], count], ...]}
  std::string to_json() const;

  friend bool operator==(const FingerprintTensor&, const FingerprintTensor&) = default;

 private:
  FingerprintTensor(int k, std::uint64_t l, std::uint64_t space_size)
      : k_(k), l_(l), space_size_(space_size) {}
  int k_ = 1;
  std::uint64_t l_ = 0;
  std::uint64_t space_size_ = 0;
  std::map<std::vector<int>, std::uint64_t> counts_;
};

FingerprintTensor fingerprint(std::span<const std::vector<std::uint64_t>> sequences,
                              std::uint64_t space_size);
bool is_trivial_fingerprint(const FingerprintTensor& C);

/// Birthday-paradox lower bound 2^{-l^2 eps} on the all-distinct probability
/// for epsilon-flat sources. Claimed only for l <= 1 + 1/(2 eps); call
/// birthday_bound_valid first, out-of-range l throws.
double birthday_lower_bound(std::uint64_t l, double epsilon);
bool birthday_bound_valid(std::uint64_t l, double epsilon);

/// (k a)^2 sqrt(eps): bound on Pr[C != C~] for k epsilon-flat sources and
/// l <= a (1/eps)^{1/4} samples each. Requires k l <= 1 + 1/(2 eps).
double fingerprint_triviality_bound(int k, std::uint64_t l, double epsilon, double a);

struct Flatness {
  double epsilon;           // largest outcome probability
  double min_entropy_bits;  // -log2(epsilon)
};
Flatness flatness(const DiscreteDistribution& dist);

/// t-Renyi relative entropy S_t(P||Q), natural log; +infinity when supp(P)
/// is not contained in supp(Q). t >= 0, t != 1 (use relative_entropy for the
/// t -> 1 limit). P and Q must be aligned to the same enumeration.
double renyi_relative_entropy(std::span<const double> P, std::span<const double> Q, double t);
double renyi_relative_entropy(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                              double t);

/// S(P||Q) = sum_{supp(P)} P ln(P/Q); +infinity on support failure.
double relative_entropy(std::span<const double> P, std::span<const double> Q);
double relative_entropy(const DiscreteDistribution& P, const DiscreteDistribution& Q);

double one_norm_distance(std::span<const double> P, std::span<const double> Q);
double one_norm_distance(const DiscreteDistribution& P, const DiscreteDistribution& Q);

/// Upper bound on (1/l) ln beta_{l,alpha} for discriminating P from Q with
/// type-I error capped at alpha:
///   -S(P||Q) + (1/sqrt(l)) 4 sqrt(2) ln(1/alpha) (S_{3/2}(P||Q)/2 + ln 3).
/// Returns +infinity when the entropies are infinite (no guarantee).
double discrimination_error_bound(std::span<const double> P, std::span<const double> Q,
                                  std::uint64_t l, double alpha);
double discrimination_error_bound(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                                  std::uint64_t l, double alpha);

/// Smallest l that makes discrimination_error_bound <= 0; nullopt when no
/// finite l does (P = Q or infinite entropies).
std::optional<std::uint64_t> min_samples_negative(std::span<const double> P,
                                                  std::span<const double> Q, double alpha);
std::optional<std::uint64_t> min_samples_negative(const DiscreteDistribution& P,
                                                  const DiscreteDistribution& Q, double alpha);

/// eta = 1 + e^{S_{3/2}/2} + e^{-S_{1/2}/2}, reported alongside the bound.
double discrimination_eta(std::span<const double> P, std::span<const double> Q);

struct HypothesisTestReport {
  std::uint64_t l = 0;
  double alpha = 0.0;
  double type1_frequency = 0.0;  // rejected P when P was true
  double type2_frequency = 0.0;  // accepted P when Q was true
  double bound_log_beta_per_sample = 0.0;
  double eta = 0.0;
};

enum class Hypothesis { P, Q };

/// Decides by the sign of sum_i ln(P[s_i]/Q[s_i]); ties and zero-evidence go
/// to Q (conservative: do not certify). Samples are indices into the common
/// enumeration. A sample with P[s] = Q[s] = 0 throws.
Hypothesis likelihood_ratio_test(std::span<const double> P, std::span<const double> Q,
                                 std::span<const std::uint64_t> samples);
Hypothesis likelihood_ratio_test(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                                 std::span<const std::uint64_t> samples);

enum class Decision { Accept, Reject };

using SymmetricPolicy = std::function<Decision(const FingerprintTensor&)>;

/// Default policy: reject uniformity iff any collision occurred.
Decision reject_on_collision_policy(const FingerprintTensor& C);

/// Black-box certifier constrained to symmetric information: the samples are
/// first reduced to their fingerprint, and the policy sees only that. Output
/// is therefore invariant under sample reordering and space relabeling by
/// construction.
Decision symmetric_certifier(std::span<const std::uint64_t> samples, std::uint64_t space_size,
                             const SymmetricPolicy& policy = reject_on_collision_policy);

}  // namespace bosonbench
