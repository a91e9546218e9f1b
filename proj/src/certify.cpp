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

#include "bosonbench/certify.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace bosonbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_aligned(std::span<const double> P, std::span<const double> Q, const char* op) {
  if (P.size() != Q.size() || P.empty())
    throw std::invalid_argument(std::string(op) + ": P and Q must be nonempty and aligned to the "
                                                  "same sample space");
}

void require_same_space(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                        const char* op) {
  const SampleSpace& a = P.space();
  const SampleSpace& b = Q.space();
  if (a.modes() != b.modes() || a.photons() != b.photons() || a.restricted() != b.restricted())
    throw std::invalid_argument(std::string(op) + ": distributions live on different spaces");
}

}  // namespace

FingerprintTensor FingerprintTensor::from_sequences(
    std::span<const std::vector<std::uint64_t>> sequences, std::uint64_t space_size) {
  if (sequences.empty()) throw std::invalid_argument("fingerprint: need at least one sequence");
  if (space_size == 0) throw std::invalid_argument("fingerprint: empty label space");
  const int k = static_cast<int>(sequences.size());
  const std::uint64_t l = sequences[0].size();
  for (const auto& seq : sequences) {
    if (seq.size() != l)
      throw std::invalid_argument("fingerprint: sequences must all have the same length");
    for (std::uint64_t label : seq)
      if (label >= space_size)
        throw std::invalid_argument("fingerprint: sample label " + std::to_string(label) +
                                    " outside the declared space of size " +
                                    std::to_string(space_size));
  }

  // Per-label occurrence profile across the k sequences.
  std::unordered_map<std::uint64_t, std::vector<int>> profiles;
  for (int j = 0; j < k; ++j)
    for (std::uint64_t label : sequences[j]) {
      auto [it, inserted] = profiles.try_emplace(label, k, 0);
      it->second[static_cast<std::size_t>(j)] += 1;
    }

  FingerprintTensor C(k, l, space_size);
  for (auto& [label, profile] : profiles) C.counts_[profile] += 1;
  const std::uint64_t seen = profiles.size();
  if (seen < space_size) C.counts_[std::vector<int>(k, 0)] += space_size - seen;

  // Construction invariants: total count is N; each sequence's weighted sum
  // of occurrences is l.
  std::uint64_t total = 0;
  std::vector<std::uint64_t> weighted(k, 0);
  for (const auto& [index, count] : C.counts_) {
    total += count;
    for (int j = 0; j < k; ++j) weighted[j] += static_cast<std::uint64_t>(index[j]) * count;
  }
  if (total != space_size) throw std::logic_error("fingerprint: counts do not sum to |Phi|");
  for (int j = 0; j < k; ++j)
    if (weighted[j] != l) throw std::logic_error("fingerprint: weighted sum != l");
  return C;
}

std::uint64_t FingerprintTensor::at(std::span<const int> index) const {
  if (index.size() != static_cast<std::size_t>(k_))
    throw std::invalid_argument("FingerprintTensor::at: index length != k");
  for (int v : index)
    if (v < 0 || static_cast<std::uint64_t>(v) > l_)
      throw std::out_of_range("FingerprintTensor::at: index entry outside [0, l]");
  const auto it = counts_.find(std::vector<int>(index.begin(), index.end()));
  return it == counts_.end() ? 0 : it->second;
}

bool FingerprintTensor::trivial() const {
  for (const auto& [index, count] : counts_) {
    if (count == 0) continue;
    long total = 0;
    for (int v : index) total += v;
    if (total > 1) return false;
  }
  return true;
}

std::string FingerprintTensor::to_json() const {
  nlohmann::json j;
  j["k"] = k_;
  j["l"] = l_;
  j["N"] = space_size_;
  nlohmann::json nz = nlohmann::json::array();
  for (const auto& [index, count] : counts_)
    if (count != 0) nz.push_back({index, count});
  j["nonzeros"] = std::move(nz);
  return j.dump();
}

FingerprintTensor fingerprint(std::span<const std::vector<std::uint64_t>> sequences,
                              std::uint64_t space_size) {
  return FingerprintTensor::from_sequences(sequences, space_size);
}

bool is_trivial_fingerprint(const FingerprintTensor& C) { return C.trivial(); }

bool birthday_bound_valid(std::uint64_t l, double epsilon) {
  return l >= 1 && epsilon > 0.0 && epsilon <= 1.0 &&
         static_cast<double>(l) <= 1.0 + 1.0 / (2.0 * epsilon);
}

double birthday_lower_bound(std::uint64_t l, double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("birthday_lower_bound: epsilon must lie in (0, 1]");
  if (!birthday_bound_valid(l, epsilon))
    throw std::out_of_range("birthday_lower_bound: requires 1 <= l <= 1 + 1/(2 eps); the bound "
                            "is not claimed outside this range");
  const double x = static_cast<double>(l) * static_cast<double>(l) * epsilon;
  return std::exp2(-x);
}

double fingerprint_triviality_bound(int k, std::uint64_t l, double epsilon, double a) {
  if (k < 1) throw std::invalid_argument("fingerprint_triviality_bound: k must be >= 1");
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw std::invalid_argument("fingerprint_triviality_bound: epsilon must lie in (0, 1]");
  if (!(a > 0.0)) throw std::invalid_argument("fingerprint_triviality_bound: a must be > 0");
  if (static_cast<double>(l) > a * std::pow(1.0 / epsilon, 0.25))
    throw std::out_of_range("fingerprint_triviality_bound: requires l <= a (1/eps)^{1/4}");
  if (!birthday_bound_valid(std::max<std::uint64_t>(1, k * l), epsilon))
    throw std::out_of_range("fingerprint_triviality_bound: requires k l <= 1 + 1/(2 eps)");
  const double ka = static_cast<double>(k) * a;
  return ka * ka * std::sqrt(epsilon);
}

Flatness flatness(const DiscreteDistribution& dist) {
  const double eps = dist.max_prob();
  return {eps, -std::log2(eps)};
}

double renyi_relative_entropy(std::span<const double> P, std::span<const double> Q, double t) {
  require_aligned(P, Q, "renyi_relative_entropy");
  if (!(t >= 0.0)) throw std::invalid_argument("renyi_relative_entropy: t must be >= 0");
  if (t == 1.0)
    throw std::invalid_argument("renyi_relative_entropy: t = 1 is the relative_entropy limit");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] == 0.0) continue;
    if (Q[i] == 0.0) return kInf;  // supp(P) not inside supp(Q)
    sum += std::pow(static_cast<long double>(P[i]), static_cast<long double>(t)) *
           std::pow(static_cast<long double>(Q[i]), static_cast<long double>(1.0 - t));
  }
  return static_cast<double>(std::log(sum) / (t - 1.0));
}

double relative_entropy(std::span<const double> P, std::span<const double> Q) {
  require_aligned(P, Q, "relative_entropy");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i] == 0.0) continue;
    if (Q[i] == 0.0) return kInf;
    sum += static_cast<long double>(P[i]) * std::log(static_cast<long double>(P[i]) / Q[i]);
  }
  return static_cast<double>(sum);
}

double one_norm_distance(std::span<const double> P, std::span<const double> Q) {
  require_aligned(P, Q, "one_norm_distance");
  long double sum = 0.0L;
  for (std::size_t i = 0; i < P.size(); ++i) sum += std::abs(P[i] - Q[i]);
  return static_cast<double>(sum);
}

double discrimination_error_bound(std::span<const double> P, std::span<const double> Q,
                                  std::uint64_t l, double alpha) {
  if (l < 1) throw std::invalid_argument("discrimination_error_bound: l must be >= 1");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("discrimination_error_bound: alpha must lie in (0, 1)");
  const double s = relative_entropy(P, Q);
  const double s32 = renyi_relative_entropy(P, Q, 1.5);
  if (!std::isfinite(s) || !std::isfinite(s32)) return kInf;
  const double fluct = 4.0 * std::sqrt(2.0) * std::log(1.0 / alpha) * (s32 / 2.0 + std::log(3.0));
  return -s + fluct / std::sqrt(static_cast<double>(l));
}

std::optional<std::uint64_t> min_samples_negative(std::span<const double> P,
                                                  std::span<const double> Q, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("min_samples_negative: alpha must lie in (0, 1)");
  const double s = relative_entropy(P, Q);
  const double s32 = renyi_relative_entropy(P, Q, 1.5);
  if (!std::isfinite(s) || !std::isfinite(s32) || s <= 0.0) return std::nullopt;
  const double fluct = 4.0 * std::sqrt(2.0) * std::log(1.0 / alpha) * (s32 / 2.0 + std::log(3.0));
  const double root = fluct / s;  // bound is <= 0 iff sqrt(l) >= root
  double l = std::ceil(root * root);
  if (!(l < 1e18)) return std::nullopt;  // not reachable at any practical sample count
  if (l < 1.0) l = 1.0;
  auto candidate = static_cast<std::uint64_t>(l);
  while (discrimination_error_bound(P, Q, candidate, alpha) > 0.0) ++candidate;  // rounding slack
  while (candidate > 1 && discrimination_error_bound(P, Q, candidate - 1, alpha) <= 0.0)
    --candidate;
  return candidate;
}

double discrimination_eta(std::span<const double> P, std::span<const double> Q) {
  const double s32 = renyi_relative_entropy(P, Q, 1.5);
  const double s12 = renyi_relative_entropy(P, Q, 0.5);
  if (!std::isfinite(s32)) return kInf;
  return 1.0 + std::exp(s32 / 2.0) + std::exp(-s12 / 2.0);
}

Hypothesis likelihood_ratio_test(std::span<const double> P, std::span<const double> Q,
                                 std::span<const std::uint64_t> samples) {
  require_aligned(P, Q, "likelihood_ratio_test");
  long double llr = 0.0L;
  bool impossible_under_p = false;
  bool impossible_under_q = false;
  for (std::uint64_t s : samples) {
    if (s >= P.size()) throw std::out_of_range("likelihood_ratio_test: sample index out of range");
    const double p = P[s];
    const double q = Q[s];
    if (p == 0.0 && q == 0.0)
      throw std::domain_error("likelihood_ratio_test: sample impossible under both hypotheses");
    if (p == 0.0) {
      impossible_under_p = true;
    } else if (q == 0.0) {
      impossible_under_q = true;
    } else {
      llr += std::log(static_cast<long double>(p) / q);
    }
  }
  if (impossible_under_p && impossible_under_q)
    throw std::domain_error("likelihood_ratio_test: samples rule out both hypotheses");
  if (impossible_under_p) return Hypothesis::Q;
  if (impossible_under_q) return Hypothesis::P;
  return llr > 0.0L ? Hypothesis::P : Hypothesis::Q;  // tie -> Q: do not certify
}

Decision reject_on_collision_policy(const FingerprintTensor& C) {
  return C.trivial() ? Decision::Accept : Decision::Reject;
}

Decision symmetric_certifier(std::span<const std::uint64_t> samples, std::uint64_t space_size,
                             const SymmetricPolicy& policy) {
  const std::vector<std::uint64_t> seq(samples.begin(), samples.end());
  const FingerprintTensor C = fingerprint(std::span(&seq, 1), space_size);
  return policy(C);
}

double renyi_relative_entropy(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                              double t) {
  require_same_space(P, Q, "renyi_relative_entropy");
  return renyi_relative_entropy(P.probs(), Q.probs(), t);
}

double relative_entropy(const DiscreteDistribution& P, const DiscreteDistribution& Q) {
  require_same_space(P, Q, "relative_entropy");
  return relative_entropy(P.probs(), Q.probs());
}

double one_norm_distance(const DiscreteDistribution& P, const DiscreteDistribution& Q) {
  require_same_space(P, Q, "one_norm_distance");
  return one_norm_distance(P.probs(), Q.probs());
}

double discrimination_error_bound(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                                  std::uint64_t l, double alpha) {
  require_same_space(P, Q, "discrimination_error_bound");
  return discrimination_error_bound(P.probs(), Q.probs(), l, alpha);
}

std::optional<std::uint64_t> min_samples_negative(const DiscreteDistribution& P,
                                                  const DiscreteDistribution& Q, double alpha) {
  require_same_space(P, Q, "min_samples_negative");
  return min_samples_negative(P.probs(), Q.probs(), alpha);
}

Hypothesis likelihood_ratio_test(const DiscreteDistribution& P, const DiscreteDistribution& Q,
                                 std::span<const std::uint64_t> samples) {
  require_same_space(P, Q, "likelihood_ratio_test");
  return likelihood_ratio_test(P.probs(), Q.probs(), samples);
}

}  // namespace bosonbench
