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

#include "bosonbench/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bosonbench/boson.hpp"
#include "bosonbench/certify.hpp"
#include "bosonbench/flatness.hpp"
#include "bosonbench/gaussian.hpp"
#include "bosonbench/linalg.hpp"
#include "bosonbench/parallel.hpp"
#include "bosonbench/rng.hpp"
#include "bosonbench/version.hpp"

namespace bosonbench {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Typed access to the flat key-value config. Every key an experiment reads
/// (or defaults) lands in resolved(); leftovers are schema errors.
class Params {
 public:
  explicit Params(const std::map<std::string, std::string>& raw) : raw_(raw) {}

  std::uint64_t u64(const std::string& key, std::uint64_t def, std::uint64_t lo = 0,
                    std::uint64_t hi = UINT64_MAX) {
    const auto v = fetch(key);
    std::uint64_t out = def;
    if (v) {
      try {
        out = std::stoull(*v);
      } catch (...) {
        bad(key, *v, "a non-negative integer");
      }
    }
    if (out < lo || out > hi) range(key, std::to_string(out));
    resolved_[key] = std::to_string(out);
    return out;
  }

  int integer(const std::string& key, int def, int lo, int hi) {
    const auto v = fetch(key);
    int out = def;
    if (v) {
      try {
        out = std::stoi(*v);
      } catch (...) {
        bad(key, *v, "an integer");
      }
    }
    if (out < lo || out > hi) range(key, std::to_string(out));
    resolved_[key] = std::to_string(out);
    return out;
  }

  double real(const std::string& key, double def, double lo = -kInf, double hi = kInf) {
    const auto v = fetch(key);
    double out = def;
    if (v) {
      try {
        std::size_t pos = 0;
        out = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("trailing junk");
      } catch (...) {
        bad(key, *v, "a real number");
      }
    }
    if (!(out >= lo) || !(out <= hi)) range(key, format_double(out));
    resolved_[key] = format_double(out);
    return out;
  }

  bool boolean(const std::string& key, bool def) {
    const auto v = fetch(key);
    bool out = def;
    if (v) {
      if (*v == "true" || *v == "1")
        out = true;
      else if (*v == "false" || *v == "0")
        out = false;
      else
        bad(key, *v, "true/false");
    }
    resolved_[key] = out ? "true" : "false";
    return out;
  }

  std::string str(const std::string& key, const std::string& def) {
    const auto v = fetch(key);
    const std::string out = v ? *v : def;
    resolved_[key] = out;
    return out;
  }

  std::optional<std::string> maybe_str(const std::string& key) {
    const auto v = fetch(key);
    if (v) resolved_[key] = *v;
    return v;
  }

  std::optional<std::uint64_t> maybe_u64(const std::string& key) {
    const auto v = fetch(key);
    if (!v) return std::nullopt;
    std::uint64_t out = 0;
    try {
      out = std::stoull(*v);
    } catch (...) {
      bad(key, *v, "a non-negative integer");
    }
    resolved_[key] = std::to_string(out);
    return out;
  }

  std::optional<double> maybe_real(const std::string& key) {
    const auto v = fetch(key);
    if (!v) return std::nullopt;
    double out = 0;
    try {
      out = std::stod(*v);
    } catch (...) {
      bad(key, *v, "a real number");
    }
    resolved_[key] = format_double(out);
    return out;
  }

  void reject_unknown() const {
    std::string offenders;
    for (const auto& [k, v] : raw_)
      if (!consumed_.count(k)) offenders += (offenders.empty() ? "" : ", ") + k;
    if (!offenders.empty())
      throw std::invalid_argument("config schema error: unknown keys for this experiment: " +
                                  offenders);
  }

  const std::map<std::string, std::string>& resolved() const { return resolved_; }

 private:
  std::optional<std::string> fetch(const std::string& key) {
    consumed_.insert(key);
    const auto it = raw_.find(key);
    if (it == raw_.end()) return std::nullopt;
    return it->second;
  }
  [[noreturn]] void bad(const std::string& key, const std::string& value,
                        const std::string& want) {
    throw std::invalid_argument("config schema error: key '" + key + "' = '" + value +
                                "' is not " + want);
  }
  [[noreturn]] void range(const std::string& key, const std::string& value) {
    throw std::invalid_argument("config schema error: key '" + key + "' = " + value +
                                " is outside the documented range");
  }

  const std::map<std::string, std::string>& raw_;
  std::set<std::string> consumed_;
  std::map<std::string, std::string> resolved_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Budget guard; budget <= 0 means unlimited.
class Budget {
 public:
  Budget(const Stopwatch& watch, double budget_seconds)
      : watch_(watch), budget_(budget_seconds) {}
  bool expired() const { return budget_ > 0.0 && watch_.seconds() >= budget_; }

 private:
  const Stopwatch& watch_;
  double budget_;
};

ExperimentRecord assemble(const std::string& experiment, Params& params,
                          std::vector<json> trials, json summary_fields, bool incomplete,
                          const Stopwatch& watch) {
  params.reject_unknown();
  ExperimentRecord record;
  record.config_echo = {{"type", "config"}, {"experiment", experiment}};
  record.config_echo["params"] = params.resolved();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    trials[i]["type"] = "trial";
    trials[i]["trial"] = i;
  }
  record.trials = std::move(trials);
  record.summary = std::move(summary_fields);
  record.summary["type"] = "summary";
  record.summary["version"] = kVersion;
  record.summary["incomplete"] = incomplete;
  record.summary["wall_clock_seconds"] = watch.seconds();
  record.incomplete = incomplete;
  record.validate();
  return record;
}

double binomial_se(double p_hat, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(trials));
}

ComplexMatrix hom_beamsplitter() {
  ComplexMatrix U(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  U << Complex(s, 0), Complex(s, 0), Complex(s, 0), Complex(-s, 0);
  return U;
}

ComplexMatrix load_or_draw_unitary(Params& p, int m, RngStream& stream) {
  const auto path = p.maybe_str("unitary");
  if (!path) return haar_unitary(m, stream);
  std::ifstream in(*path);
  if (!in) throw std::invalid_argument("config schema error: cannot open unitary file " + *path);
  std::stringstream buf;
  buf << in.rdbuf();
  const ComplexMatrix U = matrix_from_json(buf.str());
  if (U.rows() != m)
    throw std::invalid_argument("unitary file is " + std::to_string(U.rows()) + "x" +
                                std::to_string(U.cols()) + ", expected modes = " +
                                std::to_string(m));
  if (!is_unitary(U)) throw std::invalid_argument("unitary file entries are not unitary");
  return U;
}

std::string occupation_string(const std::vector<int>& occ) {
  std::string s;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(occ[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// hom

ExperimentRecord run_hom(Params& p, const Stopwatch& watch) {
  p.u64("seed", 12345);  // no randomness; kept so every record carries a seed
  p.real("budget_seconds", 0.0, 0.0, 1e9);  // single-shot: never interrupted
  const DiscreteDistribution dist = full_distribution(hom_beamsplitter(), 2, 2);
  auto uniform = uniform_distribution(dist.space_ptr());

  std::vector<json> trials;
  for (std::uint64_t i = 0; i < dist.size(); ++i)
    trials.push_back({{"outcome", dist.space().element(i).occ}, {"prob", dist.prob(i)}});

  json summary;
  summary["m"] = 2;
  summary["n"] = 2;
  const std::vector<int> s11{1, 1}, s20{2, 0}, s02{0, 2};
  summary["pr_11"] = dist.prob(dist.space().index_of(s11));
  summary["pr_20"] = dist.prob(dist.space().index_of(s20));
  summary["pr_02"] = dist.prob(dist.space().index_of(s02));
  summary["one_norm_to_uniform"] = one_norm_distance(dist, uniform);
  summary["flatness_epsilon"] = flatness(dist).epsilon;
  return assemble("hom", p, std::move(trials), std::move(summary), false, watch);
}

// ---------------------------------------------------------------------------
// distribution

ExperimentRecord run_distribution(Params& p, const Stopwatch& watch) {
  const std::uint64_t seed = p.u64("seed", 12345);
  const int m = p.integer("modes", 4, 1, 1000);
  const int n = p.integer("photons", 2, 1, 30);
  const bool restricted = p.boolean("restricted", false);
  const std::uint64_t cap = p.u64("cap", kDefaultEnumerationCap, 1);
  p.real("budget_seconds", 0.0, 0.0, 1e9);  // single-shot

  RngStream root(seed);
  RngStream setup = root.derive(0);
  const ComplexMatrix U = load_or_draw_unitary(p, m, setup);
  const DiscreteDistribution dist = restricted ? postselected_distribution(U, m, n, cap)
                                               : full_distribution(U, m, n, cap);

  json summary;
  summary["m"] = m;
  summary["n"] = n;
  summary["restricted"] = restricted;
  summary["probs"] = std::vector<double>(dist.probs().begin(), dist.probs().end());
  const Flatness flat = flatness(dist);
  summary["flatness_epsilon"] = flat.epsilon;
  summary["min_entropy_bits"] = flat.min_entropy_bits;
  if (n <= m) summary["collision_free_fraction"] = collision_free_fraction(U, m, n, cap);

  ExperimentRecord record = assemble("distribution", p, {}, std::move(summary), false, watch);

  // CSV variant: one row per outcome with the occupation vector spelled out.
  std::string csv = "index,occupation,prob\n";
  for (std::uint64_t i = 0; i < dist.size(); ++i)
    csv += std::to_string(i) + ",\"" + occupation_string(dist.space().element(i).occ) + "\"," +
           format_double(dist.prob(i)) + "\n";
  record.summary["csv_body"] = std::move(csv);
  return record;
}

// ---------------------------------------------------------------------------
// flatness

ExperimentRecord run_flatness(Params& p, const Stopwatch& watch) {
  const std::uint64_t seed = p.u64("seed", 12345);
  const int m = p.integer("modes", 64, 1, 1000);
  const int n = p.integer("photons", 4, 1, 20);
  const std::uint64_t trials = p.u64("trials", 20, 1, 100000);
  const bool restricted = p.boolean("restricted", true);
  const double threshold = p.real("threshold", std::exp(-2.0 * n), 0.0, 1.0);
  const std::uint64_t cap = p.u64("cap", kDefaultEnumerationCap, 1);
  const double budget = p.real("budget_seconds", 0.0, 0.0, 1e9);
  const Budget guard(watch, budget);

  RngStream root(seed);
  RngStream trial_base = root.derive(1);

  std::vector<json> lines;
  std::uint64_t exceed = 0;
  bool incomplete = false;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (guard.expired()) {
      incomplete = true;
      break;
    }
    RngStream ts = trial_base.derive(t);
    const FlatnessReport rep = empirical_flatness(m, n, 1, restricted, threshold, ts, cap);
    const auto& tr = rep.trials[0];
    if (tr.max_prob >= threshold) ++exceed;
    lines.push_back({{"max_prob", tr.max_prob},
                     {"argmax", tr.argmax},
                     {"below_threshold", tr.max_prob < threshold}});
  }

  json summary;
  summary["m"] = m;
  summary["n"] = n;
  summary["restricted"] = restricted;
  summary["threshold"] = threshold;
  summary["trials_completed"] = lines.size();
  summary["exceedance_fraction"] =
      lines.empty() ? 0.0 : static_cast<double>(exceed) / lines.size();
  const TheoremBound b5 = theorem_bound_evaluator(n, m, threshold, TheoremBoundVariant::Thm5Chain);
  const TheoremBound b6 = theorem_bound_evaluator(n, m, threshold, TheoremBoundVariant::Thm6Markov);
  summary["thm5_chain"] = {{"value", b5.value},
                           {"vacuous", b5.vacuous},
                           {"haar_factor_excluded", b5.haar_factor_excluded}};
  summary["thm6_markov"] = {{"value", b6.value},
                            {"vacuous", b6.vacuous},
                            {"haar_factor_excluded", b6.haar_factor_excluded}};
  return assemble("flatness", p, std::move(lines), std::move(summary), incomplete, watch);
}

// ---------------------------------------------------------------------------
// moments

ExperimentRecord run_moments(Params& p, const Stopwatch& watch) {
  const std::uint64_t seed = p.u64("seed", 12345);
  const int n = p.integer("photons", 3, 1, 8);
  const int m = p.integer("modes", 20, 1, 1000000);
  const int order = p.integer("order", 2, 2, 4);
  if (order != 2 && order != 4)
    throw std::invalid_argument("config schema error: order must be 2 or 4");
  const std::uint64_t trials = p.u64("trials", 100000, 1000, 100000000);
  p.real("budget_seconds", 0.0, 0.0, 1e9);  // single MC pass

  RngStream root(seed);
  const MomentEstimate est = permanent_moment_mc(n, m, order, trials, root);

  std::vector<json> lines;
  lines.push_back({{"mc_mean", est.mc_mean},
                   {"mc_standard_error", est.mc_standard_error},
                   {"median_of_means", est.median_of_means}});

  json summary;
  summary["n"] = n;
  summary["m"] = m;
  summary["order"] = order;
  summary["trials"] = est.trials;
  summary["mc_mean"] = est.mc_mean;
  summary["mc_standard_error"] = est.mc_standard_error;
  summary["median_of_means"] = est.median_of_means;
  summary["closed_form"] = est.closed_form;
  summary["z_score"] = est.mc_standard_error > 0.0
                           ? (est.mc_mean - est.closed_form) / est.mc_standard_error
                           : 0.0;
  return assemble("moments", p, std::move(lines), std::move(summary), false, watch);
}

// ---------------------------------------------------------------------------
// fingerprint

ExperimentRecord run_fingerprint(Params& p, const Stopwatch& watch) {
  const std::uint64_t seed = p.u64("seed", 12345);
  const std::string source = p.str("source", "uniform");
  const int k = p.integer("k", 2, 1, 16);
  const std::uint64_t l = p.u64("samples", 10, 0, 1000000);
  const std::uint64_t trials = p.u64("trials", 10000, 1, 10000000);
  const double budget = p.real("budget_seconds", 0.0, 0.0, 1e9);
  const Budget guard(watch, budget);

  std::uint64_t space_size = 0;
  double epsilon = 0.0;
  std::optional<DiscreteDistribution> boson;
  RngStream root(seed);
  if (source == "uniform") {
    space_size = p.u64("space_size", 1000000, 1);
    epsilon = 1.0 / static_cast<double>(space_size);
  } else if (source == "boson") {
    const int m = p.integer("modes", 32, 1, 1000);
    const int n = p.integer("photons", 4, 1, 30);
    const std::uint64_t cap = p.u64("cap", kDefaultEnumerationCap, 1);
    RngStream setup = root.derive(0);
    boson = postselected_distribution(load_or_draw_unitary(p, m, setup), m, n, cap);
    space_size = boson->size();
    epsilon = flatness(*boson).epsilon;
  } else {
    throw std::invalid_argument("config schema error: source must be uniform or boson");
  }

  const double tight_a = static_cast<double>(l) * std::pow(epsilon, 0.25);
  const double a = p.real("a", tight_a > 0.0 ? tight_a : 1.0, 0.0, 1e9);

  double bound = -1.0;
  bool bound_valid = true;
  try {
    bound = fingerprint_triviality_bound(k, l, epsilon, a);
  } catch (const std::out_of_range&) {
    bound_valid = false;
  }

  std::optional<AliasTable> table;
  if (boson) table.emplace(boson->probs());

  RngStream trial_base = root.derive(1);
  std::vector<json> lines;
  std::uint64_t nontrivial = 0;
  std::string example_fingerprint;
  bool incomplete = false;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (guard.expired()) {
      incomplete = true;
      break;
    }
    RngStream ts = trial_base.derive(t);
    std::vector<std::vector<std::uint64_t>> sequences(k);
    for (int j = 0; j < k; ++j) {
      sequences[j].resize(l);
      for (auto& s : sequences[j])
        s = table ? table->sample(ts) : ts.uniform_below(space_size);
    }
    const FingerprintTensor C = fingerprint(sequences, space_size);
    const bool trivial = C.trivial();
    if (!trivial) ++nontrivial;
    if (t == 0) example_fingerprint = C.to_json();
    lines.push_back({{"trivial", trivial}});
  }

  const double freq = lines.empty() ? 0.0 : static_cast<double>(nontrivial) / lines.size();
  json summary;
  summary["source"] = source;
  summary["N"] = space_size;
  summary["k"] = k;
  summary["l"] = l;
  summary["epsilon"] = epsilon;
  summary["a"] = a;
  summary["trials_completed"] = lines.size();
  summary["nontrivial_frequency"] = freq;
  summary["nontrivial_se"] = binomial_se(freq, lines.size());
  summary["lemma3_bound"] = bound_valid ? json_real(bound) : json();
  summary["lemma3_bound_valid"] = bound_valid;
  summary["first_trial_fingerprint"] = json::parse(example_fingerprint.empty()
                                                       ? std::string("null")
                                                       : example_fingerprint);
  return assemble("fingerprint", p, std::move(lines), std::move(summary), incomplete, watch);
}

// ---------------------------------------------------------------------------
// birthday

ExperimentRecord run_birthday(Params& p, const Stopwatch& watch) {
  const std::uint64_t seed = p.u64("seed", 12345);
  const std::uint64_t space_size = p.u64("space_size", 10000, 1);
  const std::uint64_t l = p.u64("samples", 20, 1, 10000000);
  const std::uint64_t trials = p.u64("trials", 100000, 1, 1000000000);
  const double epsilon = p.real("epsilon", 1.0 / static_cast<double>(space_size), 0.0, 1.0);
  const double budget = p.real("budget_seconds", 0.0, 0.0, 1e9);
  const Budget guard(watch, budget);

  RngStream trial_base = RngStream(seed).derive(1);
  std::uint64_t all_distinct = 0;
  std::uint64_t completed = 0;
  bool incomplete = false;
  std::vector<std::uint64_t> scratch;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if ((t & 1023) == 0 && guard.expired()) {
      incomplete = true;
      break;
    }
    RngStream ts = trial_base.derive(t);
    scratch.clear();
    for (std::uint64_t i = 0; i < l; ++i) scratch.push_back(ts.uniform_below(space_size));
    std::sort(scratch.begin(), scratch.end());
    all_distinct += std::adjacent_find(scratch.begin(), scratch.end()) == scratch.end() ? 1 : 0;
    ++completed;
  }

  const double freq = completed ? static_cast<double>(all_distinct) / completed : 0.0;
  const bool valid = birthday_bound_valid(l, epsilon);
  json summary;
  summary["N"] = space_size;
  summary["l"] = l;
  summary["epsilon"] = epsilon;
  summary["trials_completed"] = completed;
  summary["all_distinct_frequency"] = freq;
  summary["all_distinct_se"] = binomial_se(freq, completed);
  summary["bound"] = valid ? json_real(birthday_lower_bound(l, epsilon)) : json();
  summary["bound_valid"] = valid;
  return assemble("birthday", p, {}, std::move(summary), incomplete, watch);
}

// ---------------------------------------------------------------------------
// discriminate

ExperimentRecord run_discriminate(Params& p, const Stopwatch& watch) {
  const std::uint64_t seed = p.u64("seed", 12345);
  const int m = p.integer("modes", 27, 1, 1000);
  const int n = p.integer("photons", 3, 1, 30);
  const bool restricted = p.boolean("restricted", true);
  const double alpha = p.real("alpha", 1.0 / 3.0, 1e-9, 0.999999);
  const std::uint64_t trials = p.u64("trials", 1000, 1, 10000000);
  const std::uint64_t cap = p.u64("cap", kDefaultEnumerationCap, 1);
  const double budget = p.real("budget_seconds", 0.0, 0.0, 1e9);
  const Budget guard(watch, budget);

  RngStream root(seed);
  RngStream setup = root.derive(0);
  const ComplexMatrix U = load_or_draw_unitary(p, m, setup);
  const DiscreteDistribution P = restricted ? postselected_distribution(U, m, n, cap)
                                            : full_distribution(U, m, n, cap);
  const DiscreteDistribution Q = uniform_distribution(P.space_ptr());

  const auto l_star = min_samples_negative(P, Q, alpha);
  const std::uint64_t default_l =
      l_star ? std::min<std::uint64_t>(*l_star, 500) : 500;
  const std::uint64_t l = p.u64("samples", default_l, 1, 10000000);

  const AliasTable table_p(P.probs());
  const AliasTable table_q(Q.probs());
  RngStream trial_base = root.derive(1);

  std::vector<json> lines;
  std::uint64_t type1 = 0, type2 = 0;
  bool incomplete = false;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (guard.expired()) {
      incomplete = true;
      break;
    }
    RngStream ts = trial_base.derive(t);
    std::vector<std::uint64_t> from_p(l), from_q(l);
    for (auto& s : from_p) s = table_p.sample(ts);
    for (auto& s : from_q) s = table_q.sample(ts);
    const Hypothesis d_p = likelihood_ratio_test(P, Q, from_p);
    const Hypothesis d_q = likelihood_ratio_test(P, Q, from_q);
    if (d_p == Hypothesis::Q) ++type1;
    if (d_q == Hypothesis::P) ++type2;
    lines.push_back({{"decision_p_true", d_p == Hypothesis::P ? "P" : "Q"},
                     {"decision_q_true", d_q == Hypothesis::P ? "P" : "Q"}});
  }

  HypothesisTestReport report;
  report.l = l;
  report.alpha = alpha;
  report.type1_frequency = lines.empty() ? 0.0 : static_cast<double>(type1) / lines.size();
  report.type2_frequency = lines.empty() ? 0.0 : static_cast<double>(type2) / lines.size();
  report.bound_log_beta_per_sample = discrimination_error_bound(P, Q, l, alpha);
  report.eta = discrimination_eta(P.probs(), Q.probs());

  json summary;
  summary["m"] = m;
  summary["n"] = n;
  summary["restricted"] = restricted;
  summary["N"] = P.size();
  summary["alpha"] = alpha;
  summary["l"] = l;
  summary["l_star"] = l_star ? json(*l_star) : json();
  summary["trials_completed"] = lines.size();
  summary["type1_frequency"] = report.type1_frequency;
  summary["type2_frequency"] = report.type2_frequency;
  summary["bound_log_beta_per_sample"] = json_real(report.bound_log_beta_per_sample);
  summary["eta"] = json_real(report.eta);
  summary["relative_entropy"] = json_real(relative_entropy(P, Q));
  summary["renyi_3_2"] = json_real(renyi_relative_entropy(P, Q, 1.5));
  summary["renyi_2"] = json_real(renyi_relative_entropy(P, Q, 2.0));
  summary["flatness_epsilon"] = flatness(P).epsilon;
  return assemble("discriminate", p, std::move(lines), std::move(summary), incomplete, watch);
}

// ---------------------------------------------------------------------------
// indistinguishability

ExperimentRecord run_indistinguishability(Params& p, const Stopwatch& watch) {
  const std::uint64_t seed = p.u64("seed", 12345);
  const int m = p.integer("modes", 32, 1, 1000);
  const int n = p.integer("photons", 4, 1, 30);
  const std::uint64_t l = p.u64("samples", 15, 1, 1000000);
  const std::uint64_t trials = p.u64("trials", 1000, 1, 10000000);
  const double alpha = p.real("alpha", 1.0 / 3.0, 1e-9, 0.999999);
  const bool control = p.boolean("control", false);
  const std::uint64_t cap = p.u64("cap", kDefaultEnumerationCap, 1);
  const double budget = p.real("budget_seconds", 0.0, 0.0, 1e9);
  const Budget guard(watch, budget);

  RngStream root(seed);
  RngStream setup = root.derive(0);
  const ComplexMatrix U = load_or_draw_unitary(p, m, setup);
  const DiscreteDistribution P = postselected_distribution(U, m, n, cap);
  const DiscreteDistribution Q = uniform_distribution(P.space_ptr());
  const std::uint64_t N = P.size();

  const double eps = flatness(P).epsilon;
  const double a = static_cast<double>(l) * std::pow(eps, 0.25);
  double lemma3 = -1.0;
  bool lemma3_valid = true;
  try {
    lemma3 = fingerprint_triviality_bound(1, l, eps, a);
  } catch (const std::out_of_range&) {
    lemma3_valid = false;
  }

  const auto l_star = min_samples_negative(P, Q, alpha);
  const std::uint64_t lr_l =
      p.u64("lr_samples", l_star ? std::min<std::uint64_t>(*l_star, 500) : 500, 1, 10000000);

  const AliasTable table_p(P.probs());
  const AliasTable table_q(Q.probs());
  // The boson-side sampler; the control run feeds the certifiers uniform
  // samples on both arms.
  const AliasTable& source = control ? table_q : table_p;

  RngStream trial_base = root.derive(1);
  std::vector<json> lines;
  std::uint64_t accept_boson = 0, accept_unif = 0;
  std::uint64_t lr_type1 = 0, lr_type2 = 0;
  std::uint64_t lr_type1_at_l = 0, lr_type2_at_l = 0;
  bool incomplete = false;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (guard.expired()) {
      incomplete = true;
      break;
    }
    RngStream ts = trial_base.derive(t);
    std::vector<std::uint64_t> s_boson(l), s_unif(l);
    for (auto& s : s_boson) s = source.sample(ts);
    for (auto& s : s_unif) s = table_q.sample(ts);

    const Decision d_boson = symmetric_certifier(s_boson, N);
    const Decision d_unif = symmetric_certifier(s_unif, N);
    if (d_boson == Decision::Accept) ++accept_boson;
    if (d_unif == Decision::Accept) ++accept_unif;

    // State-discrimination certifier on the same data...
    if (likelihood_ratio_test(P, Q, s_boson) == Hypothesis::Q) ++lr_type1_at_l;
    if (likelihood_ratio_test(P, Q, s_unif) == Hypothesis::P) ++lr_type2_at_l;

    // ...and at its own sample count.
    std::vector<std::uint64_t> lr_boson(lr_l), lr_unif(lr_l);
    for (auto& s : lr_boson) s = source.sample(ts);
    for (auto& s : lr_unif) s = table_q.sample(ts);
    if (likelihood_ratio_test(P, Q, lr_boson) == Hypothesis::Q) ++lr_type1;
    if (likelihood_ratio_test(P, Q, lr_unif) == Hypothesis::P) ++lr_type2;

    lines.push_back({{"symmetric_accept_boson", d_boson == Decision::Accept},
                     {"symmetric_accept_uniform", d_unif == Decision::Accept}});
  }

  const auto freq = [&](std::uint64_t c) {
    return lines.empty() ? 0.0 : static_cast<double>(c) / lines.size();
  };
  const double f_boson = freq(accept_boson);
  const double f_unif = freq(accept_unif);
  const double gap = std::abs(f_boson - f_unif);
  const double gap_se = std::sqrt(binomial_se(f_boson, lines.size()) * binomial_se(f_boson, lines.size()) +
                                  binomial_se(f_unif, lines.size()) * binomial_se(f_unif, lines.size()));

  json summary;
  summary["m"] = m;
  summary["n"] = n;
  summary["N"] = N;
  summary["control"] = control;
  summary["l"] = l;
  summary["trials_completed"] = lines.size();
  summary["flatness_epsilon"] = eps;
  summary["min_entropy_bits"] = -std::log2(eps);
  summary["symmetric_accept_frequency_boson"] = f_boson;
  summary["symmetric_accept_frequency_uniform"] = f_unif;
  summary["symmetric_gap"] = gap;
  summary["symmetric_gap_se"] = gap_se;
  summary["lemma3_bound"] = lemma3_valid ? json_real(lemma3) : json();
  summary["lemma3_bound_valid"] = lemma3_valid;
  summary["lemma3_a"] = a;
  summary["alpha"] = alpha;
  summary["l_star"] = l_star ? json(*l_star) : json();
  summary["lr_samples"] = lr_l;
  summary["lr_type1_frequency"] = freq(lr_type1);
  summary["lr_type2_frequency"] = freq(lr_type2);
  summary["lr_type1_frequency_at_l"] = freq(lr_type1_at_l);
  summary["lr_type2_frequency_at_l"] = freq(lr_type2_at_l);
  summary["relative_entropy"] = json_real(relative_entropy(P, Q));
  summary["renyi_3_2"] = json_real(renyi_relative_entropy(P, Q, 1.5));
  summary["eta"] = json_real(discrimination_eta(P.probs(), Q.probs()));
  return assemble("indistinguishability", p, std::move(lines), std::move(summary), incomplete,
                  watch);
}

// ---------------------------------------------------------------------------
// gaussian-sim

GaussianState input_from_json(const json& spec, int m) {
  const std::string type = spec.value("type", "vacuum");
  if (type == "vacuum") return vacuum_state(m);
  if (type == "coherent") {
    std::vector<std::pair<double, double>> disp;
    for (const auto& d : spec.at("displacements"))
      disp.emplace_back(d.at(0).get<double>(), d.at(1).get<double>());
    if (static_cast<int>(disp.size()) != m)
      throw std::invalid_argument("circuit: displacements length != m");
    return coherent_state(disp);
  }
  if (type == "squeezed") {
    const auto s = spec.at("squeezing").get<std::vector<double>>();
    if (static_cast<int>(s.size()) != m)
      throw std::invalid_argument("circuit: squeezing length != m");
    return squeezed_state(s);
  }
  throw std::invalid_argument("circuit: unknown input type " + type);
}

GaussianChannel channel_from_json(const json& spec, int m) {
  std::optional<GaussianChannel> channel;
  if (spec.contains("unitary")) {
    const ComplexMatrix U = matrix_from_json(spec.at("unitary").dump());
    if (U.rows() != m) throw std::invalid_argument("circuit: unitary dimension != m");
    channel = passive_network_channel(U);
  }
  if (spec.contains("loss")) {
    const GaussianChannel loss = lossy_channel(spec.at("loss").get<double>(), m);
    channel = channel ? compose(*channel, loss) : loss;
  }
  if (spec.contains("X")) {
    const auto as_matrix = [&](const json& rows) {
      Eigen::MatrixXd M(rows.size(), rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows.size(); ++c) M(r, c) = rows[r][c].get<double>();
      return M;
    };
    Eigen::VectorXd d = Eigen::VectorXd::Zero(2 * m);
    if (spec.contains("d")) {
      const auto dv = spec.at("d").get<std::vector<double>>();
      if (static_cast<int>(dv.size()) != 2 * m)
        throw std::invalid_argument("circuit: d length != 2m");
      for (int i = 0; i < 2 * m; ++i) d(i) = dv[i];
    }
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    if (spec.contains("Y")) Y = as_matrix(spec.at("Y"));
    channel = GaussianChannel(as_matrix(spec.at("X")), Y, d);
  }
  if (!channel) channel = passive_network_channel(ComplexMatrix::Identity(m, m));
  return *channel;
}

ExperimentRecord run_gaussian_sim(Params& p, const Stopwatch& watch) {
  const std::uint64_t seed = p.u64("seed", 12345);
  const std::uint64_t samples = p.u64("samples", 1000000, 1, 100000000);
  const std::string format = p.str("format", "json");
  p.real("budget_seconds", 0.0, 0.0, 1e9);  // single-shot

  int m = 0;
  std::optional<GaussianState> input;
  std::optional<GaussianChannel> channel;
  double radius = 1.6;
  if (const auto circuit_path = p.maybe_str("circuit")) {
    std::ifstream in(*circuit_path);
    if (!in)
      throw std::invalid_argument("config schema error: cannot open circuit file " +
                                  *circuit_path);
    const json circuit = json::parse(in);
    m = circuit.at("m").get<int>();
    if (m < 1) throw std::invalid_argument("circuit: m must be >= 1");
    input = input_from_json(circuit.value("input", json{{"type", "vacuum"}}), m);
    channel = channel_from_json(circuit.value("channel", json::object()), m);
    radius = circuit.value("detector", json::object()).value("R", 1.6);
  } else {
    m = p.integer("modes", 1, 1, 64);
    radius = p.real("radius", 1.6, 1e-9, 1e9);
    const std::string input_type = p.str("input", "vacuum");
    if (input_type == "vacuum") {
      input = vacuum_state(m);
    } else if (input_type == "coherent") {
      const double re = p.real("amplitude_re", 1.0);
      const double im = p.real("amplitude_im", 0.0);
      input = coherent_state(std::vector<std::pair<double, double>>(m, {re, im}));
    } else {
      throw std::invalid_argument(
          "config schema error: input must be vacuum or coherent (use a circuit file for more)");
    }
    const auto loss = p.maybe_real("loss");
    channel = loss ? compose(passive_network_channel(ComplexMatrix::Identity(m, m)),
                             lossy_channel(*loss, m))
                   : passive_network_channel(ComplexMatrix::Identity(m, m));
  }

  const BucketDetector detector{radius};
  RngStream root(seed);
  RngStream sampler = root.derive(1);
  const GaussianState output = apply_channel(*input, *channel);

  std::vector<std::uint64_t> clicks(m, 0);
  std::map<std::string, std::uint64_t> pattern_counts;
  std::vector<std::string> raw_patterns;
  const bool keep_raw = format == "csv";
  if (keep_raw && samples > 100000)
    throw std::invalid_argument(
        "config schema error: csv raw-pattern output is capped at 100000 samples; use json "
        "pattern counts for larger runs");

  for (std::uint64_t i = 0; i < samples; ++i) {
    const auto bits = bucket_detect(sample_phase_point(output, sampler), detector);
    std::string key;
    key.reserve(bits.size());
    for (int j = 0; j < m; ++j) {
      clicks[j] += bits[j];
      key += static_cast<char>('0' + bits[j]);
    }
    if (m <= 16) pattern_counts[key] += 1;
    if (keep_raw) raw_patterns.push_back(key);
  }

  json summary;
  summary["m"] = m;
  summary["samples"] = samples;
  summary["radius"] = radius;
  json rates = json::array();
  for (int j = 0; j < m; ++j) {
    const double rate = static_cast<double>(clicks[j]) / samples;
    rates.push_back({{"mode", j},
                     {"click_rate", rate},
                     {"se", binomial_se(rate, samples)}});
  }
  summary["per_mode"] = std::move(rates);
  if (m <= 16) {
    json counts = json::object();
    for (const auto& [k, v] : pattern_counts) counts[k] = v;
    summary["pattern_counts"] = std::move(counts);
  }
  if (keep_raw) {
    std::string body = "pattern\n";
    for (const auto& s : raw_patterns) body += s + "\n";
    summary["csv_body"] = std::move(body);
  }
  return assemble("gaussian-sim", p, {}, std::move(summary), false, watch);
}

// ---------------------------------------------------------------------------
// bounds

ExperimentRecord run_bounds(Params& p, const Stopwatch& watch) {
  const std::uint64_t seed = p.u64("seed", 12345);
  const int n = p.integer("photons", 3, 1, 20);
  const std::uint64_t m = p.u64("modes", 243, 1);
  const double epsilon = p.real("epsilon", std::exp(-2.0 * n), 0.0, kInf);
  const std::uint64_t pinsker_trials = p.u64("trials", 10000, 1, 100000000);
  p.real("budget_seconds", 0.0, 0.0, 1e9);  // single-shot

  std::vector<json> lines;

  // |Phi_{m,n}| <= (2(c+1)e)^n n^{(nu-1)n} whenever m <= c n^nu.
  {
    bool ok = true;
    double worst = kInf;
    for (int c = 1; c <= 3 && ok; ++c)
      for (int nu = 1; nu <= 3 && ok; ++nu)
        for (int nn = 1; nn <= 6 && ok; ++nn) {
          const auto mm = static_cast<std::uint64_t>(
              c * std::pow(static_cast<double>(nn), static_cast<double>(nu)));
          if (mm < 1) continue;
          const std::uint64_t lhs = sample_space_size(static_cast<int>(mm), nn, false);
          const long double rhs =
              std::pow(2.0L * (c + 1) * std::numbers::e_v<long double>, nn) *
              std::pow(static_cast<long double>(nn), static_cast<long double>((nu - 1) * nn));
          ok = static_cast<long double>(lhs) <= rhs;
          worst = std::min(worst, static_cast<double>(rhs / lhs));
        }
    lines.push_back({{"name", "phi_size_bound"}, {"ok", ok}, {"min_slack_ratio", worst}});
  }

  // n! <= e^{1-n} n^{n+1/2} for n <= 20.
  {
    bool ok = true;
    double worst = kInf;
    long double fact = 1.0L;
    for (int nn = 1; nn <= 20; ++nn) {
      fact *= nn;
      const long double rhs = std::exp(1.0L - nn) * std::pow(static_cast<long double>(nn),
                                                             nn + 0.5L);
      ok = ok && fact <= rhs;
      worst = std::min(worst, static_cast<double>(rhs / fact));
    }
    lines.push_back({{"name", "stirling_variant"}, {"ok", ok}, {"min_slack_ratio", worst}});
  }

  // erfc(x) <= e^{-x^2} on [0, 10].
  {
    bool ok = true;
    for (double x = 0.0; x <= 10.0; x += 0.01)
      ok = ok && std::erfc(x) <= std::exp(-x * x) + 1e-15;
    lines.push_back({{"name", "erfc_bound"}, {"ok", ok}});
  }

  // Pinsker on random distribution pairs.
  {
    RngStream rng = RngStream(seed).derive(7);
    bool ok = true;
    double min_margin = kInf;
    for (std::uint64_t t = 0; t < pinsker_trials; ++t) {
      const int size = 2 + static_cast<int>(rng.uniform_below(15));
      std::vector<double> P(size), Q(size);
      double sp = 0, sq = 0;
      for (int i = 0; i < size; ++i) {
        P[i] = rng.next_double() + 1e-12;
        Q[i] = rng.next_double() + 1e-12;
        sp += P[i];
        sq += Q[i];
      }
      for (int i = 0; i < size; ++i) {
        P[i] /= sp;
        Q[i] /= sq;
      }
      const double s = relative_entropy(P, Q);
      const double d1 = one_norm_distance(P, Q);
      const double margin = s - 0.5 * d1 * d1;
      ok = ok && margin >= -1e-12;
      min_margin = std::min(min_margin, margin);
    }
    lines.push_back({{"name", "pinsker"},
                     {"ok", ok},
                     {"trials", pinsker_trials},
                     {"min_margin", min_margin}});
  }

  const TheoremBound b5 = theorem_bound_evaluator(n, m, epsilon, TheoremBoundVariant::Thm5Chain);
  const TheoremBound b6 = theorem_bound_evaluator(n, m, epsilon, TheoremBoundVariant::Thm6Markov);

  bool all_ok = true;
  for (const auto& line : lines) all_ok = all_ok && line.at("ok").get<bool>();

  json summary;
  summary["n"] = n;
  summary["m"] = m;
  summary["epsilon"] = epsilon;
  summary["all_inequalities_hold"] = all_ok;
  summary["thm5_chain"] = {{"value", b5.value},
                           {"vacuous", b5.vacuous},
                           {"haar_factor_excluded", b5.haar_factor_excluded}};
  summary["thm6_markov"] = {{"value", b6.value},
                            {"vacuous", b6.vacuous},
                            {"haar_factor_excluded", b6.haar_factor_excluded}};
  return assemble("bounds", p, std::move(lines), std::move(summary), false, watch);
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "hom",      "distribution", "flatness",     "moments",      "fingerprint",
      "birthday", "discriminate", "indistinguishability", "gaussian-sim", "bounds"};
  return names;
}

std::map<std::string, std::string> ExperimentConfig::parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config file " + path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config file " + path + ":" + std::to_string(lineno) +
                                  ": empty key");
    out[key] = value;
  }
  return out;
}

ExperimentConfig ExperimentConfig::from_echo(const json& echo) {
  ExperimentConfig cfg;
  cfg.experiment = echo.at("experiment").get<std::string>();
  for (const auto& [k, v] : echo.at("params").items()) cfg.params[k] = v.get<std::string>();
  return cfg;
}

std::string ExperimentRecord::to_jsonl() const {
  std::string out = config_echo.dump() + "\n";
  for (const auto& t : trials) out += t.dump() + "\n";
  out += summary.dump() + "\n";
  return out;
}

std::string ExperimentRecord::to_csv() const {
  if (summary.contains("csv_body")) return summary.at("csv_body").get<std::string>();
  std::string out;
  if (!trials.empty()) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : trials.front().items())
      if (!v.is_array() && !v.is_object()) keys.push_back(k);
    for (std::size_t i = 0; i < keys.size(); ++i) out += (i ? "," : "") + keys[i];
    out += "\n";
    for (const auto& t : trials) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        if (i) out += ",";
        const auto it = t.find(keys[i]);
        if (it != t.end()) out += it->is_string() ? it->get<std::string>() : it->dump();
      }
      out += "\n";
    }
  }
  json tail = summary;
  tail.erase("csv_body");
  out += "# summary " + tail.dump() + "\n";
  return out;
}

void ExperimentRecord::validate() const {
  const auto fail = [](const std::string& why) {
    throw std::runtime_error("record schema violation: " + why);
  };
  if (config_echo.value("type", "") != "config") fail("first line must be the config echo");
  if (!config_echo.contains("experiment") || !config_echo.contains("params"))
    fail("config echo must carry experiment and params");
  if (!config_echo.at("params").contains("seed")) fail("config echo must carry a seed");
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].value("type", "") != "trial") fail("trial line without type=trial");
    if (trials[i].value("trial", static_cast<std::uint64_t>(i) + 1) != i)
      fail("trial indices must be 0..T-1 in order");
  }
  if (summary.value("type", "") != "summary") fail("last line must be the summary");
  for (const char* key : {"version", "incomplete", "wall_clock_seconds"})
    if (!summary.contains(key)) fail(std::string("summary missing ") + key);
  if (summary.at("incomplete").get<bool>() != incomplete) fail("incomplete flag mismatch");
}

void ExperimentRecord::write_atomic(const std::string& path, const std::string& format) const {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << (format == "csv" ? to_csv() : to_jsonl());
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

json json_real(double value) {
  if (std::isfinite(value)) return value;
  if (std::isnan(value)) return "nan";
  return value > 0 ? "inf" : "-inf";
}

ExperimentRecord run(const ExperimentConfig& config) {
  const Stopwatch watch;
  Params p(config.params);
  const std::string out = p.str("out", "");
  const std::string format = p.str("format", "json");
  if (format != "json" && format != "csv")
    throw std::invalid_argument("config schema error: format must be json or csv");

  const auto dispatch = [&]() -> ExperimentRecord {
    const std::string& name = config.experiment;
    if (name == "hom") return run_hom(p, watch);
    if (name == "distribution") return run_distribution(p, watch);
    if (name == "flatness") return run_flatness(p, watch);
    if (name == "moments") return run_moments(p, watch);
    if (name == "fingerprint") return run_fingerprint(p, watch);
    if (name == "birthday") return run_birthday(p, watch);
    if (name == "discriminate") return run_discriminate(p, watch);
    if (name == "indistinguishability") return run_indistinguishability(p, watch);
    if (name == "gaussian-sim") return run_gaussian_sim(p, watch);
    if (name == "bounds") return run_bounds(p, watch);
    std::string valid;
    for (const auto& s : experiment_names()) valid += (valid.empty() ? "" : ", ") + s;
    throw std::invalid_argument("unknown experiment '" + name + "'; valid experiments: " + valid);
  };

  ExperimentRecord record = dispatch();
  if (!out.empty()) record.write_atomic(out, format);
  return record;
}

}  // namespace bosonbench
