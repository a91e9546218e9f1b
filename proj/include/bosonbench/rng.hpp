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
#include <cstdint>
#include <random>

namespace bosonbench {

/// Splittable random stream, fully determined by (seed, stream_id).
///
/// The same (seed, stream_id) always reproduces the same sequence; distinct
/// stream ids are mixed through an avalanching hash before keying the engine,
/// so derived streams can be handed to parallel workers without coordination.
/// All sampling helpers below consume engine output only, hence determinism
/// holds for every method, not just next_u64().
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  /// Independent child stream; derive(i) != derive(j) for i != j. Pure:
  /// depends only on (seed, stream_id, substream).
  RngStream derive(std::uint64_t substream) const;

  /// Fresh child stream per call (internal counter advances), for call sites
  /// that spawn several independent stream families from one parent.
  RngStream split();

  std::uint64_t next_u64();

  /// Uniform double in [0, 1).
  double next_double();

  /// Standard normal via Box-Muller (one spare cached).
  double next_gaussian();

  /// Unbiased uniform integer in [0, bound). bound must be nonzero.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Complex value with independent N(0, sigma^2) real and imaginary parts.
  std::complex<double> next_complex_gaussian(double sigma);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t split_counter_ = 0;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used for stream-id mixing and key derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace bosonbench
