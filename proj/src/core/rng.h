// Copyright 2026 The latclimb Authors
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

#ifndef LATCLIMB_CORE_RNG_H_
#define LATCLIMB_CORE_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace latclimb {

inline constexpr uint64_t kDefaultSeed = 42;

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// A random stream keyed by (master seed, stream coordinates). Streams with
// distinct keys are independent, so trials can run in any order or in
// parallel and still reproduce bit-for-bit.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(Mix64(seed)) {}

  static Rng Stream(uint64_t master, std::initializer_list<uint64_t> key) {
    uint64_t h = Mix64(master);
    for (uint64_t k : key) h = Mix64(h ^ Mix64(k + 0x632be59bd9b4e019ULL));
    return Rng(h);
  }

  double Normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  double Uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // Uniform integer in [0, n).
  uint64_t Below(uint64_t n) {
    return std::uniform_int_distribution<uint64_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace latclimb

#endif  // LATCLIMB_CORE_RNG_H_
