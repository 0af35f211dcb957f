// Copyright 2026 The RandProx Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RANDPROX_RNG_H_
#define RANDPROX_RNG_H_

#include <cstdint>
#include <limits>
#include <random>

#include "randprox/types.h"

namespace randprox {

inline uint64_t SplitMix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based random stream. A stream is fully determined by
// (seed, stream, counter): Substream(t) gives iteration t its own independent
// generator, so draws never depend on how many numbers earlier iterations
// consumed. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = uint64_t;

  explicit Rng(uint64_t seed, uint64_t stream = 0)
      : key_(SplitMix64(seed ^ SplitMix64(stream + 0x632be59bd9b4e019ULL))) {}

  Rng Substream(uint64_t index) const {
    Rng child(0);
    child.key_ = SplitMix64(key_ ^ SplitMix64(index + 0x2545f4914f6cdd1dULL));
    return child;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return SplitMix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int64_t UniformInt(int64_t n) {
    return std::uniform_int_distribution<int64_t>(0, n - 1)(*this);
  }

  double Normal() { return std::normal_distribution<double>()(*this); }

  Vector NormalVector(int64_t n) {
    Vector v(n);
    for (int64_t i = 0; i < n; ++i) v[i] = Normal();
    return v;
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace randprox

#endif  // RANDPROX_RNG_H_
