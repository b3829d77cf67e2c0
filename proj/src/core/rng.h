// Copyright 2026 The tram Authors.
//
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

#ifndef TRAM_CORE_RNG_H_
#define TRAM_CORE_RNG_H_

#include <cstdint>

namespace tram {

// Counter-based generator (SplitMix64 over a keyed counter). A stream is
// fully determined by (seed, stream, episode), so trajectories replay
// identically regardless of how work is scheduled.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream = 0, uint64_t episode = 0)
      : state_(Mix(Mix(Mix(0x9e3779b97f4a7c15ULL ^ seed) + stream) + episode)) {}

  uint64_t NextUint64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix(state_);
  }

  // Uniform in [0, 1).
  double NextDouble() {
    return static_cast<double>(NextUint64() >> 11) * 0x1.0p-53;
  }

  // Uniform in {0, ..., n-1}.
  int NextInt(int n) {
    return static_cast<int>(NextUint64() % static_cast<uint64_t>(n));
  }

  // Samples an index from an unnormalized nonnegative weight array.
  template <typename Container>
  int SampleIndex(const Container& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = NextDouble() * total;
    double acc = 0.0;
    int last = 0;
    int i = 0;
    for (double w : weights) {
      acc += w;
      if (w > 0) last = i;
      if (u < acc && w > 0) return i;
      ++i;
    }
    return last;
  }

 private:
  static uint64_t Mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

}  // namespace tram

#endif  // TRAM_CORE_RNG_H_
