// SPDX-License-Identifier: Apache-2.0
//
// dtsiot: LoRa direct-to-satellite IoT uplink simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "dtsiot/units.hpp"

namespace dtsiot {

namespace detail {

// splitmix64, used only to whiten seeds for stream derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

} // namespace detail

/// Deterministic random stream. Samplers are hand-rolled on top of the raw
/// 64-bit engine output so sequences are identical across standard library
/// implementations; replication workers each own one stream.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

    /// Derives an independent child stream from (seed, indices...), e.g.
    /// (scenario seed, strategy, U, replication).
    template <typename... Ix>
    static RngStream derive(std::uint64_t seed, Ix... indices) {
        std::uint64_t s = detail::splitmix64(seed);
        ((s = detail::mix(s, static_cast<std::uint64_t>(indices))), ...);
        return RngStream(s);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n).
    std::size_t uniform_index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    /// Standard normal via Box-Muller; u1 is drawn in (0, 1] so the log is finite.
    double normal() {
        double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

  private:
    std::mt19937_64 engine_;
};

} // namespace dtsiot
