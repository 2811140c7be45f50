// bgmpsim — grant-free C-RAN activity and signal detection
// Copyright 2026 the bgmpsim authors
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

#pragma once

#include <cstdint>
#include <random>

namespace bgmp {

// Named random substreams, all derived from a single root seed. Keeping the
// draws for node placement, fading, user activity, signal values and receiver
// noise on separate streams makes realizations pairable: re-running a trial
// with a different sparsification threshold or detector set reuses exactly
// the same network, channel, sources and noise.
enum class Stream : std::uint64_t {
    geometry = 1,
    fading = 2,
    activity = 3,
    signal = 4,
    noise = 5,
};

namespace detail {

// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

inline std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t index = 0) {
    std::uint64_t h = detail::mix64(root);
    h = detail::mix64(h ^ static_cast<std::uint64_t>(stream));
    h = detail::mix64(h ^ index);
    return h;
}

inline std::mt19937_64 make_engine(std::uint64_t root, Stream stream, std::uint64_t index = 0) {
    return std::mt19937_64(derive_seed(root, stream, index));
}

} // namespace bgmp
