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
#include <vector>

namespace bgmp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Distances are clamped from below so that a user dropped (almost) on top of
// an antenna site cannot produce an unbounded path gain.
inline constexpr double kMinDistanceKm = 1e-3;

// One drawn network layout: RRH sites and user terminals, uniform on a
// square of the given side length (km). `alpha` is the path-loss exponent
// and `d0` the coverage-distance threshold used when sparsifying the
// channel; both are free to adjust after placement since node positions do
// not depend on them.
struct NetworkGeometry {
    std::vector<Point> rrh_positions;
    std::vector<Point> user_positions;
    double side_length = 0.0;
    double alpha = 2.25;
    double d0 = 0.0;

    std::size_t num_rrh() const { return rrh_positions.size(); }
    std::size_t num_users() const { return user_positions.size(); }

    // Euclidean RRH-to-user distance in km, clamped at kMinDistanceKm.
    double distance(std::size_t m, std::size_t k) const;
};

// Draw RRH and user positions i.i.d. uniform on the square.
// Throws std::invalid_argument on nonpositive counts or side length.
NetworkGeometry place_nodes(int m_rrh, int k_users, double side_length, std::uint64_t seed);

} // namespace bgmp
