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

#include "bgmp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bgmp/rng.hpp"

namespace bgmp {

double NetworkGeometry::distance(std::size_t m, std::size_t k) const {
    const Point &a = rrh_positions.at(m);
    const Point &b = user_positions.at(k);
    const double d = std::hypot(a.x - b.x, a.y - b.y);
    return std::max(d, kMinDistanceKm);
}

NetworkGeometry place_nodes(int m_rrh, int k_users, double side_length, std::uint64_t seed) {
    if (m_rrh < 1)
        throw std::invalid_argument("place_nodes: m_rrh must be >= 1");
    if (k_users < 1)
        throw std::invalid_argument("place_nodes: k_users must be >= 1");
    if (!(side_length > 0.0))
        throw std::invalid_argument("place_nodes: side_length must be positive");

    auto eng = make_engine(seed, Stream::geometry);
    std::uniform_real_distribution<double> coord(0.0, side_length);

    NetworkGeometry geom;
    geom.side_length = side_length;
    geom.rrh_positions.reserve(static_cast<std::size_t>(m_rrh));
    for (int m = 0; m < m_rrh; ++m) {
        const double x = coord(eng);
        const double y = coord(eng);
        geom.rrh_positions.push_back({x, y});
    }
    geom.user_positions.reserve(static_cast<std::size_t>(k_users));
    for (int k = 0; k < k_users; ++k) {
        const double x = coord(eng);
        const double y = coord(eng);
        geom.user_positions.push_back({x, y});
    }
    return geom;
}

} // namespace bgmp
