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

#include <doctest.h>

#include <cmath>

#include "bgmp/channel.hpp"
#include "bgmp/factor_graph.hpp"
#include "bgmp/geometry.hpp"

using namespace bgmp;

namespace {

ChannelSet wrap(const Eigen::MatrixXd &h_sparse) {
    ChannelSet cs;
    cs.h_full = h_sparse;
    cs.h_sparse = h_sparse;
    cs.h_residual = Eigen::MatrixXd::Zero(h_sparse.rows(), h_sparse.cols());
    cs.n_antennas = 1;
    cs.sparsity = static_cast<double>((h_sparse.array() != 0.0).count()) /
                  static_cast<double>(h_sparse.size());
    return cs;
}

} // namespace

TEST_SUITE("factor_graph") {

TEST_CASE("empty and dense extremes") {
    const auto empty = build_graph(wrap(Eigen::MatrixXd::Zero(4, 3)));
    CHECK(edge_count(empty) == 0);
    CHECK(empty.num_sum_nodes == 4);
    CHECK(empty.num_var_nodes == 3);
    for (int i = 0; i < 4; ++i)
        CHECK(empty.sum_degree(i) == 0);
    for (int k = 0; k < 3; ++k)
        CHECK(empty.var_degree(k) == 0);

    Eigen::MatrixXd dense = Eigen::MatrixXd::Random(4, 3);
    dense = dense.unaryExpr([](double v) { return v == 0.0 ? 0.5 : v; });
    const auto full = build_graph(wrap(dense));
    CHECK(edge_count(full) == 12);
}

TEST_CASE("edges carry coefficients and both adjacencies agree") {
    Eigen::MatrixXd h(3, 4);
    h << 1.0, 0.0, 2.0, 0.0, //
        0.0, 0.0, 0.0, 0.0,  //
        3.0, 4.0, 0.0, 5.0;
    const auto g = build_graph(wrap(h));
    REQUIRE(edge_count(g) == 5);
    CHECK(g.sum_degree(0) == 2);
    CHECK(g.sum_degree(1) == 0);
    CHECK(g.sum_degree(2) == 3);
    CHECK(g.var_degree(0) == 2);
    CHECK(g.var_degree(1) == 1);
    CHECK(g.var_degree(2) == 1);
    CHECK(g.var_degree(3) == 1);

    // degree sums both equal the edge count
    int sum_deg = 0, var_deg = 0;
    for (int i = 0; i < 3; ++i)
        sum_deg += g.sum_degree(i);
    for (int k = 0; k < 4; ++k)
        var_deg += g.var_degree(k);
    CHECK(sum_deg == 5);
    CHECK(var_deg == 5);

    // sorted by (sum, var); coefficients match the matrix
    for (std::size_t e = 1; e < g.edges.size(); ++e) {
        const bool ordered = g.edges[e - 1].sum_index < g.edges[e].sum_index ||
                             (g.edges[e - 1].sum_index == g.edges[e].sum_index &&
                              g.edges[e - 1].var_index < g.edges[e].var_index);
        CHECK(ordered);
    }
    for (const auto &e : g.edges)
        CHECK(e.coeff == h(e.sum_index, e.var_index));

    // var-side lists are ordered by sum index
    for (int k = 0; k < 4; ++k) {
        int prev = -1;
        for (int idx = g.var_offsets[k]; idx < g.var_offsets[k + 1]; ++idx) {
            const auto &e = g.edges[static_cast<std::size_t>(g.var_edge_ids[idx])];
            CHECK(e.var_index == k);
            CHECK(e.sum_index > prev);
            prev = e.sum_index;
        }
    }
}

TEST_CASE("graph depends on the sparsity pattern, not the magnitudes") {
    Eigen::MatrixXd h(2, 3);
    h << 0.1, 0.0, -0.4, //
        0.0, 2.0, 0.0;
    const auto g1 = build_graph(wrap(h));
    const auto g2 = build_graph(wrap(10.0 * h));
    REQUIRE(edge_count(g1) == edge_count(g2));
    for (std::size_t e = 0; e < g1.edges.size(); ++e) {
        CHECK(g1.edges[e].sum_index == g2.edges[e].sum_index);
        CHECK(g1.edges[e].var_index == g2.edges[e].var_index);
    }
}

TEST_CASE("edge count equals rows x cols x sparsity on drawn channels") {
    auto geom = place_nodes(10, 16, 2.0, 71);
    geom.alpha = 2.25;
    const auto h = build_channel(geom, 3, 73);
    for (double d0 : {0.4, 0.9, 1.4, 2.9}) {
        geom.d0 = d0;
        const auto cs = sparsify(h, geom);
        const auto g = build_graph(cs);
        const auto expected = std::llround(cs.sparsity * 30.0 * 16.0);
        CHECK(static_cast<long long>(edge_count(g)) == expected);
    }
}

TEST_CASE("deployment-scale sparsity lands near 0.7 with the matched threshold") {
    auto geom = place_nodes(120, 200, 5.0, 79);
    geom.alpha = 2.25;
    geom.d0 = 3.5;
    const auto h = build_channel(geom, 10, 83);
    const auto cs = sparsify(h, geom);
    const auto g = build_graph(cs);
    const double gamma = static_cast<double>(edge_count(g)) / (1200.0 * 200.0);
    CHECK(gamma == doctest::Approx(cs.sparsity).epsilon(1e-12));
    // d0/side = 0.7 keeps about 74% of the links; allow a generous band
    CHECK(gamma > 0.68);
    CHECK(gamma < 0.8);
}

TEST_CASE("build_graph is reproducible and rejects empty matrices") {
    auto geom = place_nodes(5, 7, 1.0, 89);
    geom.alpha = 2.25;
    geom.d0 = 0.5;
    const auto cs = sparsify(build_channel(geom, 2, 97), geom);
    const auto g1 = build_graph(cs);
    const auto g2 = build_graph(cs);
    REQUIRE(edge_count(g1) == edge_count(g2));
    for (std::size_t e = 0; e < g1.edges.size(); ++e)
        CHECK(g1.edges[e].coeff == g2.edges[e].coeff);

    ChannelSet bad;
    bad.h_sparse = Eigen::MatrixXd();
    CHECK_THROWS_AS(build_graph(bad), std::invalid_argument);
}

} // TEST_SUITE
