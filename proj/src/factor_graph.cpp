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

#include "bgmp/factor_graph.hpp"

#include <stdexcept>

namespace bgmp {

FactorGraph build_graph(const ChannelSet &channels) {
    const Eigen::MatrixXd &h = channels.h_sparse;
    if (h.rows() == 0 || h.cols() == 0)
        throw std::invalid_argument("build_graph: empty channel matrix");

    FactorGraph g;
    g.num_sum_nodes = static_cast<int>(h.rows());
    g.num_var_nodes = static_cast<int>(h.cols());

    g.sum_offsets.assign(static_cast<std::size_t>(g.num_sum_nodes) + 1, 0);
    // Row-major scan keeps `edges` sorted by (sum index, var index).
    for (int i = 0; i < g.num_sum_nodes; ++i) {
        for (int k = 0; k < g.num_var_nodes; ++k) {
            const double c = h(i, k);
            if (c != 0.0)
                g.edges.push_back({i, k, c});
        }
        g.sum_offsets[static_cast<std::size_t>(i) + 1] = static_cast<int>(g.edges.size());
    }

    g.var_offsets.assign(static_cast<std::size_t>(g.num_var_nodes) + 1, 0);
    for (const auto &e : g.edges)
        ++g.var_offsets[static_cast<std::size_t>(e.var_index) + 1];
    for (std::size_t k = 1; k < g.var_offsets.size(); ++k)
        g.var_offsets[k] += g.var_offsets[k - 1];

    g.var_edge_ids.resize(g.edges.size());
    std::vector<int> cursor(g.var_offsets.begin(), g.var_offsets.end() - 1);
    // Edges are visited in increasing sum index, so each variable node's list
    // comes out ordered by sum index.
    for (std::size_t eid = 0; eid < g.edges.size(); ++eid) {
        const int k = g.edges[eid].var_index;
        g.var_edge_ids[static_cast<std::size_t>(cursor[static_cast<std::size_t>(k)]++)] =
            static_cast<int>(eid);
    }
    return g;
}

std::size_t edge_count(const FactorGraph &graph) { return graph.edges.size(); }

} // namespace bgmp
