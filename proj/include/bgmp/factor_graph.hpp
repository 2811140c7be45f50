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

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "bgmp/channel.hpp"

namespace bgmp {

// Bipartite graph over the nonzero pattern of the sparsified channel: one
// sum node per receive antenna (matrix row), one variable node per user
// (column), one edge per kept link carrying its channel coefficient.
//
// Edges are stored as one flat list sorted by (sum index, var index); the
// offset arrays expose the per-node adjacency as contiguous (sum side) or
// index-list (var side) ranges. Message arrays elsewhere are indexed by the
// position in `edges`.
struct FactorGraph {
    struct Edge {
        int sum_index;
        int var_index;
        double coeff;
    };

    int num_sum_nodes = 0;
    int num_var_nodes = 0;
    std::vector<Edge> edges;

    // edges[sum_offsets[i] .. sum_offsets[i+1]) belong to sum node i.
    std::vector<int> sum_offsets;
    // var_edge_ids[var_offsets[k] .. var_offsets[k+1]) are the edge indices of
    // variable node k, ordered by sum index.
    std::vector<int> var_offsets;
    std::vector<int> var_edge_ids;

    int sum_degree(int i) const { return sum_offsets[i + 1] - sum_offsets[i]; }
    int var_degree(int k) const { return var_offsets[k + 1] - var_offsets[k]; }
};

// Graph over channels.h_sparse. Nodes with no kept link simply have empty
// adjacency; they stay part of the graph.
FactorGraph build_graph(const ChannelSet &channels);

std::size_t edge_count(const FactorGraph &graph);

} // namespace bgmp
