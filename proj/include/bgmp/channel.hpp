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
#include <cstdint>
#include <string>

#include "bgmp/geometry.hpp"

namespace bgmp {

// Channel split into the part the detector works with (h_sparse, links whose
// RRH-user distance is below the coverage threshold d0) and the discarded
// remainder (h_residual, treated as Gaussian interference). The split is a
// pure mask: h_full == h_sparse + h_residual entry for entry, exactly.
struct ChannelSet {
    Eigen::MatrixXd h_full;     // (M*N) x K
    Eigen::MatrixXd h_sparse;   // kept links
    Eigen::MatrixXd h_residual; // dropped links
    // Per-antenna effective noise variance (residual interference power plus
    // thermal noise). Left empty by sparsify(); fill via interference_variances().
    Eigen::VectorXd eta_variance;
    double sparsity = 0.0; // fraction of nonzero entries in h_sparse
    int n_antennas = 0;
};

// Real channel gains h[m*n_antennas + n, k] = fading * d(m,k)^(-alpha) with
// i.i.d. N(0, 1/K) fading per antenna. Rows are grouped per RRH (antenna
// blocks of size n_antennas). The fading draw sequence depends only on the
// seed and the matrix shape, never on the node positions, so two geometries
// built with one seed share fading coefficients.
Eigen::MatrixXd build_channel(const NetworkGeometry &geom, int n_antennas, std::uint64_t seed);

// Threshold split at geom.d0 (strictly closer than d0 is kept). Row count of
// h_full must be a multiple of the RRH count.
ChannelSet sparsify(const Eigen::MatrixXd &h_full, const NetworkGeometry &geom);

// Effective per-antenna noise variance: p_tx * sum_k h_residual(i,k)^2 + sigma_n2.
// Valid because user signals are zero mean and unit power, so dropped links
// contribute independent per-antenna interference power.
Eigen::VectorXd interference_variances(const Eigen::MatrixXd &h_residual, double p_tx,
                                       double sigma_n2);

// Dump geometry + channel split as JSON (matrices row-major flat) so that a
// realization can be pinned as a regression fixture.
void write_channel_json(const NetworkGeometry &geom, const ChannelSet &channels,
                        const std::string &path);

} // namespace bgmp
