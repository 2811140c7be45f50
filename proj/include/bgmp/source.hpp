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

namespace bgmp {

// One drawn uplink frame: per-user activity, signal values, and (once
// transmit() ran) the received samples.
struct SourceRealization {
    Eigen::VectorXi lambda; // 0/1 activity
    Eigen::VectorXd g;      // signal values, drawn for every user
    Eigen::VectorXd x;      // lambda .* g  => E[x^2] == 1
    double p_tx = 1.0;
    double sigma_n2 = 0.0;
    Eigen::VectorXd y;
};

// lambda_k ~ Bernoulli(rho), g_k ~ N(0, 1/rho) independent; x = lambda .* g.
// Signal values are drawn for all users (also the silent ones) so the draw
// sequence is independent of the activity outcome.
SourceRealization sample_source(int k_users, double rho, std::uint64_t seed);

// y = sqrt(p_tx) * h_full * x + z with z_i = sqrt(sigma_n2) * n_i,
// n_i ~ N(0,1). Standard-normal noise shape times a scale, so sweeping the
// noise level with one seed reuses the same noise realization.
Eigen::VectorXd transmit(const Eigen::MatrixXd &h_full, const Eigen::VectorXd &x, double p_tx,
                         double sigma_n2, std::uint64_t seed);

// Noise variance that realizes the requested received SNR for this channel:
// sigma_n2 = p_tx * ||h||_F^2 / (rows * 10^(rsnr_db/10)). The Frobenius norm
// is the channel energy summed over all antennas; dividing by the row count
// gives the average received signal power per antenna.
double calibrate_noise(const Eigen::MatrixXd &h_full, double p_tx, double rsnr_db);

// Same formula from a precomputed mean channel energy (used by the harness,
// which averages ||h||_F^2 over the realizations of a run before fixing the
// noise level).
double calibrate_noise_from_energy(double mean_fro2, Eigen::Index rows, double p_tx,
                                   double rsnr_db);

// Received SNR in dB actually realized by (h, p_tx, sigma_n2).
double realized_rsnr_db(const Eigen::MatrixXd &h_full, double p_tx, double sigma_n2);

} // namespace bgmp
