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
#include <vector>

namespace bgmp {

// How the per-antenna effective noise enters the linear detectors:
//   whitened — scale each matrix row and observation by 1/sigma_i, ridge rho;
//   scalar   — keep rows as-is, ridge rho * mean(eta_variance).
// Whitened is the default; both coincide when the noise is homoscedastic.
enum class RegularizerMode { whitened, scalar };

// Genie-aided MMSE on the full channel: restrict sqrt(p_tx)*h_full to the
// true support S, solve (A'A + sigma_n2*rho*I) x_S = A'y, zeros elsewhere.
// sigma_n2 == 0 drops the ridge; a then-singular system raises NumericalError.
Eigen::VectorXd ga_mmse(const Eigen::MatrixXd &h_full, const Eigen::VectorXd &y,
                        const std::vector<int> &support, double sigma_n2, double rho,
                        double p_tx);

// Genie-aided MMSE on the sparsified channel, with the dropped links folded
// into per-antenna noise variances.
Eigen::VectorXd ga_smmse(const Eigen::MatrixXd &h_sparse, const Eigen::VectorXd &y,
                         const std::vector<int> &support, const Eigen::VectorXd &eta_variance,
                         double rho, double p_tx,
                         RegularizerMode mode = RegularizerMode::whitened);

// Sparse MMSE without activity knowledge: all users treated as candidates.
Eigen::VectorXd smmse(const Eigen::MatrixXd &h_sparse, const Eigen::VectorXd &y,
                      const Eigen::VectorXd &eta_variance, double rho, double p_tx,
                      RegularizerMode mode = RegularizerMode::whitened);

// Exact Bernoulli-Gaussian posterior by support enumeration, for the model
// y = h*x + n with x_k = lambda_k*g_k, lambda_k ~ Bern(rho), g_k ~ N(0,1/rho)
// and independent n_i ~ N(0, sigma2_per_row_i). Pass the effective channel
// (any transmit power already folded into h). Refuses more than 12 users.
struct PosteriorSummary {
    Eigen::VectorXd activity_prob; // P(lambda_k = 1 | y)
    Eigen::VectorXd mean_x;        // E[x_k | y]
    double log_evidence = 0.0;     // log p(y)
};

PosteriorSummary exact_posterior_oracle(const Eigen::MatrixXd &h, const Eigen::VectorXd &y,
                                        const Eigen::VectorXd &sigma2_per_row, double rho);

} // namespace bgmp
