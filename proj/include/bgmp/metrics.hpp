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

namespace bgmp {

// Per-user mean squared signal error, (1/K) * ||x_true - x_hat||^2.
double mse(const Eigen::VectorXd &x_true, const Eigen::VectorXd &x_hat);

// User-state error rate, (1/K) * ||lambda_true - lambda_hat||_1 on 0/1 vectors
// (the fraction of users whose activity decision is wrong).
double use_rate(const Eigen::VectorXi &lambda_true, const Eigen::VectorXi &lambda_hat);

double to_db(double linear); // 10*log10, requires linear > 0
double from_db(double db);   // 10^(db/10)

// Streaming mean/variance (Welford). Accumulation order is the insertion
// order, so aggregating trial results in index order is reproducible.
struct RunningStat {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    // Normal-approximation 95% confidence half-width of the mean.
    double half_width() const;
};

struct TrialMetrics {
    double mse = 0.0;
    double use_rate = 0.0;
    double rsnr_db = 0.0; // realized, this trial
    int iterations_used = 0;
};

} // namespace bgmp
