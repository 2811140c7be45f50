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

#include "bgmp/source.hpp"

#include <cmath>
#include <stdexcept>

#include "bgmp/metrics.hpp"
#include "bgmp/rng.hpp"

namespace bgmp {

SourceRealization sample_source(int k_users, double rho, std::uint64_t seed) {
    if (k_users < 1)
        throw std::invalid_argument("sample_source: k_users must be >= 1");
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("sample_source: rho must lie in (0, 1)");

    auto activity_eng = make_engine(seed, Stream::activity);
    auto signal_eng = make_engine(seed, Stream::signal);
    std::bernoulli_distribution active(rho);
    std::normal_distribution<double> value(0.0, std::sqrt(1.0 / rho));

    SourceRealization src;
    src.lambda.resize(k_users);
    src.g.resize(k_users);
    for (int k = 0; k < k_users; ++k)
        src.lambda[k] = active(activity_eng) ? 1 : 0;
    for (int k = 0; k < k_users; ++k)
        src.g[k] = value(signal_eng);
    src.x = src.lambda.cast<double>().cwiseProduct(src.g);
    return src;
}

Eigen::VectorXd transmit(const Eigen::MatrixXd &h_full, const Eigen::VectorXd &x, double p_tx,
                         double sigma_n2, std::uint64_t seed) {
    if (h_full.cols() != x.size())
        throw std::invalid_argument("transmit: channel column count does not match signal length");
    if (!(p_tx > 0.0))
        throw std::invalid_argument("transmit: p_tx must be positive");
    if (!(sigma_n2 >= 0.0))
        throw std::invalid_argument("transmit: sigma_n2 must be >= 0");

    Eigen::VectorXd y = std::sqrt(p_tx) * (h_full * x);
    auto eng = make_engine(seed, Stream::noise);
    std::normal_distribution<double> unit(0.0, 1.0);
    const double scale = std::sqrt(sigma_n2);
    for (Eigen::Index i = 0; i < y.size(); ++i)
        y[i] += scale * unit(eng);
    return y;
}

double calibrate_noise_from_energy(double mean_fro2, Eigen::Index rows, double p_tx,
                                   double rsnr_db) {
    if (!(mean_fro2 > 0.0))
        throw std::invalid_argument("calibrate_noise: channel energy must be positive");
    if (rows < 1)
        throw std::invalid_argument("calibrate_noise: row count must be >= 1");
    if (!(p_tx > 0.0))
        throw std::invalid_argument("calibrate_noise: p_tx must be positive");
    if (!std::isfinite(rsnr_db))
        throw std::invalid_argument("calibrate_noise: rsnr_db must be finite");
    return p_tx * mean_fro2 / (static_cast<double>(rows) * from_db(rsnr_db));
}

double calibrate_noise(const Eigen::MatrixXd &h_full, double p_tx, double rsnr_db) {
    return calibrate_noise_from_energy(h_full.squaredNorm(), h_full.rows(), p_tx, rsnr_db);
}

double realized_rsnr_db(const Eigen::MatrixXd &h_full, double p_tx, double sigma_n2) {
    if (!(sigma_n2 > 0.0))
        throw std::invalid_argument("realized_rsnr_db: sigma_n2 must be positive");
    return to_db(p_tx * h_full.squaredNorm() /
                 (static_cast<double>(h_full.rows()) * sigma_n2));
}

} // namespace bgmp
