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

#include "bgmp/baselines.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bgmp/detector.hpp"
#include "bgmp/errors.hpp"

namespace bgmp {

namespace {

void check_common(Eigen::Index rows, const Eigen::VectorXd &y, double rho, double p_tx) {
    if (y.size() != rows)
        throw std::invalid_argument("detector: observation length does not match channel rows");
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("detector: rho must lie in (0, 1)");
    if (!(p_tx > 0.0))
        throw std::invalid_argument("detector: p_tx must be positive");
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd &h, const std::vector<int> &support) {
    Eigen::MatrixXd a(h.rows(), static_cast<Eigen::Index>(support.size()));
    int prev = -1;
    for (std::size_t j = 0; j < support.size(); ++j) {
        const int k = support[j];
        if (k <= prev)
            throw std::invalid_argument("detector: support must be strictly increasing");
        if (k < 0 || k >= h.cols())
            throw std::invalid_argument("detector: support index out of range");
        a.col(static_cast<Eigen::Index>(j)) = h.col(k);
        prev = k;
    }
    return a;
}

// Solve (a'a + ridge*I) x = a'y via Cholesky on the normal matrix.
Eigen::VectorXd solve_regularized(const Eigen::MatrixXd &a, const Eigen::VectorXd &y,
                                  double ridge) {
    Eigen::MatrixXd gram = a.transpose() * a;
    gram.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw NumericalError("detector: regularized normal matrix is not positive definite");
    return llt.solve(a.transpose() * y);
}

Eigen::VectorXd scatter(const Eigen::VectorXd &xs, const std::vector<int> &support,
                        Eigen::Index k_users) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(k_users);
    for (std::size_t j = 0; j < support.size(); ++j)
        x[support[j]] = xs[static_cast<Eigen::Index>(j)];
    return x;
}

Eigen::VectorXd sparse_mmse_impl(const Eigen::MatrixXd &h_sparse, const Eigen::VectorXd &y,
                                 const std::vector<int> &support,
                                 const Eigen::VectorXd &eta_variance, double rho, double p_tx,
                                 RegularizerMode mode) {
    check_common(h_sparse.rows(), y, rho, p_tx);
    if (eta_variance.size() != h_sparse.rows())
        throw std::invalid_argument("detector: eta_variance length does not match channel rows");
    if (support.empty())
        return Eigen::VectorXd::Zero(h_sparse.cols());

    Eigen::MatrixXd a = std::sqrt(p_tx) * select_columns(h_sparse, support);
    if (mode == RegularizerMode::whitened) {
        const Eigen::ArrayXd inv_sigma =
            eta_variance.array().max(kVarianceFloor).sqrt().inverse();
        a.array().colwise() *= inv_sigma;
        const Eigen::VectorXd yw = (y.array() * inv_sigma).matrix();
        return scatter(solve_regularized(a, yw, rho), support, h_sparse.cols());
    }
    const double eta_mean = eta_variance.mean();
    return scatter(solve_regularized(a, y, rho * eta_mean), support, h_sparse.cols());
}

} // namespace

Eigen::VectorXd ga_mmse(const Eigen::MatrixXd &h_full, const Eigen::VectorXd &y,
                        const std::vector<int> &support, double sigma_n2, double rho,
                        double p_tx) {
    check_common(h_full.rows(), y, rho, p_tx);
    if (!(sigma_n2 >= 0.0))
        throw std::invalid_argument("detector: sigma_n2 must be >= 0");
    if (support.empty())
        return Eigen::VectorXd::Zero(h_full.cols());
    const Eigen::MatrixXd a = std::sqrt(p_tx) * select_columns(h_full, support);
    return scatter(solve_regularized(a, y, sigma_n2 * rho), support, h_full.cols());
}

Eigen::VectorXd ga_smmse(const Eigen::MatrixXd &h_sparse, const Eigen::VectorXd &y,
                         const std::vector<int> &support, const Eigen::VectorXd &eta_variance,
                         double rho, double p_tx, RegularizerMode mode) {
    return sparse_mmse_impl(h_sparse, y, support, eta_variance, rho, p_tx, mode);
}

Eigen::VectorXd smmse(const Eigen::MatrixXd &h_sparse, const Eigen::VectorXd &y,
                      const Eigen::VectorXd &eta_variance, double rho, double p_tx,
                      RegularizerMode mode) {
    std::vector<int> all(static_cast<std::size_t>(h_sparse.cols()));
    for (std::size_t k = 0; k < all.size(); ++k)
        all[k] = static_cast<int>(k);
    return sparse_mmse_impl(h_sparse, y, all, eta_variance, rho, p_tx, mode);
}

PosteriorSummary exact_posterior_oracle(const Eigen::MatrixXd &h, const Eigen::VectorXd &y,
                                        const Eigen::VectorXd &sigma2_per_row, double rho) {
    const Eigen::Index n = h.rows();
    const Eigen::Index k_users = h.cols();
    if (k_users < 1 || n < 1)
        throw std::invalid_argument("exact_posterior_oracle: empty channel");
    if (k_users > 12)
        throw std::invalid_argument(
            "exact_posterior_oracle: enumeration over 2^K supports is limited to K <= 12, got K=" +
            std::to_string(k_users));
    if (y.size() != n || sigma2_per_row.size() != n)
        throw std::invalid_argument("exact_posterior_oracle: size mismatch");
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("exact_posterior_oracle: rho must lie in (0, 1)");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(sigma2_per_row[i] > 0.0))
            throw std::invalid_argument("exact_posterior_oracle: noise variances must be positive");

    const unsigned n_patterns = 1u << k_users;
    const double log_rho = std::log(rho);
    const double log_1mrho = std::log(1.0 - rho);
    const double signal_var = 1.0 / rho;

    std::vector<double> log_w(n_patterns);
    Eigen::MatrixXd cond_mean = Eigen::MatrixXd::Zero(k_users, n_patterns);

    for (unsigned s = 0; s < n_patterns; ++s) {
        // Marginal covariance of y under support s.
        Eigen::MatrixXd cov = sigma2_per_row.asDiagonal();
        double log_prior = 0.0;
        for (Eigen::Index k = 0; k < k_users; ++k) {
            if (s & (1u << k)) {
                cov.noalias() += signal_var * h.col(k) * h.col(k).transpose();
                log_prior += log_rho;
            } else {
                log_prior += log_1mrho;
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success)
            throw NumericalError("exact_posterior_oracle: support covariance not positive definite");
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            log_det += 2.0 * std::log(llt.matrixL()(i, i));
        const Eigen::VectorXd alpha = llt.solve(y);
        const double log_like = -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) +
                                        log_det + y.dot(alpha));
        log_w[s] = log_prior + log_like;
        for (Eigen::Index k = 0; k < k_users; ++k)
            if (s & (1u << k))
                cond_mean(k, s) = signal_var * h.col(k).dot(alpha);
    }

    double max_lw = log_w[0];
    for (unsigned s = 1; s < n_patterns; ++s)
        max_lw = std::max(max_lw, log_w[s]);
    double total = 0.0;
    for (unsigned s = 0; s < n_patterns; ++s)
        total += std::exp(log_w[s] - max_lw);

    PosteriorSummary out;
    out.log_evidence = max_lw + std::log(total);
    out.activity_prob = Eigen::VectorXd::Zero(k_users);
    out.mean_x = Eigen::VectorXd::Zero(k_users);
    for (unsigned s = 0; s < n_patterns; ++s) {
        const double w = std::exp(log_w[s] - max_lw) / total;
        for (Eigen::Index k = 0; k < k_users; ++k) {
            if (s & (1u << k))
                out.activity_prob[k] += w;
            out.mean_x[k] += w * cond_mean(k, s);
        }
    }
    return out;
}

} // namespace bgmp
