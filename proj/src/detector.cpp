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

#include "bgmp/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bgmp/errors.hpp"
#include "bgmp/metrics.hpp"

namespace bgmp {

Priors Priors::bernoulli_gaussian(double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw std::invalid_argument("Priors: rho must lie in (0, 1)");
    Priors p;
    p.mean = 0.0;
    p.variance = 1.0 / rho;
    p.prob = rho;
    p.llr = std::log(rho / (1.0 - rho));
    return p;
}

double clamp_llr(double llr) { return std::clamp(llr, -kLlrClamp, kLlrClamp); }

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

double llr_from_prob(double p) {
    p = clamp_prob(p);
    return std::log(p / (1.0 - p));
}

double prob_from_llr(double llr) {
    return clamp_prob(0.5 * (std::tanh(0.5 * clamp_llr(llr)) + 1.0));
}

double edge_activity_llr(double y, double a, double in_mean, double in_var, double eta_mean,
                         double eta_var) {
    // log f(y; a*in_mean + eta_mean, a^2*in_var + eta_var)
    //   - log f(y; eta_mean, eta_var)
    // expanded so that the in_var -> infinity limit is finite term by term.
    const double r = y - eta_mean;
    const double av = a * a * in_var;
    const double s = eta_var + av;
    const double am = a * in_mean;
    return -0.5 * std::log1p(av / eta_var) + av * r * r / (2.0 * eta_var * s) +
           am * (2.0 * r - am) / (2.0 * s);
}

MessageState initialize(const FactorGraph &graph, const Priors &priors) {
    if (!(priors.variance > 0.0))
        throw std::invalid_argument("initialize: prior variance must be positive");
    const std::size_t e = graph.edges.size();
    MessageState st;
    // Uninformative start: infinite variance (precision zero), even odds.
    st.vs_prec.assign(e, 0.0);
    st.vs_prec_mean.assign(e, 0.0);
    st.vs_llr.assign(e, 0.0);
    st.sv_mean.assign(e, 0.0);
    st.sv_var.assign(e, 0.0);
    st.sv_llr.assign(e, 0.0);
    st.in_mean.assign(e, 0.0);
    st.in_var.assign(e, 0.0);
    st.mean_term.assign(e, 0.0);
    st.var_term.assign(e, 0.0);
    st.iteration = 0;
    st.edge_updates = 0;
    return st;
}

void sum_node_update(const FactorGraph &graph, const Eigen::VectorXd &y,
                     const Eigen::VectorXd &eta_variance, MessageState &state,
                     const BgmpConfig &config) {
    if (y.size() != graph.num_sum_nodes || eta_variance.size() != graph.num_sum_nodes)
        throw std::invalid_argument("sum_node_update: observation size does not match graph");
    const double sp = std::sqrt(config.p_tx);

    for (int i = 0; i < graph.num_sum_nodes; ++i) {
        const int begin = graph.sum_offsets[static_cast<std::size_t>(i)];
        const int end = graph.sum_offsets[static_cast<std::size_t>(i) + 1];

        // First pass: fold each incoming belief into the activity-weighted
        // moments of this antenna's superposition.
        double total_mean = 0.0;
        double total_var = 0.0;
        for (int eid = begin; eid < end; ++eid) {
            const auto ue = static_cast<std::size_t>(eid);
            const double a = sp * graph.edges[ue].coeff;
            const double w = state.vs_prec[ue];
            // Precision zero encodes an uninformative message; cap the
            // variance instead of producing an infinity.
            const double var = (w * kVarianceCap > 1.0) ? 1.0 / w : kVarianceCap;
            const double mean = (w > 0.0) ? state.vs_prec_mean[ue] / w : 0.0;
            const double p = prob_from_llr(state.vs_llr[ue]);
            const double mt = a * p * mean;
            // Variance of a*lambda*g for g ~ N(mean, var), lambda ~ Bern(p).
            const double vt = a * a * p * (var + (1.0 - p) * mean * mean);
            state.in_mean[ue] = mean;
            state.in_var[ue] = var;
            state.mean_term[ue] = mt;
            state.var_term[ue] = vt;
            total_mean += mt;
            total_var += vt;
        }

        // Second pass: per edge, subtract its own contribution to get the
        // leave-one-out interference moments, then emit.
        for (int eid = begin; eid < end; ++eid) {
            const auto ue = static_cast<std::size_t>(eid);
            const double a = sp * graph.edges[ue].coeff;
            const double eta_mean = total_mean - state.mean_term[ue];
            const double eta_var =
                std::max(total_var - state.var_term[ue] + eta_variance[i], kVarianceFloor);
            state.sv_mean[ue] = (y[i] - eta_mean) / a;
            state.sv_var[ue] = eta_var / (a * a);
            state.sv_llr[ue] =
                edge_activity_llr(y[i], a, state.in_mean[ue], state.in_var[ue], eta_mean, eta_var);
            ++state.edge_updates;
        }
    }
}

void variable_node_update(const FactorGraph &graph, const Priors &priors, MessageState &state,
                          const BgmpConfig &config) {
    const double prior_prec = 1.0 / priors.variance;
    const double prior_wmean = priors.mean / priors.variance;
    const double d = config.damping;

    for (int k = 0; k < graph.num_var_nodes; ++k) {
        const int begin = graph.var_offsets[static_cast<std::size_t>(k)];
        const int end = graph.var_offsets[static_cast<std::size_t>(k) + 1];

        double total_prec = 0.0;
        double total_wmean = 0.0;
        double total_llr = 0.0;
        for (int idx = begin; idx < end; ++idx) {
            const auto ue = static_cast<std::size_t>(graph.var_edge_ids[static_cast<std::size_t>(idx)]);
            total_prec += 1.0 / state.sv_var[ue];
            total_wmean += state.sv_mean[ue] / state.sv_var[ue];
            total_llr += state.sv_llr[ue];
        }

        for (int idx = begin; idx < end; ++idx) {
            const auto ue = static_cast<std::size_t>(graph.var_edge_ids[static_cast<std::size_t>(idx)]);
            const double prec = prior_prec + total_prec - 1.0 / state.sv_var[ue];
            const double wmean = prior_wmean + total_wmean - state.sv_mean[ue] / state.sv_var[ue];
            const double llr = priors.llr + total_llr - state.sv_llr[ue];
            if (d > 0.0) {
                state.vs_prec[ue] = (1.0 - d) * prec + d * state.vs_prec[ue];
                state.vs_prec_mean[ue] = (1.0 - d) * wmean + d * state.vs_prec_mean[ue];
                state.vs_llr[ue] = (1.0 - d) * llr + d * state.vs_llr[ue];
            } else {
                state.vs_prec[ue] = prec;
                state.vs_prec_mean[ue] = wmean;
                state.vs_llr[ue] = llr;
            }
            ++state.edge_updates;
        }
    }
}

namespace {

// Posterior combine shared by finalize() and the convergence check: prior
// plus every incoming pseudo-observation, per user.
void posterior_combine(const FactorGraph &graph, const Priors &priors, const MessageState &state,
                       Eigen::VectorXd &prec, Eigen::VectorXd &mean, Eigen::VectorXd &llr,
                       Eigen::VectorXd &prob) {
    const double prior_prec = 1.0 / priors.variance;
    const double prior_wmean = priors.mean / priors.variance;
    for (int k = 0; k < graph.num_var_nodes; ++k) {
        const int begin = graph.var_offsets[static_cast<std::size_t>(k)];
        const int end = graph.var_offsets[static_cast<std::size_t>(k) + 1];
        double p = prior_prec;
        double w = prior_wmean;
        double l = priors.llr;
        for (int idx = begin; idx < end; ++idx) {
            const auto ue = static_cast<std::size_t>(graph.var_edge_ids[static_cast<std::size_t>(idx)]);
            p += 1.0 / state.sv_var[ue];
            w += state.sv_mean[ue] / state.sv_var[ue];
            l += state.sv_llr[ue];
        }
        p = std::max(p, kVarianceFloor); // p >= prior precision > 0 already
        prec[k] = p;
        mean[k] = w / p;
        llr[k] = l;
        prob[k] = prob_from_llr(l);
    }
}

void decide(const Eigen::VectorXd &mean, const Eigen::VectorXd &llr, const Eigen::VectorXd &prob,
            bool soft, Eigen::VectorXi &lambda_hat, Eigen::VectorXd &x_hat) {
    for (Eigen::Index k = 0; k < mean.size(); ++k) {
        const bool active = llr[k] > 0.0;
        lambda_hat[k] = active ? 1 : 0;
        x_hat[k] = active ? (soft ? prob[k] * mean[k] : mean[k]) : 0.0;
    }
}

void check_finite(const FactorGraph &graph, const MessageState &state, int iteration) {
    const std::size_t e = graph.edges.size();
    for (std::size_t i = 0; i < e; ++i) {
        const bool ok = std::isfinite(state.vs_prec[i]) && std::isfinite(state.vs_prec_mean[i]) &&
                        std::isfinite(state.vs_llr[i]) && std::isfinite(state.sv_mean[i]) &&
                        std::isfinite(state.sv_var[i]) && std::isfinite(state.sv_llr[i]);
        if (!ok)
            throw NumericalError("bgmp: non-finite message at iteration " +
                                 std::to_string(iteration) + " on edge (sum " +
                                 std::to_string(graph.edges[i].sum_index) + ", user " +
                                 std::to_string(graph.edges[i].var_index) + ")");
    }
}

} // namespace

DetectionResult finalize(const FactorGraph &graph, const Priors &priors,
                         const MessageState &state, const BgmpConfig &config) {
    if (state.iteration < 1)
        throw std::invalid_argument("finalize: needs at least one completed iteration");
    const int k_users = graph.num_var_nodes;
    DetectionResult res;
    res.posterior_mean.resize(k_users);
    res.posterior_variance.resize(k_users);
    res.posterior_llr.resize(k_users);
    res.posterior_prob.resize(k_users);
    res.lambda_hat.resize(k_users);
    res.x_hat.resize(k_users);

    Eigen::VectorXd prec(k_users);
    posterior_combine(graph, priors, state, prec, res.posterior_mean, res.posterior_llr,
                      res.posterior_prob);
    res.posterior_variance = prec.cwiseInverse();
    decide(res.posterior_mean, res.posterior_llr, res.posterior_prob, config.soft_estimate,
           res.lambda_hat, res.x_hat);
    res.iterations_used = state.iteration;
    res.edge_updates = state.edge_updates;
    return res;
}

DetectionResult run_bgmp(const Eigen::VectorXd &y, const FactorGraph &graph,
                         const Eigen::VectorXd &eta_variance, const Priors &priors,
                         const BgmpConfig &config, const GroundTruth *truth) {
    if (y.size() != graph.num_sum_nodes)
        throw std::invalid_argument("run_bgmp: observation length does not match sum node count");
    if (eta_variance.size() != graph.num_sum_nodes)
        throw std::invalid_argument("run_bgmp: eta_variance length does not match sum node count");
    for (Eigen::Index i = 0; i < eta_variance.size(); ++i)
        if (!(eta_variance[i] >= 0.0) || !std::isfinite(eta_variance[i]))
            throw std::invalid_argument("run_bgmp: eta_variance entries must be finite and >= 0");
    if (config.tau_max < 1)
        throw std::invalid_argument("run_bgmp: tau_max must be >= 1");
    if (!(config.tol > 0.0))
        throw std::invalid_argument("run_bgmp: tol must be positive");
    if (!(config.damping >= 0.0 && config.damping < 1.0))
        throw std::invalid_argument("run_bgmp: damping must lie in [0, 1)");
    if (truth && (truth->x.size() != graph.num_var_nodes ||
                  truth->lambda.size() != graph.num_var_nodes))
        throw std::invalid_argument("run_bgmp: ground truth length does not match user count");

    MessageState state = initialize(graph, priors);
    const int k_users = graph.num_var_nodes;

    // The "previous" snapshot starts at the prior, which is what the combine
    // yields before any message carries information.
    Eigen::VectorXd prev_prob = Eigen::VectorXd::Constant(k_users, priors.prob);
    Eigen::VectorXd prev_mean = Eigen::VectorXd::Zero(k_users);
    Eigen::VectorXd prec(k_users), cur_mean(k_users), cur_llr(k_users), cur_prob(k_users);
    Eigen::VectorXi lambda_hat(k_users);
    Eigen::VectorXd x_hat(k_users);

    bool converged = false;
    std::vector<IterationRecord> trajectory;
    trajectory.reserve(static_cast<std::size_t>(config.tau_max));

    int t = 0;
    while (t < config.tau_max) {
        ++t;
        state.iteration = t;
        sum_node_update(graph, y, eta_variance, state, config);
        variable_node_update(graph, priors, state, config);
        check_finite(graph, state, t);

        posterior_combine(graph, priors, state, prec, cur_mean, cur_llr, cur_prob);
        double max_dp = 0.0;
        double max_de = 0.0;
        for (int k = 0; k < k_users; ++k) {
            max_dp = std::max(max_dp, std::abs(cur_prob[k] - prev_prob[k]));
            max_de = std::max(max_de,
                              std::abs(cur_mean[k] - prev_mean[k]) / (1.0 + std::abs(cur_mean[k])));
        }

        IterationRecord rec;
        rec.iteration = t;
        rec.max_delta_prob = max_dp;
        rec.max_delta_mean = max_de;
        rec.mse = std::numeric_limits<double>::quiet_NaN();
        rec.use_rate = std::numeric_limits<double>::quiet_NaN();
        if (truth) {
            decide(cur_mean, cur_llr, cur_prob, config.soft_estimate, lambda_hat, x_hat);
            rec.mse = mse(truth->x, x_hat);
            rec.use_rate = use_rate(truth->lambda, lambda_hat);
        }
        trajectory.push_back(rec);

        prev_prob = cur_prob;
        prev_mean = cur_mean;
        if (max_dp < config.tol && max_de < config.tol) {
            converged = true;
            break;
        }
    }

    DetectionResult res = finalize(graph, priors, state, config);
    res.converged = converged;
    res.trajectory = std::move(trajectory);
    return res;
}

} // namespace bgmp
