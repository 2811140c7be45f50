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
#include <vector>

#include "bgmp/factor_graph.hpp"

namespace bgmp {

// Numerical guard rails of the message recursions. Values are part of the
// behavioural contract and are pinned by the test suite.
inline constexpr double kLlrClamp = 30.0;        // nats, applied before exp/tanh
inline constexpr double kProbFloor = 1e-12;      // probabilities live in [floor, 1-floor]
inline constexpr double kVarianceFloor = 1e-12;  // lower bound on combined variances
inline constexpr double kVarianceCap = 1e12;     // stands in for "uninformative" (infinite)

// Bernoulli-Gaussian prior shared by all users: active with probability
// `prob`, signal value N(mean, variance) when active. variance = 1/prob keeps
// the transmitted power at one.
struct Priors {
    double mean = 0.0;
    double variance = 0.0;
    double prob = 0.0;
    double llr = 0.0; // log(prob / (1 - prob))

    static Priors bernoulli_gaussian(double rho);
};

struct BgmpConfig {
    int tau_max = 50;
    double tol = 1e-6;
    double p_tx = 1.0;
    // Damped update of variable->sum messages: new = (1-d)*computed + d*old.
    // Zero (the default) is the plain flooding schedule.
    double damping = 0.0;
    // Estimate actives as prob*mean (true) or mean alone (false).
    bool soft_estimate = true;
};

// Per-edge messages of one flooding iteration. Variable->sum Gaussians are
// kept in precision form (precision, precision*mean) so the uninformative
// initial message is representable exactly as precision zero, and so the
// leave-one-out combination at variable nodes is a plain subtraction.
struct MessageState {
    std::vector<double> vs_prec;
    std::vector<double> vs_prec_mean;
    std::vector<double> vs_llr;

    std::vector<double> sv_mean;
    std::vector<double> sv_var;
    std::vector<double> sv_llr;

    int iteration = 0;
    std::uint64_t edge_updates = 0; // instrumentation: one count per computed edge message

    // scratch, valid within one sum-node sweep
    std::vector<double> in_mean, in_var, mean_term, var_term;
};

struct GroundTruth {
    Eigen::VectorXd x;
    Eigen::VectorXi lambda;
};

struct IterationRecord {
    int iteration = 0;
    double max_delta_prob = 0.0;
    double max_delta_mean = 0.0; // relative, |de|/(1+|e|)
    double mse = 0.0;            // NaN unless ground truth was supplied
    double use_rate = 0.0;       // NaN unless ground truth was supplied
};

struct DetectionResult {
    Eigen::VectorXd posterior_mean;
    Eigen::VectorXd posterior_variance;
    Eigen::VectorXd posterior_llr;
    Eigen::VectorXd posterior_prob;
    Eigen::VectorXi lambda_hat;
    Eigen::VectorXd x_hat;
    int iterations_used = 0;
    bool converged = false;
    std::uint64_t edge_updates = 0;
    std::vector<IterationRecord> trajectory;
};

// --- scalar helpers (the dual-path tests exercise these directly) ---

double clamp_llr(double llr);
double clamp_prob(double p);
double llr_from_prob(double p); // log odds of a clamped probability
double prob_from_llr(double llr); // (tanh(llr/2)+1)/2 after clamping

// Log odds that one user is active given a single antenna sample: the log
// ratio of the two Gaussian likelihoods f(y; a*in_mean + eta_mean,
// a^2*in_var + eta_var) and f(y; eta_mean, eta_var), written in a form that
// stays stable for very large in_var. `a` is the effective link coefficient,
// (in_mean, in_var) the incoming signal belief, (eta_mean, eta_var) the
// moments of everything else arriving at the antenna.
double edge_activity_llr(double y, double a, double in_mean, double in_var, double eta_mean,
                         double eta_var);

// --- message-passing phases ---

MessageState initialize(const FactorGraph &graph, const Priors &priors);

// Antenna-side sweep: for every edge, form the leave-one-out interference
// moments at its sum node and emit the Gaussian pseudo-observation plus the
// activity log odds for its user.
void sum_node_update(const FactorGraph &graph, const Eigen::VectorXd &y,
                     const Eigen::VectorXd &eta_variance, MessageState &state,
                     const BgmpConfig &config);

// User-side sweep: combine the prior with all incoming pseudo-observations
// but the addressee's own (precision-weighted for the Gaussian part,
// additive for the log odds).
void variable_node_update(const FactorGraph &graph, const Priors &priors, MessageState &state,
                          const BgmpConfig &config);

// Combine prior plus *all* incoming messages per user and derive decisions:
// lambda_hat = 1 iff the posterior log odds are positive, x_hat zero for
// inactives and (prob*mean or mean) for actives.
DetectionResult finalize(const FactorGraph &graph, const Priors &priors,
                         const MessageState &state, const BgmpConfig &config);

// Full run: flooding iterations until both posterior activity probabilities
// and posterior means stop moving (max |dp| < tol and max |de|/(1+|e|) < tol
// between consecutive iterations) or tau_max is reached. Both sweeps run in
// every iteration, so edge_updates grows by exactly 2 * edge_count per
// iteration. Pass `truth` to get per-iteration error metrics in the
// trajectory.
DetectionResult run_bgmp(const Eigen::VectorXd &y, const FactorGraph &graph,
                         const Eigen::VectorXd &eta_variance, const Priors &priors,
                         const BgmpConfig &config, const GroundTruth *truth = nullptr);

} // namespace bgmp
