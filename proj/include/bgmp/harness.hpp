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

#include <cstdint>
#include <string>
#include <vector>

#include "bgmp/baselines.hpp"
#include "bgmp/detector.hpp"
#include "bgmp/metrics.hpp"

namespace bgmp {

enum class Detector { bgmp, ga_mmse, ga_smmse, smmse };

std::string detector_name(Detector d);
Detector detector_from_name(const std::string &name); // throws std::invalid_argument

enum class EstimateMode { soft, hard };

// Everything one experiment run needs. Defaults reproduce the reference
// deployment scale (120 sites, 10 antennas each, 200 users on a 5 km square).
struct ExperimentConfig {
    int m_rrh = 120;
    int k_users = 200;
    int n_antennas = 10;
    double rho = 0.3;
    double alpha = 2.25;
    double side_length_km = 5.0;
    std::vector<double> d0_km = {3.5};
    std::vector<double> rsnr_db = {0.0, 10.0, 20.0, 30.0, 40.0};
    int tau_max = 50;
    double tol = 1e-6;
    double p_tx = 1.0;
    double damping = 0.0;
    int trials = 100;
    std::uint64_t seed = 1;
    std::vector<Detector> detectors = {Detector::bgmp, Detector::ga_mmse, Detector::ga_smmse,
                                       Detector::smmse};
    RegularizerMode regularizer_mode = RegularizerMode::whitened;
    EstimateMode estimate_mode = EstimateMode::soft;
    bool fixed_geometry = false; // pin node placement to the trial-0 draw
};

// All violated constraints at once (empty means valid).
std::vector<std::string> validate(const ExperimentConfig &config);

// Flat "key = value" file; '#' starts a comment; lists are comma separated.
// Collects parse errors instead of stopping at the first one.
ExperimentConfig load_config_file(const std::string &path, std::vector<std::string> &errors);
// Apply one key/value pair (also used for command-line overrides). Returns an
// error string, empty when accepted.
std::string apply_config_entry(ExperimentConfig &config, const std::string &key,
                               const std::string &value);
std::string print_config(const ExperimentConfig &config);

struct DetectorOutcome {
    Detector detector = Detector::bgmp;
    TrialMetrics metrics;
    std::uint64_t edge_updates = 0;
};

struct TrialRecord {
    double realized_gamma = 0.0;
    double sigma_n2 = 0.0;
    std::size_t edges = 0;
    std::vector<DetectorOutcome> outcomes;
    DetectionResult bgmp_detail; // filled only when BGMP ran
};

// One complete trial at a given threshold and noise level. All randomness
// derives from (config.seed, trial_index), so the same trial index yields the
// same network/channel/sources/noise under any d0, noise level or detector
// subset. `with_trace` additionally records the per-iteration error
// trajectory (needs ground truth, which the trial knows).
TrialRecord run_trial(const ExperimentConfig &config, double d0, double sigma_n2,
                      int trial_index, bool with_trace);

// Mean channel energy ||h||_F^2 over the run's realizations; the harness
// fixes the noise level from this average rather than per trial.
double mean_channel_energy(const ExperimentConfig &config);

struct ResultRow {
    double d0_km = 0.0;
    double realized_gamma_mean = 0.0;
    double rsnr_db = 0.0; // target of this sweep point
    std::string detector;
    double mse_db_mean = 0.0;
    double mse_ci_db = 0.0;
    double use_mean = 0.0;
    double use_ci = 0.0;
    double iters_mean = 0.0;
    std::uint64_t edge_updates_total = 0;
};

struct ResultsTable {
    std::vector<ResultRow> rows;
};

// Full sweep over d0_km x rsnr_db. Trials run on a worker pool (size from the
// BGMP_WORKERS environment variable, default: hardware concurrency) and are
// aggregated in trial order, so results do not depend on the worker count.
ResultsTable run_experiment(const ExperimentConfig &config);

enum class EmitFormat { csv, json };
std::string to_csv(const ResultsTable &table);
std::string to_json(const ResultsTable &table);
void emit(const ResultsTable &table, EmitFormat format, const std::string &path);

// Agreement check against the exact enumeration posterior on small systems.
// block mode: one private antenna per user (a tree, message passing is
// exact); loopy mode: drawn geometry with shared antennas (finite gap,
// reported for diagnosis, no vanishing guarantee).
struct OracleCheckRow {
    int trial = 0;
    double max_prob_gap = 0.0;
    double max_mean_gap = 0.0;
    double bgmp_mse = 0.0;
    double oracle_mse = 0.0;
};

struct OracleReport {
    bool block_mode = true;
    std::vector<OracleCheckRow> rows;
    double max_prob_gap = 0.0;
    double max_mean_gap = 0.0;
};

OracleReport oracle_check(const ExperimentConfig &config, bool block_mode);

// Gap bound that block-mode oracle agreement is held to.
inline constexpr double kBlockOracleTolerance = 1e-6;

} // namespace bgmp
