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

// Command-line front end.
//
//   bgmp_sim run          sweep d0 x RSNR, write a results table (csv/json)
//   bgmp_sim oracle-check compare message passing against exact enumeration
//   bgmp_sim single       one trial, optional per-iteration trace + channel dump
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
// failure, 4 file I/O failure, 5 oracle gap above tolerance in block mode.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bgmp/channel.hpp"
#include "bgmp/errors.hpp"
#include "bgmp/geometry.hpp"
#include "bgmp/harness.hpp"
#include "bgmp/rng.hpp"
#include "bgmp/source.hpp"

namespace {

struct CliOverrides {
    std::vector<std::pair<std::string, std::string>> entries;
};

// Register the config keys as individual CLI flags; remembered as key=value
// pairs so that file values and flag overrides flow through one code path.
void add_override_options(CLI::App *cmd, CliOverrides &ov) {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"--m-rrh", "m_rrh"},
        {"--k-users", "k_users"},
        {"--n-antennas", "n_antennas"},
        {"--rho", "rho"},
        {"--alpha", "alpha"},
        {"--side-length-km", "side_length_km"},
        {"--d0-km", "d0_km"},
        {"--rsnr-db", "rsnr_db"},
        {"--tau-max", "tau_max"},
        {"--tol", "tol"},
        {"--p-tx", "p_tx"},
        {"--damping", "damping"},
        {"--trials", "trials"},
        {"--seed", "seed"},
        {"--detectors", "detectors"},
        {"--regularizer-mode", "regularizer_mode"},
        {"--estimate-mode", "estimate_mode"},
    };
    for (const auto &[flag, key] : keys) {
        const std::string k = key;
        cmd->add_option_function<std::string>(
               flag, [&ov, k](const std::string &v) { ov.entries.push_back({k, v}); },
               "config key " + k)
            ->type_name("VALUE");
    }
    cmd->add_flag_callback(
        "--fixed-geometry",
        [&ov] { ov.entries.push_back({"fixed_geometry", "true"}); },
        "pin node placement to the trial-0 draw");
}

bgmp::ExperimentConfig build_config(const std::string &config_path, const CliOverrides &ov,
                                    bool print_effective) {
    std::vector<std::string> errors;
    bgmp::ExperimentConfig config;
    if (!config_path.empty())
        config = bgmp::load_config_file(config_path, errors);
    for (const auto &[key, value] : ov.entries) {
        const std::string err = bgmp::apply_config_entry(config, key, value);
        if (!err.empty())
            errors.push_back(err);
    }
    for (const auto &e : bgmp::validate(config))
        errors.push_back(e);
    if (!errors.empty()) {
        std::cerr << "configuration errors:\n";
        for (const auto &e : errors)
            std::cerr << "  - " << e << "\n";
        throw std::invalid_argument("configuration rejected (" + std::to_string(errors.size()) +
                                    " error(s))");
    }
    if (print_effective)
        std::cout << bgmp::print_config(config);
    return config;
}

int run_cmd(const std::string &config_path, const CliOverrides &ov, bool print_effective,
            const std::string &out_path, const std::string &format) {
    const auto config = build_config(config_path, ov, print_effective);
    const auto table = bgmp::run_experiment(config);
    const auto fmt = format == "json" ? bgmp::EmitFormat::json : bgmp::EmitFormat::csv;
    bgmp::emit(table, fmt, out_path);
    std::cout << "wrote " << table.rows.size() << " rows to " << out_path << "\n";
    return 0;
}

int oracle_cmd(const std::string &config_path, const CliOverrides &ov, bool print_effective,
               const std::string &mode) {
    auto config = build_config(config_path, ov, print_effective);
    const bool block = mode != "loopy";
    const auto report = bgmp::oracle_check(config, block);
    std::printf("# mode=%s trials=%d users=%d\n", block ? "block" : "loopy", config.trials,
                config.k_users);
    std::printf("trial,max_prob_gap,max_mean_gap,bgmp_mse,oracle_mse\n");
    for (const auto &row : report.rows)
        std::printf("%d,%.9g,%.9g,%.9g,%.9g\n", row.trial, row.max_prob_gap, row.max_mean_gap,
                    row.bgmp_mse, row.oracle_mse);
    std::printf("# max_prob_gap=%.9g max_mean_gap=%.9g\n", report.max_prob_gap,
                report.max_mean_gap);
    if (block && (report.max_prob_gap > bgmp::kBlockOracleTolerance ||
                  report.max_mean_gap > bgmp::kBlockOracleTolerance)) {
        std::cerr << "block-mode oracle gap above " << bgmp::kBlockOracleTolerance << "\n";
        return 5;
    }
    return 0;
}

int single_cmd(const std::string &config_path, const CliOverrides &ov, bool print_effective,
               bool trace, int trial_index, const std::string &dump_path) {
    auto config = build_config(config_path, ov, print_effective);
    const double d0 = config.d0_km.front();
    const double rsnr = config.rsnr_db.front();

    // Per-realization noise calibration for a single look at the system.
    const auto saved_trials = config.trials;
    config.trials = 1;
    // Energy of this trial's channel; trial_index shifts which draw is used.
    bgmp::ExperimentConfig probe = config;
    probe.seed = config.seed;
    double energy = 0.0;
    {
        const std::uint64_t gi =
            config.fixed_geometry ? 0 : static_cast<std::uint64_t>(trial_index);
        auto geom = bgmp::place_nodes(config.m_rrh, config.k_users, config.side_length_km,
                                      bgmp::derive_seed(config.seed, bgmp::Stream::geometry, gi));
        geom.alpha = config.alpha;
        const auto h = bgmp::build_channel(
            geom, config.n_antennas,
            bgmp::derive_seed(config.seed, bgmp::Stream::fading,
                              static_cast<std::uint64_t>(trial_index)));
        energy = h.squaredNorm();
    }
    config.trials = saved_trials;
    const double sigma_n2 = bgmp::calibrate_noise_from_energy(
        energy, static_cast<Eigen::Index>(config.m_rrh) * config.n_antennas, config.p_tx, rsnr);

    const auto rec = bgmp::run_trial(config, d0, sigma_n2, trial_index, true);

    if (trace) {
        for (const auto &it : rec.bgmp_detail.trajectory)
            std::printf("{\"iteration\": %d, \"max_delta_prob\": %.9g, \"max_delta_mean\": %.9g, "
                        "\"mse\": %.9g, \"use_rate\": %.9g}\n",
                        it.iteration, it.max_delta_prob, it.max_delta_mean, it.mse, it.use_rate);
    }
    std::printf("# d0_km=%.9g rsnr_db=%.9g sigma_n2=%.9g gamma=%.9g edges=%zu\n", d0, rsnr,
                sigma_n2, rec.realized_gamma, rec.edges);
    for (const auto &out : rec.outcomes)
        std::printf("%s: mse=%.9g (%.6g dB)  use_rate=%.9g  iterations=%d\n",
                    bgmp::detector_name(out.detector).c_str(), out.metrics.mse,
                    bgmp::to_db(std::max(out.metrics.mse, 1e-300)), out.metrics.use_rate,
                    out.metrics.iterations_used);

    if (!dump_path.empty()) {
        const std::uint64_t gi =
            config.fixed_geometry ? 0 : static_cast<std::uint64_t>(trial_index);
        auto geom = bgmp::place_nodes(config.m_rrh, config.k_users, config.side_length_km,
                                      bgmp::derive_seed(config.seed, bgmp::Stream::geometry, gi));
        geom.alpha = config.alpha;
        geom.d0 = d0;
        const auto h = bgmp::build_channel(
            geom, config.n_antennas,
            bgmp::derive_seed(config.seed, bgmp::Stream::fading,
                              static_cast<std::uint64_t>(trial_index)));
        auto channels = bgmp::sparsify(h, geom);
        channels.eta_variance =
            bgmp::interference_variances(channels.h_residual, config.p_tx, sigma_n2);
        bgmp::write_channel_json(geom, channels, dump_path);
        std::printf("# channel dump written to %s\n", dump_path.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"grant-free C-RAN activity and signal detection simulator"};
    app.require_subcommand(1);

    std::string config_path, out_path = "results.csv", format = "csv", mode = "block";
    std::string dump_path;
    bool print_effective = false, trace = false;
    int trial_index = 0;
    CliOverrides ov;

    auto *run = app.add_subcommand("run", "sweep d0 x RSNR and write the results table");
    run->add_option("--config", config_path, "flat key = value config file");
    run->add_option("--out", out_path, "output path (default results.csv)");
    run->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    run->add_flag("--print-config", print_effective, "echo the effective config");
    add_override_options(run, ov);

    auto *oracle = app.add_subcommand("oracle-check",
                                      "compare against the exact enumeration posterior (K <= 12)");
    oracle->add_option("--config", config_path, "flat key = value config file");
    oracle->add_option("--mode", mode, "block (exactness required) or loopy (diagnostic)")
        ->check(CLI::IsMember({"block", "loopy"}));
    oracle->add_flag("--print-config", print_effective, "echo the effective config");
    add_override_options(oracle, ov);

    auto *single = app.add_subcommand("single", "run one trial at the first d0/RSNR point");
    single->add_option("--config", config_path, "flat key = value config file");
    single->add_flag("--trace", trace, "print per-iteration records (one JSON object per line)");
    single->add_option("--trial-index", trial_index, "which trial draw to use")
        ->check(CLI::NonNegativeNumber);
    single->add_option("--dump-channel", dump_path, "write geometry+channel JSON fixture here");
    single->add_flag("--print-config", print_effective, "echo the effective config");
    add_override_options(single, ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed())
            return run_cmd(config_path, ov, print_effective, out_path, format);
        if (oracle->parsed())
            return oracle_cmd(config_path, ov, print_effective, mode);
        return single_cmd(config_path, ov, print_effective, trace, trial_index, dump_path);
    } catch (const bgmp::IoError &e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const bgmp::NumericalError &e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
