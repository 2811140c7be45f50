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

#include "bgmp/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "bgmp/channel.hpp"
#include "bgmp/errors.hpp"
#include "bgmp/geometry.hpp"
#include "bgmp/rng.hpp"
#include "bgmp/source.hpp"

namespace bgmp {

std::string detector_name(Detector d) {
    switch (d) {
    case Detector::bgmp:
        return "bgmp";
    case Detector::ga_mmse:
        return "ga_mmse";
    case Detector::ga_smmse:
        return "ga_smmse";
    case Detector::smmse:
        return "smmse";
    }
    return "?";
}

Detector detector_from_name(const std::string &name) {
    if (name == "bgmp")
        return Detector::bgmp;
    if (name == "ga_mmse")
        return Detector::ga_mmse;
    if (name == "ga_smmse")
        return Detector::ga_smmse;
    if (name == "smmse")
        return Detector::smmse;
    throw std::invalid_argument("unknown detector '" + name +
                                "' (expected bgmp, ga_mmse, ga_smmse or smmse)");
}

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    return out;
}

bool parse_double(const std::string &s, double &out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_int(const std::string &s, int &out) {
    try {
        std::size_t pos = 0;
        out = std::stoi(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_u64(const std::string &s, std::uint64_t &out) {
    try {
        std::size_t pos = 0;
        out = std::stoull(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool parse_bool(const std::string &s, bool &out) {
    if (s == "true" || s == "1") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0") {
        out = false;
        return true;
    }
    return false;
}

bool parse_double_list(const std::string &s, std::vector<double> &out) {
    std::vector<double> vals;
    for (const auto &item : split_list(s)) {
        double v = 0.0;
        if (item.empty() || !parse_double(item, v))
            return false;
        vals.push_back(v);
    }
    if (vals.empty())
        return false;
    out = std::move(vals);
    return true;
}

std::string fmt9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

std::string apply_config_entry(ExperimentConfig &config, const std::string &key,
                               const std::string &value) {
    auto bad = [&] { return "invalid value '" + value + "' for key '" + key + "'"; };

    if (key == "m_rrh")
        return parse_int(value, config.m_rrh) ? "" : bad();
    if (key == "k_users")
        return parse_int(value, config.k_users) ? "" : bad();
    if (key == "n_antennas")
        return parse_int(value, config.n_antennas) ? "" : bad();
    if (key == "trials")
        return parse_int(value, config.trials) ? "" : bad();
    if (key == "tau_max")
        return parse_int(value, config.tau_max) ? "" : bad();
    if (key == "rho")
        return parse_double(value, config.rho) ? "" : bad();
    if (key == "alpha")
        return parse_double(value, config.alpha) ? "" : bad();
    if (key == "side_length_km")
        return parse_double(value, config.side_length_km) ? "" : bad();
    if (key == "tol")
        return parse_double(value, config.tol) ? "" : bad();
    if (key == "p_tx")
        return parse_double(value, config.p_tx) ? "" : bad();
    if (key == "damping")
        return parse_double(value, config.damping) ? "" : bad();
    if (key == "seed")
        return parse_u64(value, config.seed) ? "" : bad();
    if (key == "d0_km")
        return parse_double_list(value, config.d0_km) ? "" : bad();
    if (key == "rsnr_db")
        return parse_double_list(value, config.rsnr_db) ? "" : bad();
    if (key == "fixed_geometry")
        return parse_bool(value, config.fixed_geometry) ? "" : bad();
    if (key == "detectors") {
        std::vector<Detector> dets;
        try {
            for (const auto &item : split_list(value))
                dets.push_back(detector_from_name(item));
        } catch (const std::invalid_argument &e) {
            return std::string(e.what());
        }
        if (dets.empty())
            return bad();
        config.detectors = std::move(dets);
        return "";
    }
    if (key == "regularizer_mode") {
        if (value == "whitened")
            config.regularizer_mode = RegularizerMode::whitened;
        else if (value == "scalar")
            config.regularizer_mode = RegularizerMode::scalar;
        else
            return bad();
        return "";
    }
    if (key == "estimate_mode") {
        if (value == "soft")
            config.estimate_mode = EstimateMode::soft;
        else if (value == "hard")
            config.estimate_mode = EstimateMode::hard;
        else
            return bad();
        return "";
    }
    return "unknown config key '" + key + "'";
}

ExperimentConfig load_config_file(const std::string &path, std::vector<std::string> &errors) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path);
    ExperimentConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string err = apply_config_entry(config, key, value);
        if (!err.empty())
            errors.push_back(path + ":" + std::to_string(line_no) + ": " + err);
    }
    return config;
}

std::string print_config(const ExperimentConfig &c) {
    std::ostringstream out;
    auto list = [](const std::vector<double> &v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i)
                s += ", ";
            s += fmt9(v[i]);
        }
        return s;
    };
    out << "m_rrh = " << c.m_rrh << "\n";
    out << "k_users = " << c.k_users << "\n";
    out << "n_antennas = " << c.n_antennas << "\n";
    out << "rho = " << fmt9(c.rho) << "\n";
    out << "alpha = " << fmt9(c.alpha) << "\n";
    out << "side_length_km = " << fmt9(c.side_length_km) << "\n";
    out << "d0_km = " << list(c.d0_km) << "\n";
    out << "rsnr_db = " << list(c.rsnr_db) << "\n";
    out << "tau_max = " << c.tau_max << "\n";
    out << "tol = " << fmt9(c.tol) << "\n";
    out << "p_tx = " << fmt9(c.p_tx) << "\n";
    out << "damping = " << fmt9(c.damping) << "\n";
    out << "trials = " << c.trials << "\n";
    out << "seed = " << c.seed << "\n";
    out << "detectors = ";
    for (std::size_t i = 0; i < c.detectors.size(); ++i) {
        if (i)
            out << ", ";
        out << detector_name(c.detectors[i]);
    }
    out << "\n";
    out << "regularizer_mode = "
        << (c.regularizer_mode == RegularizerMode::whitened ? "whitened" : "scalar") << "\n";
    out << "estimate_mode = " << (c.estimate_mode == EstimateMode::soft ? "soft" : "hard") << "\n";
    out << "fixed_geometry = " << (c.fixed_geometry ? "true" : "false") << "\n";
    return out.str();
}

std::vector<std::string> validate(const ExperimentConfig &c) {
    std::vector<std::string> errors;
    auto req = [&](bool ok, const std::string &msg) {
        if (!ok)
            errors.push_back(msg);
    };
    req(c.m_rrh >= 1, "m_rrh must be >= 1");
    req(c.k_users >= 1, "k_users must be >= 1");
    req(c.n_antennas >= 1, "n_antennas must be >= 1");
    req(c.trials >= 1, "trials must be >= 1");
    req(c.tau_max >= 1, "tau_max must be >= 1");
    req(std::isfinite(c.rho) && c.rho > 0.0 && c.rho < 1.0, "rho must lie in (0, 1)");
    req(std::isfinite(c.alpha) && c.alpha > 0.0, "alpha must be positive");
    req(std::isfinite(c.side_length_km) && c.side_length_km > 0.0,
        "side_length_km must be positive");
    req(std::isfinite(c.tol) && c.tol > 0.0, "tol must be positive");
    req(std::isfinite(c.p_tx) && c.p_tx > 0.0, "p_tx must be positive");
    req(std::isfinite(c.damping) && c.damping >= 0.0 && c.damping < 1.0,
        "damping must lie in [0, 1)");
    req(!c.d0_km.empty(), "d0_km must contain at least one value");
    for (double d : c.d0_km)
        req(std::isfinite(d) && d >= 0.0, "d0_km values must be >= 0");
    req(!c.rsnr_db.empty(), "rsnr_db must contain at least one value");
    for (double r : c.rsnr_db)
        req(std::isfinite(r), "rsnr_db values must be finite");
    req(!c.detectors.empty(), "detectors must contain at least one entry");
    return errors;
}

double mean_channel_energy(const ExperimentConfig &config) {
    double total = 0.0;
    for (int t = 0; t < config.trials; ++t) {
        const std::uint64_t gi = config.fixed_geometry ? 0 : static_cast<std::uint64_t>(t);
        NetworkGeometry geom = place_nodes(config.m_rrh, config.k_users, config.side_length_km,
                                           derive_seed(config.seed, Stream::geometry, gi));
        geom.alpha = config.alpha;
        const Eigen::MatrixXd h = build_channel(
            geom, config.n_antennas,
            derive_seed(config.seed, Stream::fading, static_cast<std::uint64_t>(t)));
        total += h.squaredNorm();
    }
    return total / static_cast<double>(config.trials);
}

TrialRecord run_trial(const ExperimentConfig &config, double d0, double sigma_n2, int trial_index,
                      bool with_trace) {
    const auto t = static_cast<std::uint64_t>(trial_index);
    const std::uint64_t gi = config.fixed_geometry ? 0 : t;

    NetworkGeometry geom = place_nodes(config.m_rrh, config.k_users, config.side_length_km,
                                       derive_seed(config.seed, Stream::geometry, gi));
    geom.alpha = config.alpha;
    geom.d0 = d0;

    const Eigen::MatrixXd h =
        build_channel(geom, config.n_antennas, derive_seed(config.seed, Stream::fading, t));
    const SourceRealization src =
        sample_source(config.k_users, config.rho, derive_seed(config.seed, Stream::activity, t));
    const Eigen::VectorXd y = transmit(h, src.x, config.p_tx, sigma_n2,
                                       derive_seed(config.seed, Stream::noise, t));

    ChannelSet channels = sparsify(h, geom);
    channels.eta_variance = interference_variances(channels.h_residual, config.p_tx, sigma_n2);
    const FactorGraph graph = build_graph(channels);

    std::vector<int> support;
    for (int k = 0; k < config.k_users; ++k)
        if (src.lambda[k])
            support.push_back(k);
    const Eigen::VectorXi all_active = Eigen::VectorXi::Ones(config.k_users);
    const double rsnr_realized = realized_rsnr_db(h, config.p_tx, sigma_n2);

    TrialRecord rec;
    rec.realized_gamma = channels.sparsity;
    rec.sigma_n2 = sigma_n2;
    rec.edges = edge_count(graph);
    rec.outcomes.reserve(config.detectors.size());

    for (Detector det : config.detectors) {
        DetectorOutcome out;
        out.detector = det;
        out.metrics.rsnr_db = rsnr_realized;
        switch (det) {
        case Detector::bgmp: {
            BgmpConfig bc;
            bc.tau_max = config.tau_max;
            bc.tol = config.tol;
            bc.p_tx = config.p_tx;
            bc.damping = config.damping;
            bc.soft_estimate = config.estimate_mode == EstimateMode::soft;
            const GroundTruth truth{src.x, src.lambda};
            DetectionResult res = run_bgmp(y, graph, channels.eta_variance,
                                           Priors::bernoulli_gaussian(config.rho), bc,
                                           with_trace ? &truth : nullptr);
            out.metrics.mse = mse(src.x, res.x_hat);
            out.metrics.use_rate = use_rate(src.lambda, res.lambda_hat);
            out.metrics.iterations_used = res.iterations_used;
            out.edge_updates = res.edge_updates;
            rec.bgmp_detail = std::move(res);
            break;
        }
        case Detector::ga_mmse: {
            const Eigen::VectorXd x_hat =
                ga_mmse(h, y, support, sigma_n2, config.rho, config.p_tx);
            out.metrics.mse = mse(src.x, x_hat);
            out.metrics.use_rate = 0.0; // support is genie-provided
            break;
        }
        case Detector::ga_smmse: {
            const Eigen::VectorXd x_hat =
                ga_smmse(channels.h_sparse, y, support, channels.eta_variance, config.rho,
                         config.p_tx, config.regularizer_mode);
            out.metrics.mse = mse(src.x, x_hat);
            out.metrics.use_rate = 0.0;
            break;
        }
        case Detector::smmse: {
            const Eigen::VectorXd x_hat = smmse(channels.h_sparse, y, channels.eta_variance,
                                                config.rho, config.p_tx,
                                                config.regularizer_mode);
            out.metrics.mse = mse(src.x, x_hat);
            // No activity decision of its own; scored as "everyone active".
            out.metrics.use_rate = use_rate(src.lambda, all_active);
            break;
        }
        }
        rec.outcomes.push_back(std::move(out));
    }
    return rec;
}

namespace {

int worker_count(int trials) {
    int w = 0;
    if (const char *env = std::getenv("BGMP_WORKERS")) {
        w = std::atoi(env);
        if (w < 1)
            w = 1;
    } else {
        w = static_cast<int>(std::thread::hardware_concurrency());
        if (w < 1)
            w = 1;
    }
    return std::min(w, trials);
}

std::vector<TrialRecord> run_point(const ExperimentConfig &config, double d0, double sigma_n2) {
    std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));
    const int workers = worker_count(config.trials);
    if (workers <= 1) {
        for (int t = 0; t < config.trials; ++t)
            records[static_cast<std::size_t>(t)] = run_trial(config, d0, sigma_n2, t, false);
        return records;
    }

    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto body = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= config.trials)
                return;
            try {
                records[static_cast<std::size_t>(t)] = run_trial(config, d0, sigma_n2, t, false);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back(body);
    for (auto &th : pool)
        th.join();
    if (first_error)
        std::rethrow_exception(first_error);
    return records;
}

std::string join_errors(const std::vector<std::string> &errors) {
    std::string msg = "invalid experiment config:";
    for (const auto &e : errors)
        msg += "\n  - " + e;
    return msg;
}

} // namespace

ResultsTable run_experiment(const ExperimentConfig &config) {
    const auto errors = validate(config);
    if (!errors.empty())
        throw std::invalid_argument(join_errors(errors));

    const double energy = mean_channel_energy(config);
    const auto rows = static_cast<Eigen::Index>(config.m_rrh) * config.n_antennas;

    ResultsTable table;
    for (double d0 : config.d0_km) {
        for (double rsnr : config.rsnr_db) {
            const double sigma_n2 =
                calibrate_noise_from_energy(energy, rows, config.p_tx, rsnr);
            const std::vector<TrialRecord> records = run_point(config, d0, sigma_n2);

            RunningStat gamma_stat;
            for (const auto &rec : records)
                gamma_stat.add(rec.realized_gamma);

            for (std::size_t di = 0; di < config.detectors.size(); ++di) {
                RunningStat mse_stat, use_stat, iter_stat;
                std::uint64_t updates = 0;
                for (const auto &rec : records) {
                    const auto &out = rec.outcomes[di];
                    mse_stat.add(out.metrics.mse);
                    use_stat.add(out.metrics.use_rate);
                    iter_stat.add(static_cast<double>(out.metrics.iterations_used));
                    updates += out.edge_updates;
                }
                ResultRow row;
                row.d0_km = d0;
                row.realized_gamma_mean = gamma_stat.mean;
                row.rsnr_db = rsnr;
                row.detector = detector_name(config.detectors[di]);
                const double m = std::max(mse_stat.mean, 1e-300);
                row.mse_db_mean = to_db(m);
                row.mse_ci_db = to_db((m + mse_stat.half_width()) / m);
                row.use_mean = use_stat.mean;
                row.use_ci = use_stat.half_width();
                row.iters_mean = iter_stat.mean;
                row.edge_updates_total = updates;
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

std::string to_csv(const ResultsTable &table) {
    std::string out = "d0_km,realized_gamma_mean,rsnr_db,detector,mse_db_mean,mse_ci_db,"
                      "use_mean,use_ci,iters_mean,edge_updates_total\n";
    for (const auto &r : table.rows) {
        out += fmt9(r.d0_km) + "," + fmt9(r.realized_gamma_mean) + "," + fmt9(r.rsnr_db) + "," +
               r.detector + "," + fmt9(r.mse_db_mean) + "," + fmt9(r.mse_ci_db) + "," +
               fmt9(r.use_mean) + "," + fmt9(r.use_ci) + "," + fmt9(r.iters_mean) + "," +
               std::to_string(r.edge_updates_total) + "\n";
    }
    return out;
}

std::string to_json(const ResultsTable &table) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto &r = table.rows[i];
        out += "  {\"d0_km\": " + fmt9(r.d0_km) +
               ", \"realized_gamma_mean\": " + fmt9(r.realized_gamma_mean) +
               ", \"rsnr_db\": " + fmt9(r.rsnr_db) + ", \"detector\": \"" + r.detector +
               "\", \"mse_db_mean\": " + fmt9(r.mse_db_mean) +
               ", \"mse_ci_db\": " + fmt9(r.mse_ci_db) + ", \"use_mean\": " + fmt9(r.use_mean) +
               ", \"use_ci\": " + fmt9(r.use_ci) + ", \"iters_mean\": " + fmt9(r.iters_mean) +
               ", \"edge_updates_total\": " + std::to_string(r.edge_updates_total) + "}";
        out += (i + 1 < table.rows.size()) ? ",\n" : "\n";
    }
    out += "]\n";
    return out;
}

void emit(const ResultsTable &table, EmitFormat format, const std::string &path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("emit: cannot open " + path);
    out << (format == EmitFormat::csv ? to_csv(table) : to_json(table));
    if (!out)
        throw IoError("emit: write failed for " + path);
}

OracleReport oracle_check(const ExperimentConfig &config, bool block_mode) {
    if (config.k_users > 12)
        throw std::invalid_argument(
            "oracle_check: exact enumeration is limited to k_users <= 12, got " +
            std::to_string(config.k_users));
    const auto errors = validate(config);
    if (!errors.empty())
        throw std::invalid_argument(join_errors(errors));

    const double rsnr = config.rsnr_db.front();
    const double d0 = config.d0_km.front();
    const Priors priors = Priors::bernoulli_gaussian(config.rho);
    BgmpConfig bc;
    bc.tau_max = config.tau_max;
    bc.tol = config.tol;
    bc.p_tx = config.p_tx;
    bc.damping = config.damping;
    bc.soft_estimate = config.estimate_mode == EstimateMode::soft;

    OracleReport report;
    report.block_mode = block_mode;

    for (int trial = 0; trial < config.trials; ++trial) {
        const auto t = static_cast<std::uint64_t>(trial);
        Eigen::MatrixXd h_sparse;
        Eigen::VectorXd y, eta;
        ChannelSet channels;
        SourceRealization src;

        if (block_mode) {
            // One private antenna per user: the graph is a forest of depth-1
            // trees, where message passing reproduces the posterior exactly.
            const int k = config.k_users;
            auto eng = make_engine(config.seed, Stream::fading, t);
            std::uniform_real_distribution<double> mag(0.5, 1.5);
            std::bernoulli_distribution flip(0.5);
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k, k);
            for (int j = 0; j < k; ++j) {
                const double m = mag(eng);
                h(j, j) = flip(eng) ? -m : m;
            }
            src = sample_source(k, config.rho, derive_seed(config.seed, Stream::activity, t));
            const double sigma_n2 = calibrate_noise(h, config.p_tx, rsnr);
            y = transmit(h, src.x, config.p_tx, sigma_n2,
                         derive_seed(config.seed, Stream::noise, t));
            channels.h_full = h;
            channels.h_sparse = h;
            channels.h_residual = Eigen::MatrixXd::Zero(k, k);
            channels.n_antennas = 1;
            channels.sparsity = 1.0 / static_cast<double>(k);
            channels.eta_variance = Eigen::VectorXd::Constant(k, sigma_n2);
        } else {
            NetworkGeometry geom =
                place_nodes(config.m_rrh, config.k_users, config.side_length_km,
                            derive_seed(config.seed, Stream::geometry, t));
            geom.alpha = config.alpha;
            geom.d0 = d0;
            const Eigen::MatrixXd h = build_channel(
                geom, config.n_antennas, derive_seed(config.seed, Stream::fading, t));
            src = sample_source(config.k_users, config.rho,
                                derive_seed(config.seed, Stream::activity, t));
            const double sigma_n2 = calibrate_noise(h, config.p_tx, rsnr);
            y = transmit(h, src.x, config.p_tx, sigma_n2,
                         derive_seed(config.seed, Stream::noise, t));
            channels = sparsify(h, geom);
            channels.eta_variance =
                interference_variances(channels.h_residual, config.p_tx, sigma_n2);
        }
        h_sparse = channels.h_sparse;
        eta = channels.eta_variance;
        const FactorGraph graph = build_graph(channels);

        const DetectionResult res = run_bgmp(y, graph, eta, priors, bc, nullptr);
        // The oracle solves the same surrogate model the message passing sees:
        // kept links only, dropped links folded into the noise variances.
        const PosteriorSummary exact =
            exact_posterior_oracle(std::sqrt(config.p_tx) * h_sparse, y, eta, config.rho);

        OracleCheckRow row;
        row.trial = trial;
        row.max_prob_gap = (res.posterior_prob - exact.activity_prob).cwiseAbs().maxCoeff();
        const Eigen::VectorXd bgmp_mean_x =
            res.posterior_prob.cwiseProduct(res.posterior_mean);
        row.max_mean_gap = (bgmp_mean_x - exact.mean_x).cwiseAbs().maxCoeff();
        row.bgmp_mse = mse(src.x, res.x_hat);
        row.oracle_mse = mse(src.x, exact.mean_x);
        report.rows.push_back(row);
        report.max_prob_gap = std::max(report.max_prob_gap, row.max_prob_gap);
        report.max_mean_gap = std::max(report.max_mean_gap, row.max_mean_gap);
    }
    return report;
}

} // namespace bgmp
