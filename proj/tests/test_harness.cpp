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

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <unistd.h>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bgmp/errors.hpp"
#include "bgmp/harness.hpp"
#include "bgmp/source.hpp"

using namespace bgmp;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.m_rrh = 5;
    c.k_users = 8;
    c.n_antennas = 2;
    c.side_length_km = 2.5;
    c.d0_km = {1.6};
    c.rsnr_db = {15.0};
    c.trials = 6;
    c.seed = 42;
    return c;
}

std::string temp_path(const std::string &name) {
    return std::string("/tmp/bgmp_test_") + std::to_string(::getpid()) + "_" + name;
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << text;
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep))
        out.push_back(field);
    return out;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("detector names round trip") {
    for (auto d : {Detector::bgmp, Detector::ga_mmse, Detector::ga_smmse, Detector::smmse})
        CHECK(detector_from_name(detector_name(d)) == d);
    CHECK_THROWS_AS(detector_from_name("zf"), std::invalid_argument);
}

TEST_CASE("experiment output is byte-for-byte reproducible") {
    const auto c = small_config();
    const auto t1 = run_experiment(c);
    const auto t2 = run_experiment(c);
    CHECK(t1.rows.size() == 4); // one sweep point, four detectors
    CHECK(to_csv(t1) == to_csv(t2));
}

TEST_CASE("results do not depend on the worker count") {
    const auto c = small_config();
    ::setenv("BGMP_WORKERS", "1", 1);
    const auto serial = to_csv(run_experiment(c));
    ::setenv("BGMP_WORKERS", "4", 1);
    const auto parallel = to_csv(run_experiment(c));
    ::unsetenv("BGMP_WORKERS");
    CHECK(serial == parallel);
}

TEST_CASE("detector subsets see the same trials") {
    auto c = small_config();
    const auto full = run_experiment(c);
    c.detectors = {Detector::bgmp};
    const auto solo = run_experiment(c);
    REQUIRE(solo.rows.size() == 1);
    const ResultRow *bgmp_row = nullptr;
    for (const auto &r : full.rows)
        if (r.detector == "bgmp")
            bgmp_row = &r;
    REQUIRE(bgmp_row != nullptr);
    CHECK(solo.rows[0].mse_db_mean == bgmp_row->mse_db_mean);
    CHECK(solo.rows[0].use_mean == bgmp_row->use_mean);
    CHECK(solo.rows[0].iters_mean == bgmp_row->iters_mean);
    CHECK(solo.rows[0].edge_updates_total == bgmp_row->edge_updates_total);
}

TEST_CASE("realized connectivity grows with the neighborhood radius") {
    auto c = small_config();
    c.d0_km = {0.8, 1.5, 2.2};
    c.detectors = {Detector::smmse};
    c.trials = 4;
    const auto table = run_experiment(c);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].realized_gamma_mean <= table.rows[1].realized_gamma_mean);
    CHECK(table.rows[1].realized_gamma_mean <= table.rows[2].realized_gamma_mean);
    CHECK(table.rows[0].realized_gamma_mean > 0.0);
    CHECK(table.rows[2].realized_gamma_mean <= 1.0);
}

TEST_CASE("aggregated edge updates equal the per-trial sums") {
    auto c = small_config();
    c.detectors = {Detector::bgmp};
    c.trials = 4;
    const auto table = run_experiment(c);
    REQUIRE(table.rows.size() == 1);

    const double energy = mean_channel_energy(c);
    const double sigma_n2 =
        calibrate_noise_from_energy(energy, c.m_rrh * c.n_antennas, c.p_tx, c.rsnr_db[0]);
    std::uint64_t updates = 0;
    double iters = 0.0;
    for (int t = 0; t < c.trials; ++t) {
        const auto rec = run_trial(c, c.d0_km[0], sigma_n2, t, false);
        REQUIRE(rec.outcomes.size() == 1);
        updates += rec.outcomes[0].edge_updates;
        iters += rec.outcomes[0].metrics.iterations_used;
        // the exact two-sweeps-per-iteration accounting, trial by trial
        CHECK(rec.outcomes[0].edge_updates ==
              2 * static_cast<std::uint64_t>(rec.edges) *
                  static_cast<std::uint64_t>(rec.outcomes[0].metrics.iterations_used));
    }
    CHECK(table.rows[0].edge_updates_total == updates);
    CHECK(table.rows[0].iters_mean == doctest::Approx(iters / c.trials).epsilon(1e-12));
}

TEST_CASE("single-trial noise calibration hits the target level") {
    auto c = small_config();
    c.trials = 1;
    const double energy = mean_channel_energy(c);
    const double sigma_n2 =
        calibrate_noise_from_energy(energy, c.m_rrh * c.n_antennas, c.p_tx, 18.0);
    const auto rec = run_trial(c, c.d0_km[0], sigma_n2, 0, false);
    for (const auto &out : rec.outcomes)
        CHECK(out.metrics.rsnr_db == doctest::Approx(18.0).epsilon(1e-9));
    CHECK(rec.sigma_n2 == sigma_n2);
}

TEST_CASE("pinned geometry keeps the network fixed across trials") {
    auto c = small_config();
    c.fixed_geometry = true;
    c.detectors = {Detector::bgmp};
    const double sigma_n2 = calibrate_noise_from_energy(
        mean_channel_energy(c), c.m_rrh * c.n_antennas, c.p_tx, c.rsnr_db[0]);
    const auto r0 = run_trial(c, c.d0_km[0], sigma_n2, 0, false);
    const auto r1 = run_trial(c, c.d0_km[0], sigma_n2, 1, false);
    CHECK(r0.realized_gamma == r1.realized_gamma);
    CHECK(r0.edges == r1.edges);
    // fading still varies, so the trials are not clones of each other
    CHECK(r0.outcomes[0].metrics.mse != r1.outcomes[0].metrics.mse);
}

TEST_CASE("csv and json emitters agree field by field") {
    const auto c = small_config();
    const auto table = run_experiment(c);
    const auto csv_path = temp_path("out.csv");
    const auto json_path = temp_path("out.json");
    emit(table, EmitFormat::csv, csv_path);
    emit(table, EmitFormat::json, json_path);

    const auto csv = read_file(csv_path);
    const auto parsed = nlohmann::json::parse(read_file(json_path));
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == table.rows.size());

    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "d0_km,realized_gamma_mean,rsnr_db,detector,mse_db_mean,mse_ci_db,"
                    "use_mean,use_ci,iters_mean,edge_updates_total");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        std::string line;
        REQUIRE(std::getline(lines, line));
        const auto fields = split(line, ',');
        REQUIRE(fields.size() == 10);
        const auto &j = parsed[i];
        CHECK(fields[3] == j["detector"].get<std::string>());
        CHECK(std::stod(fields[0]) == doctest::Approx(j["d0_km"].get<double>()).epsilon(1e-12));
        CHECK(std::stod(fields[4]) ==
              doctest::Approx(j["mse_db_mean"].get<double>()).epsilon(1e-12));
        CHECK(std::stoull(fields[9]) == j["edge_updates_total"].get<std::uint64_t>());
        // emitted values reproduce the in-memory table at format precision
        CHECK(std::abs(std::stod(fields[4]) - table.rows[i].mse_db_mean) <=
              1e-8 * std::max(1.0, std::abs(table.rows[i].mse_db_mean)));
    }
    std::remove(csv_path.c_str());
    std::remove(json_path.c_str());
    CHECK_THROWS_AS(emit(table, EmitFormat::csv, "/nonexistent_dir_zzz/out.csv"), IoError);
}

TEST_CASE("validation collects every violation") {
    auto c = small_config();
    c.rho = 2.0;
    c.trials = 0;
    c.tau_max = 0;
    c.d0_km = {};
    const auto errors = validate(c);
    CHECK(errors.size() >= 4);
    auto has = [&](const std::string &needle) {
        for (const auto &e : errors)
            if (e.find(needle) != std::string::npos)
                return true;
        return false;
    };
    CHECK(has("rho"));
    CHECK(has("trials"));
    CHECK(has("tau_max"));
    CHECK(has("d0_km"));
    CHECK(validate(small_config()).empty());
    CHECK_THROWS_AS(run_experiment(c), std::invalid_argument);
}

TEST_CASE("config entries apply and reject unknown keys") {
    ExperimentConfig c;
    CHECK(apply_config_entry(c, "m_rrh", "30") == "");
    CHECK(c.m_rrh == 30);
    CHECK(apply_config_entry(c, "rsnr_db", "10, 20,30") == "");
    REQUIRE(c.rsnr_db.size() == 3);
    CHECK(c.rsnr_db[2] == 30.0);
    CHECK(apply_config_entry(c, "detectors", "bgmp,smmse") == "");
    REQUIRE(c.detectors.size() == 2);
    CHECK(c.detectors[1] == Detector::smmse);
    CHECK(apply_config_entry(c, "estimate_mode", "hard") == "");
    CHECK(c.estimate_mode == EstimateMode::hard);
    CHECK(apply_config_entry(c, "regularizer_mode", "scalar") == "");
    CHECK(c.regularizer_mode == RegularizerMode::scalar);
    CHECK(apply_config_entry(c, "fixed_geometry", "true") == "");
    CHECK(c.fixed_geometry);
    const auto err = apply_config_entry(c, "bananas", "3");
    CHECK(err.find("bananas") != std::string::npos);
    CHECK(apply_config_entry(c, "m_rrh", "not_a_number") != "");
    CHECK(apply_config_entry(c, "detectors", "bgmp,zf") != "");
}

TEST_CASE("config files parse with comments and report line numbers") {
    const auto path = temp_path("good.cfg");
    write_file(path, "# deployment\nm_rrh = 12\nk_users = 20   # inline comment\n"
                     "\nrsnr_db = 5,15\ndetectors = bgmp, ga_mmse\nfixed_geometry = true\n");
    std::vector<std::string> errors;
    const auto c = load_config_file(path, errors);
    CHECK(errors.empty());
    CHECK(c.m_rrh == 12);
    CHECK(c.k_users == 20);
    REQUIRE(c.rsnr_db.size() == 2);
    CHECK(c.rsnr_db[1] == 15.0);
    CHECK(c.detectors.size() == 2);
    CHECK(c.fixed_geometry);
    std::remove(path.c_str());

    const auto bad_path = temp_path("bad.cfg");
    write_file(bad_path, "m_rrh = 12\nthis line has no equals\nrho = chunky\n");
    errors.clear();
    load_config_file(bad_path, errors);
    REQUIRE(errors.size() == 2);
    CHECK(errors[0].find(":2:") != std::string::npos);
    CHECK(errors[1].find(":3:") != std::string::npos);
    std::remove(bad_path.c_str());

    // an unopenable file is an I/O failure, not a parse error
    errors.clear();
    CHECK_THROWS_AS(load_config_file("/no/such/file.cfg", errors), IoError);
}

TEST_CASE("printed config reloads to the same settings") {
    auto c = small_config();
    c.detectors = {Detector::bgmp, Detector::ga_smmse};
    c.estimate_mode = EstimateMode::hard;
    c.regularizer_mode = RegularizerMode::scalar;
    c.fixed_geometry = true;
    c.rsnr_db = {5.0, 25.0};
    const auto path = temp_path("roundtrip.cfg");
    write_file(path, print_config(c));
    std::vector<std::string> errors;
    const auto back = load_config_file(path, errors);
    CHECK(errors.empty());
    CHECK(back.m_rrh == c.m_rrh);
    CHECK(back.k_users == c.k_users);
    CHECK(back.n_antennas == c.n_antennas);
    CHECK(back.rho == c.rho);
    CHECK(back.side_length_km == c.side_length_km);
    CHECK(back.d0_km == c.d0_km);
    CHECK(back.rsnr_db == c.rsnr_db);
    CHECK(back.seed == c.seed);
    CHECK(back.trials == c.trials);
    CHECK(back.detectors == c.detectors);
    CHECK(back.estimate_mode == c.estimate_mode);
    CHECK(back.regularizer_mode == c.regularizer_mode);
    CHECK(back.fixed_geometry == c.fixed_geometry);
    std::remove(path.c_str());
}

TEST_CASE("block-mode oracle agreement is tight") {
    auto c = small_config();
    c.k_users = 6;
    c.trials = 8;
    c.rsnr_db = {12.0};
    const auto report = oracle_check(c, true);
    CHECK(report.block_mode);
    REQUIRE(report.rows.size() == 8);
    CHECK(report.max_prob_gap < kBlockOracleTolerance);
    CHECK(report.max_mean_gap < kBlockOracleTolerance);
    for (const auto &r : report.rows) {
        CHECK(std::isfinite(r.bgmp_mse));
        CHECK(std::isfinite(r.oracle_mse));
    }
}

TEST_CASE("loopy-mode oracle comparison reports finite gaps") {
    auto c = small_config();
    c.m_rrh = 4;
    c.k_users = 6;
    c.n_antennas = 2;
    c.trials = 4;
    c.rsnr_db = {15.0};
    const auto report = oracle_check(c, false);
    CHECK(!report.block_mode);
    REQUIRE(report.rows.size() == 4);
    CHECK(std::isfinite(report.max_prob_gap));
    CHECK(report.max_prob_gap >= 0.0);
    CHECK(report.max_prob_gap <= 1.0);
}

TEST_CASE("oracle comparison refuses oversized enumerations") {
    auto c = small_config();
    c.k_users = 13;
    CHECK_THROWS_AS(oracle_check(c, true), std::invalid_argument);
}

} // TEST_SUITE
