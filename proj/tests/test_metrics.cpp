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

#include <cmath>
#include <random>

#include "bgmp/metrics.hpp"

using namespace bgmp;

TEST_SUITE("metrics") {

TEST_CASE("mean squared error on fixed vectors") {
    Eigen::VectorXd a(3), b(3);
    a << 1.0, 2.0, 3.0;
    b << 1.0, 0.0, 0.0;
    CHECK(mse(a, b) == doctest::Approx((4.0 + 9.0) / 3.0).epsilon(1e-15));
    CHECK(mse(a, a) == 0.0);
    CHECK_THROWS_AS(mse(a, Eigen::VectorXd::Zero(2)), std::invalid_argument);
    CHECK_THROWS_AS(mse(Eigen::VectorXd{}, Eigen::VectorXd{}), std::invalid_argument);
}

TEST_CASE("error is invariant under a common permutation") {
    std::mt19937_64 eng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::VectorXd a(6), b(6);
    for (int i = 0; i < 6; ++i) {
        a[i] = n(eng);
        b[i] = n(eng);
    }
    Eigen::VectorXd ap(6), bp(6);
    const int perm[6] = {3, 0, 5, 1, 4, 2};
    for (int i = 0; i < 6; ++i) {
        ap[i] = a[perm[i]];
        bp[i] = b[perm[i]];
    }
    CHECK(mse(ap, bp) == doctest::Approx(mse(a, b)).epsilon(1e-15));
}

TEST_CASE("support error counts disagreements") {
    Eigen::VectorXi est(5), truth(5);
    est << 1, 0, 1, 0, 1;
    truth << 1, 1, 0, 0, 1;
    CHECK(use_rate(est, truth) == doctest::Approx(2.0 / 5.0).epsilon(1e-15));
    CHECK(use_rate(truth, truth) == 0.0);
    // scaled by the length it is always an integer
    const double scaled = use_rate(est, truth) * 5.0;
    CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
    CHECK_THROWS_AS(use_rate(est, Eigen::VectorXi::Zero(4)), std::invalid_argument);
}

TEST_CASE("decibel conversions") {
    CHECK(to_db(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(to_db(1.0) == 0.0);
    CHECK(from_db(20.0) == doctest::Approx(100.0).epsilon(1e-15));
    for (double v : {1e-8, 0.5, 3.0, 4096.0})
        CHECK(from_db(to_db(v)) == doctest::Approx(v).epsilon(1e-12));
    CHECK_THROWS_AS(to_db(0.0), std::invalid_argument);
    CHECK_THROWS_AS(to_db(-1.0), std::invalid_argument);
}

TEST_CASE("running statistics match direct formulas") {
    std::mt19937_64 eng(9);
    std::uniform_real_distribution<double> u(-2.0, 5.0);
    std::vector<double> xs(257);
    RunningStat rs;
    double sum = 0.0;
    for (auto &x : xs) {
        x = u(eng);
        rs.add(x);
        sum += x;
    }
    const double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    const double var = ss / static_cast<double>(xs.size() - 1);
    CHECK(rs.n == xs.size());
    CHECK(rs.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(rs.variance() == doctest::Approx(var).epsilon(1e-12));
    CHECK(rs.half_width() ==
          doctest::Approx(1.959963985 * std::sqrt(var / static_cast<double>(xs.size())))
              .epsilon(1e-9));
}

TEST_CASE("running statistics degenerate cases") {
    RunningStat rs;
    CHECK(rs.n == 0);
    rs.add(4.0);
    CHECK(rs.mean == 4.0);
    CHECK(rs.variance() == 0.0);
    CHECK(rs.half_width() == 0.0);
    rs.add(4.0);
    CHECK(rs.variance() == 0.0);
}

} // TEST_SUITE
