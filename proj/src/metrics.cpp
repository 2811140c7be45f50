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

#include "bgmp/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace bgmp {

double mse(const Eigen::VectorXd &x_true, const Eigen::VectorXd &x_hat) {
    if (x_true.size() != x_hat.size() || x_true.size() == 0)
        throw std::invalid_argument("mse: vectors must be nonempty and of equal length");
    return (x_true - x_hat).squaredNorm() / static_cast<double>(x_true.size());
}

double use_rate(const Eigen::VectorXi &lambda_true, const Eigen::VectorXi &lambda_hat) {
    if (lambda_true.size() != lambda_hat.size() || lambda_true.size() == 0)
        throw std::invalid_argument("use_rate: vectors must be nonempty and of equal length");
    return (lambda_true - lambda_hat).cwiseAbs().sum() /
           static_cast<double>(lambda_true.size());
}

double to_db(double linear) {
    if (!(linear > 0.0))
        throw std::invalid_argument("to_db: value must be positive");
    return 10.0 * std::log10(linear);
}

double from_db(double db) { return std::pow(10.0, db / 10.0); }

double RunningStat::half_width() const {
    if (n < 2)
        return 0.0;
    return 1.959963985 * std::sqrt(variance() / static_cast<double>(n));
}

} // namespace bgmp
