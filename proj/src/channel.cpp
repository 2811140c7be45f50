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

#include "bgmp/channel.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "bgmp/errors.hpp"
#include "bgmp/rng.hpp"

namespace bgmp {

Eigen::MatrixXd build_channel(const NetworkGeometry &geom, int n_antennas, std::uint64_t seed) {
    const auto m_rrh = geom.num_rrh();
    const auto k_users = geom.num_users();
    if (m_rrh == 0 || k_users == 0)
        throw std::invalid_argument("build_channel: geometry has no nodes");
    if (n_antennas < 1)
        throw std::invalid_argument("build_channel: n_antennas must be >= 1");
    if (!(geom.alpha > 0.0))
        throw std::invalid_argument("build_channel: path-loss exponent must be positive");

    auto eng = make_engine(seed, Stream::fading);
    std::normal_distribution<double> fading(0.0, std::sqrt(1.0 / static_cast<double>(k_users)));

    Eigen::MatrixXd h(static_cast<Eigen::Index>(m_rrh) * n_antennas,
                      static_cast<Eigen::Index>(k_users));
    for (std::size_t k = 0; k < k_users; ++k) {
        for (std::size_t m = 0; m < m_rrh; ++m) {
            const double gain = std::pow(geom.distance(m, k), -geom.alpha);
            for (int n = 0; n < n_antennas; ++n)
                h(static_cast<Eigen::Index>(m) * n_antennas + n,
                  static_cast<Eigen::Index>(k)) = fading(eng) * gain;
        }
    }
    return h;
}

ChannelSet sparsify(const Eigen::MatrixXd &h_full, const NetworkGeometry &geom) {
    const auto m_rrh = static_cast<Eigen::Index>(geom.num_rrh());
    const auto k_users = static_cast<Eigen::Index>(geom.num_users());
    if (m_rrh == 0 || k_users == 0)
        throw std::invalid_argument("sparsify: geometry has no nodes");
    if (h_full.cols() != k_users)
        throw std::invalid_argument("sparsify: channel column count does not match user count");
    if (h_full.rows() == 0 || h_full.rows() % m_rrh != 0)
        throw std::invalid_argument("sparsify: channel row count is not a multiple of the RRH count");
    if (!(geom.d0 >= 0.0))
        throw std::invalid_argument("sparsify: coverage threshold d0 must be >= 0");

    const Eigen::Index n = h_full.rows() / m_rrh;

    ChannelSet out;
    out.n_antennas = static_cast<int>(n);
    out.h_full = h_full;
    out.h_sparse = Eigen::MatrixXd::Zero(h_full.rows(), h_full.cols());
    out.h_residual = h_full;

    for (Eigen::Index m = 0; m < m_rrh; ++m) {
        for (Eigen::Index k = 0; k < k_users; ++k) {
            if (geom.distance(static_cast<std::size_t>(m), static_cast<std::size_t>(k)) < geom.d0) {
                out.h_sparse.block(m * n, k, n, 1) = h_full.block(m * n, k, n, 1);
                out.h_residual.block(m * n, k, n, 1).setZero();
            }
        }
    }

    const auto nonzeros = (out.h_sparse.array() != 0.0).count();
    out.sparsity = static_cast<double>(nonzeros) /
                   (static_cast<double>(h_full.rows()) * static_cast<double>(h_full.cols()));
    return out;
}

Eigen::VectorXd interference_variances(const Eigen::MatrixXd &h_residual, double p_tx,
                                       double sigma_n2) {
    if (!(p_tx > 0.0))
        throw std::invalid_argument("interference_variances: p_tx must be positive");
    if (!(sigma_n2 >= 0.0))
        throw std::invalid_argument("interference_variances: sigma_n2 must be >= 0");
    return (p_tx * h_residual.array().square().rowwise().sum() + sigma_n2).matrix();
}

void write_channel_json(const NetworkGeometry &geom, const ChannelSet &channels,
                        const std::string &path) {
    nlohmann::json j;
    j["side_length_km"] = geom.side_length;
    j["alpha"] = geom.alpha;
    j["d0_km"] = geom.d0;
    j["n_antennas"] = channels.n_antennas;
    j["sparsity"] = channels.sparsity;
    j["rows"] = channels.h_full.rows();
    j["cols"] = channels.h_full.cols();

    auto points = [](const std::vector<Point> &ps) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &p : ps)
            arr.push_back({p.x, p.y});
        return arr;
    };
    j["rrh_positions"] = points(geom.rrh_positions);
    j["user_positions"] = points(geom.user_positions);

    auto flat = [](const Eigen::MatrixXd &m) {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(m.size()));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                v.push_back(m(r, c));
        return v;
    };
    j["h_full"] = flat(channels.h_full);
    j["h_sparse"] = flat(channels.h_sparse);
    if (channels.eta_variance.size() > 0)
        j["eta_variance"] = std::vector<double>(channels.eta_variance.data(),
                                                channels.eta_variance.data() +
                                                    channels.eta_variance.size());

    std::ofstream out(path);
    if (!out)
        throw IoError("write_channel_json: cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out)
        throw IoError("write_channel_json: write failed for " + path);
}

} // namespace bgmp
