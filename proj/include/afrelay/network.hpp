// SPDX-License-Identifier: Apache-2.0
//
// afrelay: amplify-and-forward space-time coded relay network workbench
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#ifndef AFRELAY_NETWORK_HPP
#define AFRELAY_NETWORK_HPP

#include "errors.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace afrelay
{

using cplx = std::complex<double>;

// ------------------------------------------------------------------------
// NetworkConfig
// ------------------------------------------------------------------------

// Static description of a source (Ns antennas) -> R single-antenna relays -> destination
// (Nd antennas) network. Variances are per relay; antennas of one terminal share them.
struct NetworkConfig
{
    int num_relays = 2;                 // R
    int src_antennas = 2;               // Ns
    int dst_antennas = 1;               // Nd
    int block_len = 4;                  // T (coherence block, full-rate code so K = T)
    std::vector<double> sigma_f_sq{1.0, 1.0}; // source -> relay r link variance
    std::vector<double> sigma_g_sq{1.0, 1.0}; // relay r -> destination link variance
    double noise1 = 1.0;                // N1, relay noise power
    double noise2 = 1.0;                // N2, destination noise power
    double total_power = 100.0;         // P, split between the two phases

    static NetworkConfig uniform(int R, int Ns, int Nd, int T = 4, double sigma_f2 = 1.0,
                                 double sigma_g2 = 1.0, double n1 = 1.0, double n2 = 1.0,
                                 double P = 100.0)
    {
        NetworkConfig c;
        c.num_relays = R;
        c.src_antennas = Ns;
        c.dst_antennas = Nd;
        c.block_len = T;
        c.sigma_f_sq.assign(static_cast<std::size_t>(std::max(R, 0)), sigma_f2);
        c.sigma_g_sq.assign(static_cast<std::size_t>(std::max(R, 0)), sigma_g2);
        c.noise1 = n1;
        c.noise2 = n2;
        c.total_power = P;
        return c;
    }

    void validate() const
    {
        if (num_relays < 1)
            throw ConfigError("num_relays", "must be >= 1");
        if (src_antennas < 1)
            throw ConfigError("src_antennas", "must be >= 1");
        if (dst_antennas < 1)
            throw ConfigError("dst_antennas", "must be >= 1");
        if (block_len < 1)
            throw ConfigError("block_len", "must be >= 1");
        if (block_len < src_antennas || block_len < num_relays)
            throw ConfigError("block_len", "must be >= src_antennas and >= num_relays");
        if (static_cast<int>(sigma_f_sq.size()) != num_relays)
            throw ConfigError("sigma_f_sq", "length must equal num_relays");
        if (static_cast<int>(sigma_g_sq.size()) != num_relays)
            throw ConfigError("sigma_g_sq", "length must equal num_relays");
        for (double v : sigma_f_sq)
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError("sigma_f_sq", "entries must be finite and > 0");
        for (double v : sigma_g_sq)
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError("sigma_g_sq", "entries must be finite and > 0");
        if (!(noise1 > 0.0) || !std::isfinite(noise1))
            throw ConfigError("noise1", "must be finite and > 0");
        if (!(noise2 > 0.0) || !std::isfinite(noise2))
            throw ConfigError("noise2", "must be finite and > 0");
        if (!(total_power > 0.0) || !std::isfinite(total_power))
            throw ConfigError("total_power", "must be finite and > 0");
    }

    bool is_homogeneous() const
    {
        for (int r = 1; r < num_relays; ++r)
            if (sigma_f_sq[r] != sigma_f_sq[0] || sigma_g_sq[r] != sigma_g_sq[0])
                return false;
        return true;
    }

    bool operator==(const NetworkConfig &) const = default;
};

// Experiments use SNR[dB] = 10 log10(P / N1)
inline double snr_db_to_total_power(double snr_db, double noise1)
{
    return noise1 * std::pow(10.0, snr_db / 10.0);
}

inline double total_power_to_snr_db(double total_power, double noise1)
{
    return 10.0 * std::log10(total_power / noise1);
}

inline NetworkConfig with_snr_db(NetworkConfig c, double snr_db)
{
    c.total_power = snr_db_to_total_power(snr_db, c.noise1);
    return c;
}

inline void to_json(nlohmann::json &j, const NetworkConfig &c)
{
    j = nlohmann::json{{"num_relays", c.num_relays},     {"src_antennas", c.src_antennas},
                       {"dst_antennas", c.dst_antennas}, {"block_len", c.block_len},
                       {"sigma_f_sq", c.sigma_f_sq},     {"sigma_g_sq", c.sigma_g_sq},
                       {"noise1", c.noise1},             {"noise2", c.noise2},
                       {"total_power", c.total_power}};
}

// Missing keys keep their defaults; per-relay lists given as a scalar are broadcast.
inline void from_json(const nlohmann::json &j, NetworkConfig &c)
{
    auto get_int = [&](const char *key, int &out) {
        if (!j.contains(key))
            return;
        if (!j.at(key).is_number_integer())
            throw ConfigError(key, "must be an integer");
        out = j.at(key).get<int>();
    };
    auto get_real = [&](const char *key, double &out) {
        if (!j.contains(key))
            return;
        if (!j.at(key).is_number())
            throw ConfigError(key, "must be a number");
        out = j.at(key).get<double>();
    };
    auto get_list = [&](const char *key, std::vector<double> &out) {
        if (!j.contains(key))
        {
            out.assign(static_cast<std::size_t>(std::max(c.num_relays, 0)), out.empty() ? 1.0 : out.front());
            return;
        }
        const auto &v = j.at(key);
        if (v.is_number())
            out.assign(static_cast<std::size_t>(std::max(c.num_relays, 0)), v.get<double>());
        else if (v.is_array())
        {
            out.clear();
            for (const auto &e : v)
            {
                if (!e.is_number())
                    throw ConfigError(key, "entries must be numbers");
                out.push_back(e.get<double>());
            }
        }
        else
            throw ConfigError(key, "must be a number or a list of numbers");
    };
    if (!j.is_object())
        throw ConfigError("config", "must be a JSON object");
    get_int("num_relays", c.num_relays);
    get_int("src_antennas", c.src_antennas);
    get_int("dst_antennas", c.dst_antennas);
    get_int("block_len", c.block_len);
    get_list("sigma_f_sq", c.sigma_f_sq);
    get_list("sigma_g_sq", c.sigma_g_sq);
    get_real("noise1", c.noise1);
    get_real("noise2", c.noise2);
    get_real("total_power", c.total_power);
}

// ------------------------------------------------------------------------
// Channel
// ------------------------------------------------------------------------

struct ChannelRealization
{
    Eigen::MatrixXcd f; // Ns x R, f(i, r) = f_{i,r}
    Eigen::MatrixXcd g; // R x Nd, g(r, j) = g_{r,j}

    double f_norm_sq(int r) const { return f.col(r).squaredNorm(); }
    double g_norm_sq(int r) const { return g.row(r).squaredNorm(); }
    // max_n |f_{n,r}|^2
    double f_max_sq(int r) const { return f.col(r).cwiseAbs2().maxCoeff(); }
};

inline void check_channel(const NetworkConfig &config, const ChannelRealization &chan)
{
    if (chan.f.rows() != config.src_antennas || chan.f.cols() != config.num_relays ||
        chan.g.rows() != config.num_relays || chan.g.cols() != config.dst_antennas)
        throw ContractError("channel dimensions do not match the network configuration");
}

// Fills `chan` in place (no allocation once sized). Each entry is CN(0, sigma^2).
template <typename Rng>
void sample_channel_into(const NetworkConfig &config, Rng &rng, ChannelRealization &chan)
{
    const int R = config.num_relays, Ns = config.src_antennas, Nd = config.dst_antennas;
    chan.f.resize(Ns, R);
    chan.g.resize(R, Nd);
    std::normal_distribution<double> n01(0.0, 1.0);
    for (int r = 0; r < R; ++r)
    {
        const double sf = std::sqrt(0.5 * config.sigma_f_sq[r]);
        for (int i = 0; i < Ns; ++i)
        {
            const double re = n01(rng), im = n01(rng);
            chan.f(i, r) = cplx(sf * re, sf * im);
        }
        const double sg = std::sqrt(0.5 * config.sigma_g_sq[r]);
        for (int j = 0; j < Nd; ++j)
        {
            const double re = n01(rng), im = n01(rng);
            chan.g(r, j) = cplx(sg * re, sg * im);
        }
    }
}

template <typename Rng>
ChannelRealization sample_channel(const NetworkConfig &config, Rng &rng)
{
    config.validate();
    ChannelRealization chan;
    sample_channel_into(config, rng, chan);
    return chan;
}

// ------------------------------------------------------------------------
// Modulation
// ------------------------------------------------------------------------

enum class ModulationFamily
{
    MPSK,
    MQAM
};

// SER ~ c Q(sqrt(g * SNR)) for the constellation
struct ModulationSpec
{
    ModulationFamily family = ModulationFamily::MPSK;
    int M = 2;
    double c = 1.0;
    double g = 2.0;

    int bits_per_symbol() const
    {
        int b = 0;
        while ((1 << b) < M)
            ++b;
        return b;
    }
};

inline std::string to_string(ModulationFamily f)
{
    return f == ModulationFamily::MPSK ? "MPSK" : "MQAM";
}

inline ModulationFamily modulation_family_from_string(const std::string &s)
{
    if (s == "MPSK" || s == "mpsk" || s == "psk" || s == "PSK")
        return ModulationFamily::MPSK;
    if (s == "MQAM" || s == "mqam" || s == "qam" || s == "QAM")
        return ModulationFamily::MQAM;
    throw ConfigError("family", "unknown modulation family '" + s + "'");
}

inline ModulationSpec modulation_constants(ModulationFamily family, int M)
{
    if (M < 2 || (M & (M - 1)) != 0)
        throw ConfigError("M", "modulation order must be a power of two >= 2");
    ModulationSpec m;
    m.family = family;
    m.M = M;
    if (family == ModulationFamily::MPSK)
    {
        m.c = 2.0;
        const double s = std::sin(std::numbers::pi / M);
        m.g = 2.0 * s * s;
        // sin(pi/2)^2 and sin(pi/4)^2 carry rounding; pin the exact values.
        // For M = 2 the nearest-neighbour count is 1, not 2: BPSK SER is exactly Q(sqrt(2 gamma)).
        if (M == 2)
        {
            m.c = 1.0;
            m.g = 2.0;
        }
        else if (M == 4)
            m.g = 1.0;
    }
    else
    {
        const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(M))));
        if (root * root != M)
            throw ConfigError("M", "MQAM order must be a perfect square");
        m.c = 4.0 * (root - 1.0) / root;
        m.g = 3.0 / (M - 1.0);
    }
    return m;
}

// Unit-average-energy constellation; index k carries the Gray label stored in `labels[k]`
struct Constellation
{
    std::vector<cplx> points;
    std::vector<unsigned> labels;
};

inline unsigned gray_encode(unsigned k) { return k ^ (k >> 1); }

inline Constellation make_constellation(const ModulationSpec &mod)
{
    Constellation c;
    const int M = mod.M;
    if (mod.family == ModulationFamily::MPSK)
    {
        for (int k = 0; k < M; ++k)
        {
            const double phase = (M == 2 ? 0.0 : std::numbers::pi / M) + 2.0 * std::numbers::pi * k / M;
            c.points.emplace_back(std::cos(phase), std::sin(phase));
            c.labels.push_back(gray_encode(static_cast<unsigned>(k)));
        }
        if (M == 2)
            c.points = {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
        return c;
    }
    const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(M))));
    const int bits_axis = ModulationSpec{mod.family, root}.bits_per_symbol();
    double energy = 0.0;
    for (int i = 0; i < root; ++i)
        for (int q = 0; q < root; ++q)
        {
            const cplx p(2.0 * i - (root - 1), 2.0 * q - (root - 1));
            c.points.push_back(p);
            c.labels.push_back((gray_encode(static_cast<unsigned>(i)) << bits_axis) |
                               gray_encode(static_cast<unsigned>(q)));
            energy += std::norm(p);
        }
    const double scale = 1.0 / std::sqrt(energy / M);
    for (auto &p : c.points)
        p *= scale;
    return c;
}

// ------------------------------------------------------------------------
// Power allocation
// ------------------------------------------------------------------------

// tau splits P into P1 = tau P (phase 1) and P2 = (1 - tau) P (phase 2).
struct PowerAllocation
{
    double tau = 0.5;
    std::vector<double> p1_per_antenna; // P_{1,n}, n = 0..Ns-1
    std::vector<double> p2_per_relay;   // P_{2,r}, r = 0..R-1
    // Mean received power per unit P1 assumed by relay r's gain normalization. Empty means
    // sigma_f_sq[r] (no source CSI); schemes that pick the strongest antenna for a relay
    // use the mean of max_n |f_{n,r}|^2 instead.
    std::vector<double> relay_input_var;

    double p1(const NetworkConfig &c) const { return tau * c.total_power; }
    double p2(const NetworkConfig &c) const { return (1.0 - tau) * c.total_power; }

    double input_var(const NetworkConfig &c, int r) const
    {
        return relay_input_var.empty() ? c.sigma_f_sq[r] : relay_input_var[r];
    }

    void validate(const NetworkConfig &c) const
    {
        if (!(tau > 0.0 && tau < 1.0))
            throw ConfigError("tau", "must lie in (0, 1)");
        if (static_cast<int>(p1_per_antenna.size()) != c.src_antennas)
            throw ContractError("p1_per_antenna length must equal src_antennas");
        if (static_cast<int>(p2_per_relay.size()) != c.num_relays)
            throw ContractError("p2_per_relay length must equal num_relays");
        if (!relay_input_var.empty() && static_cast<int>(relay_input_var.size()) != c.num_relays)
            throw ContractError("relay_input_var length must equal num_relays");
        double s1 = 0.0, s2 = 0.0;
        for (double v : p1_per_antenna)
        {
            if (!(v >= 0.0))
                throw ConfigError("p1_per_antenna", "entries must be >= 0");
            s1 += v;
        }
        for (double v : p2_per_relay)
        {
            if (!(v >= 0.0))
                throw ConfigError("p2_per_relay", "entries must be >= 0");
            s2 += v;
        }
        const double slack = 1e-12 * c.total_power;
        if (s1 > p1(c) + slack)
            throw ConfigError("p1_per_antenna", "sum exceeds the phase-1 budget");
        if (s2 > p2(c) + slack)
            throw ConfigError("p2_per_relay", "sum exceeds the phase-2 budget");
    }
};

// rho_r = sqrt(P_{2,r} / (sigma^2 P1 + N1)): keeps relay r's average transmit power at P_{2,r}
inline double relay_gain(const NetworkConfig &config, const PowerAllocation &alloc, int r)
{
    if (r < 0 || r >= config.num_relays)
        throw ContractError("relay_gain: relay index out of range");
    return std::sqrt(alloc.p2_per_relay[r] / (alloc.input_var(config, r) * alloc.p1(config) + config.noise1));
}

} // namespace afrelay

#endif
