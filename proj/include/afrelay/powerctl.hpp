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


#ifndef AFRELAY_POWERCTL_HPP
#define AFRELAY_POWERCTL_HPP

#include "errors.hpp"
#include "network.hpp"
#include "specfun.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace afrelay
{

enum class SchemeId
{
    DstcUniform,
    OpportunisticRelay,
    FullOpportunism,
    OpportunisticSource
};

inline std::string to_string(SchemeId s)
{
    switch (s)
    {
    case SchemeId::DstcUniform:
        return "dstc";
    case SchemeId::OpportunisticRelay:
        return "opp-relay";
    case SchemeId::FullOpportunism:
        return "full-opp";
    case SchemeId::OpportunisticSource:
        return "opp-source";
    }
    return "?";
}

inline SchemeId scheme_from_string(const std::string &s)
{
    for (auto id : {SchemeId::DstcUniform, SchemeId::OpportunisticRelay, SchemeId::FullOpportunism,
                    SchemeId::OpportunisticSource})
        if (to_string(id) == s)
            return id;
    throw ConfigError("scheme", "unknown scheme '" + s + "' (expected dstc, opp-relay, full-opp or opp-source)");
}

inline const std::vector<SchemeId> &all_schemes()
{
    static const std::vector<SchemeId> v{SchemeId::DstcUniform, SchemeId::OpportunisticRelay,
                                         SchemeId::FullOpportunism, SchemeId::OpportunisticSource};
    return v;
}

// Allocation plus the indices chosen by a selection scheme (-1 when not applicable)
struct Selection
{
    PowerAllocation alloc;
    int relay = -1;
    int antenna = -1;
    bool degenerate = false; // every candidate metric was zero
};

// Mean of max_n |f_{n,r}|^2 for Ns iid CN(0, sigma^2) entries: sigma^2 H_Ns
inline double sigma_xi_sq(const NetworkConfig &config, int r)
{
    return config.sigma_f_sq[r] * specfun::harmonic(config.src_antennas);
}

struct SelectionMetrics
{
    std::vector<double> lambda_per_relay;        // end-to-end SNR of relay i alone, uniform source
    std::vector<double> xi_per_relay;            // max_n |f_{n,r}|^2
    std::vector<double> theta_per_antenna;       // SNR per unit P_{1,n} with P_{2,r} = P2 / R
    std::vector<double> theta_tilde_per_antenna; // sum_r |f_{n,r}|^2 ||g_r||^2 / (sigma_{f_r}^2 P1 + N1)
    std::vector<double> sigma_xi_sq;             // mean of xi_r
};

inline SelectionMetrics selection_metrics(const NetworkConfig &config, const ChannelRealization &chan,
                                          double tau = 0.5)
{
    config.validate();
    check_channel(config, chan);
    const int R = config.num_relays, Ns = config.src_antennas, Nd = config.dst_antennas;
    const double P1 = tau * config.total_power, P2 = (1.0 - tau) * config.total_power;
    const double N1 = config.noise1, N2 = config.noise2;
    SelectionMetrics m;
    double relay_noise = 0.0; // sum_k rho_k^2 ||g_k||^2 with uniform relay power
    for (int r = 0; r < R; ++r)
    {
        const double f2 = chan.f_norm_sq(r), g2 = chan.g_norm_sq(r);
        const double in = config.sigma_f_sq[r] * P1 + N1;
        m.lambda_per_relay.push_back(P1 * P2 * f2 * g2 / (P2 * Ns * g2 * N1 + Ns * Nd * N2 * in));
        m.xi_per_relay.push_back(chan.f_max_sq(r));
        m.sigma_xi_sq.push_back(sigma_xi_sq(config, r));
        relay_noise += (P2 / R) / in * g2;
    }
    const double den = relay_noise * N1 + Nd * N2;
    for (int n = 0; n < Ns; ++n)
    {
        double tt = 0.0;
        for (int r = 0; r < R; ++r)
            tt += std::norm(chan.f(n, r)) * chan.g_norm_sq(r) / (config.sigma_f_sq[r] * P1 + N1);
        m.theta_tilde_per_antenna.push_back(tt);
        m.theta_per_antenna.push_back(tt * (P2 / R) / den);
    }
    return m;
}

namespace detail
{

// argmax with lowest-index tie break; flags the all-zero case
inline int argmax_lowest(const std::vector<double> &v, bool &all_zero)
{
    int best = 0;
    all_zero = true;
    for (int i = 0; i < static_cast<int>(v.size()); ++i)
    {
        if (v[i] != 0.0)
            all_zero = false;
        if (v[i] > v[best])
            best = i;
    }
    return best;
}

} // namespace detail

inline PowerAllocation allocate_dstc_uniform(const NetworkConfig &config)
{
    config.validate();
    PowerAllocation a;
    a.tau = 0.5;
    a.p1_per_antenna.assign(config.src_antennas, a.p1(config) / config.src_antennas);
    a.p2_per_relay.assign(config.num_relays, a.p2(config) / config.num_relays);
    return a;
}

// Single best relay by lambda_i; the source spreads P1 uniformly (no CSI at the source)
inline Selection allocate_opportunistic_relay(const NetworkConfig &config, const ChannelRealization &chan)
{
    const auto m = selection_metrics(config, chan);
    Selection s;
    s.alloc = allocate_dstc_uniform(config);
    s.relay = detail::argmax_lowest(m.lambda_per_relay, s.degenerate);
    const double P2 = s.alloc.p2(config);
    s.alloc.p2_per_relay.assign(config.num_relays, 0.0);
    s.alloc.p2_per_relay[s.relay] = P2;
    return s;
}

// Best relay by xi_j ||g_j||^2 P1 P2 / (P2 ||g_j||^2 N1 + Nd N2 (sigma_xi^2 P1 + N1)), then its
// strongest source antenna gets all of P1. Relay gains normalize by sigma_xi^2.
inline Selection allocate_full_opportunism(const NetworkConfig &config, const ChannelRealization &chan)
{
    const auto m = selection_metrics(config, chan);
    const int R = config.num_relays, Ns = config.src_antennas, Nd = config.dst_antennas;
    Selection s;
    s.alloc = allocate_dstc_uniform(config);
    const double P1 = s.alloc.p1(config), P2 = s.alloc.p2(config);
    std::vector<double> zeta(R);
    for (int j = 0; j < R; ++j)
    {
        const double g2 = chan.g_norm_sq(j);
        zeta[j] = P1 * P2 * m.xi_per_relay[j] * g2 /
                  (P2 * g2 * config.noise1 + Nd * config.noise2 * (m.sigma_xi_sq[j] * P1 + config.noise1));
    }
    s.relay = detail::argmax_lowest(zeta, s.degenerate);
    std::vector<double> col(Ns);
    for (int n = 0; n < Ns; ++n)
        col[n] = std::norm(chan.f(n, s.relay));
    bool unused = false;
    s.antenna = detail::argmax_lowest(col, unused);
    s.alloc.p1_per_antenna.assign(Ns, 0.0);
    s.alloc.p1_per_antenna[s.antenna] = P1;
    s.alloc.p2_per_relay.assign(R, 0.0);
    s.alloc.p2_per_relay[s.relay] = P2;
    s.alloc.relay_input_var = m.sigma_xi_sq;
    return s;
}

// Source puts P1 on the antenna with the largest theta-tilde; relays share P2 equally
inline Selection allocate_opportunistic_source(const NetworkConfig &config, const ChannelRealization &chan)
{
    const auto m = selection_metrics(config, chan);
    Selection s;
    s.alloc = allocate_dstc_uniform(config);
    s.antenna = detail::argmax_lowest(m.theta_tilde_per_antenna, s.degenerate);
    const double P1 = s.alloc.p1(config);
    s.alloc.p1_per_antenna.assign(config.src_antennas, 0.0);
    s.alloc.p1_per_antenna[s.antenna] = P1;
    return s;
}

inline Selection allocate(SchemeId scheme, const NetworkConfig &config, const ChannelRealization &chan)
{
    switch (scheme)
    {
    case SchemeId::DstcUniform:
        return Selection{allocate_dstc_uniform(config)};
    case SchemeId::OpportunisticRelay:
        return allocate_opportunistic_relay(config, chan);
    case SchemeId::FullOpportunism:
        return allocate_full_opportunism(config, chan);
    case SchemeId::OpportunisticSource:
        return allocate_opportunistic_source(config, chan);
    }
    throw ContractError("allocate: unknown scheme");
}

// ------------------------------------------------------------------------
// Power split between the two phases
// ------------------------------------------------------------------------

namespace detail
{

inline void require_homogeneous(const NetworkConfig &config, const char *what)
{
    config.validate();
    if (!config.is_homogeneous())
        throw CapabilityError(std::string(what) + " requires equal variances across relays");
}

} // namespace detail

// Jensen-level average SNR E[num] / E[den] of the uniform-allocation SNR
inline double average_snr_two_phase(const NetworkConfig &config, double tau)
{
    detail::require_homogeneous(config, "average_snr_two_phase");
    if (!(tau > 0.0 && tau < 1.0))
        throw DomainError("average_snr_two_phase: tau must lie in (0, 1)");
    const double P = config.total_power, sf = config.sigma_f_sq[0], sg = config.sigma_g_sq[0];
    const double N1 = config.noise1, N2 = config.noise2;
    return tau * (1.0 - tau) * P * P * sf * sg / (tau * (N2 * sf - N1 * sg) * P + N1 * sg * P + N1 * N2);
}

// tau = (sqrt(1 + delta) - 1) / delta written as 1 / (sqrt(1 + delta) + 1); exact 1/2 at delta = 0
inline double optimal_tau(const NetworkConfig &config)
{
    detail::require_homogeneous(config, "optimal_tau");
    const double P = config.total_power, sf = config.sigma_f_sq[0], sg = config.sigma_g_sq[0];
    const double N1 = config.noise1, N2 = config.noise2;
    const double delta = (N2 * sf - N1 * sg) * P / (N1 * sg * P + N1 * N2);
    return 1.0 / (std::sqrt(1.0 + delta) + 1.0);
}

} // namespace afrelay

#endif
