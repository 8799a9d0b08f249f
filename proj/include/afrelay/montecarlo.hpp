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


#ifndef AFRELAY_MONTECARLO_HPP
#define AFRELAY_MONTECARLO_HPP

#include "analysis.hpp"
#include "errors.hpp"
#include "network.hpp"
#include "powerctl.hpp"
#include "stc.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace afrelay
{

struct SimPlan
{
    NetworkConfig config;
    SchemeId scheme = SchemeId::DstcUniform;
    ModulationSpec modulation = modulation_constants(ModulationFamily::MPSK, 2);
    std::vector<double> snr_db_grid;
    long min_errors = 200;     // symbol errors per point
    long max_trials = 1000000; // T-blocks per point
    std::uint64_t seed = 1;
    int workers = 1;

    void validate() const
    {
        config.validate();
        if (snr_db_grid.empty())
            throw ConfigError("snr_db_grid", "must not be empty");
        if (!std::is_sorted(snr_db_grid.begin(), snr_db_grid.end()))
            throw ConfigError("snr_db_grid", "must be sorted ascending");
        for (double s : snr_db_grid)
            if (!std::isfinite(s))
                throw ConfigError("snr_db_grid", "entries must be finite");
        if (min_errors < 50)
            throw ConfigError("min_errors", "must be >= 50");
        if (max_trials < min_errors)
            throw ConfigError("max_trials", "must be >= min_errors");
        if (workers < 1)
            throw ConfigError("workers", "must be >= 1");
    }
};

struct SimResult
{
    SerCurve curve;     // symbol error rate
    SerCurve ber_curve; // bit error rate, Gray labels
    std::vector<long> trials_used;
    std::vector<long> symbol_errors;
    std::vector<long> bit_errors;
    double wall_time = 0.0; // seconds
};

inline double ci_halfwidth(double p, double n) { return n > 0 ? 1.96 * std::sqrt(p * (1.0 - p) / n) : 0.0; }

namespace detail
{

inline std::mt19937_64 substream(std::uint64_t seed, std::size_t snr_index, int worker)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(snr_index), static_cast<std::uint32_t>(worker), 0x5eedu};
    return std::mt19937_64(seq);
}

inline void require_decodable(const Constellation &con, int T)
{
    if (is_real_constellation(con))
        return;
    long total = 1;
    for (int k = 0; k < T; ++k)
        if ((total *= static_cast<long>(con.points.size())) > max_joint_candidates)
            throw CapabilityError("joint ML search over " + std::to_string(con.points.size()) + "^" +
                                  std::to_string(T) + " candidates exceeds the supported size (" +
                                  std::to_string(max_joint_candidates) + ")");
}

struct WorkerState
{
    std::mt19937_64 rng;
    ChannelRealization chan;
    TransmissionTrace trace;
    long trials = 0, symbol_errors = 0, bit_errors = 0;
};

inline void run_trials(const NetworkConfig &config, SchemeId scheme, const CodeBook &cb, const Constellation &con,
                       long n, WorkerState &w)
{
    for (long i = 0; i < n; ++i)
    {
        sample_channel_into(config, w.rng, w.chan);
        const auto sel = allocate(scheme, config, w.chan);
        draw_symbols(con, cb.T, w.rng, w.trace);
        simulate_transmission(config, cb, sel.alloc, w.chan, w.rng, w.trace);
        const auto H = effective_channel(config, sel.alloc, w.chan);
        const auto idx = decode_ml_indices(w.trace.Y, cb, H, con);
        for (int k = 0; k < cb.T; ++k)
        {
            const int sent = w.trace.symbol_index[k];
            if (idx[k] != sent)
            {
                ++w.symbol_errors;
                w.bit_errors += std::popcount(con.labels[idx[k]] ^ con.labels[sent]);
            }
        }
    }
    w.trials += n;
}

} // namespace detail

// Per SNR point, workers run rounds of trials on independent substreams seeded from
// (seed, snr_index, worker); counts are merged after each round and the stopping rule is
// checked on the merged total. Round sizes depend only on the plan, so a fixed worker count
// reproduces bit-identical results.
inline SimResult run_sim(const SimPlan &plan)
{
    plan.validate();
    const auto &config = plan.config;
    const auto cb = build_codebook(config.src_antennas, config.num_relays, config.block_len);
    const auto con = make_constellation(plan.modulation);
    detail::require_decodable(con, cb.T);
    const int bits = plan.modulation.bits_per_symbol();

    const auto t0 = std::chrono::steady_clock::now();
    SimResult out;
    out.curve.provenance = Provenance::simulated;
    out.ber_curve.provenance = Provenance::simulated;
    const int W = plan.workers;

    for (std::size_t i = 0; i < plan.snr_db_grid.size(); ++i)
    {
        const double db = plan.snr_db_grid[i];
        const auto cfg = with_snr_db(config, db);
        std::vector<detail::WorkerState> ws(static_cast<std::size_t>(W));
        for (int w = 0; w < W; ++w)
            ws[w].rng = detail::substream(plan.seed, i, w);

        long trials = 0, errors = 0, batch = 64;
        while (errors < plan.min_errors && trials < plan.max_trials)
        {
            const long remaining = plan.max_trials - trials;
            const long chunk = std::min(batch, (remaining + W - 1) / W);
            std::vector<long> share(static_cast<std::size_t>(W));
            for (int w = 0; w < W; ++w)
                share[w] = std::clamp(remaining - w * chunk, 0L, chunk);
            if (W == 1)
                detail::run_trials(cfg, plan.scheme, cb, con, share[0], ws[0]);
            else
            {
                std::vector<std::jthread> pool;
                for (int w = 0; w < W; ++w)
                    pool.emplace_back([&, w] { detail::run_trials(cfg, plan.scheme, cb, con, share[w], ws[w]); });
            }
            trials = errors = 0;
            for (const auto &w : ws)
            {
                trials += w.trials;
                errors += w.symbol_errors;
            }
            batch = std::min(batch * 2, 1L << 16);
        }

        long bit_err = 0;
        for (const auto &w : ws)
            bit_err += w.bit_errors;
        const double n_sym = static_cast<double>(trials) * cb.T;
        const double ser = errors / n_sym;
        const double ber = bit_err / (n_sym * bits);
        out.curve.points.push_back({db, ser, ci_halfwidth(ser, n_sym)});
        out.ber_curve.points.push_back({db, ber, ci_halfwidth(ber, n_sym * bits)});
        out.trials_used.push_back(trials);
        out.symbol_errors.push_back(errors);
        out.bit_errors.push_back(bit_err);
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

// Post-selection received SNR of the scheme: gamma_max for the opportunistic relay, zeta_max
// for full opportunism, sum_r eta_r for antenna selection, the plain DSTC SNR otherwise.
inline std::vector<double> empirical_snr_distribution(const NetworkConfig &config, SchemeId scheme, long n_draws,
                                                      std::uint64_t seed)
{
    config.validate();
    std::mt19937_64 rng(seed);
    ChannelRealization chan;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(0L, n_draws)));
    for (long i = 0; i < n_draws; ++i)
    {
        sample_channel_into(config, rng, chan);
        const auto sel = allocate(scheme, config, chan);
        out.push_back(instantaneous_snr(config, sel.alloc, chan));
    }
    return out;
}

} // namespace afrelay

#endif
