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


#ifndef AFRELAY_STC_HPP
#define AFRELAY_STC_HPP

#include "errors.hpp"
#include "network.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace afrelay
{

// ------------------------------------------------------------------------
// Codebook
// ------------------------------------------------------------------------

// Real dispersion matrices. The codeword is S = [C_1 S1, ..., C_R S1] with S1 = [A_1 s ... A_Ns s],
// so column r * Ns + n of S is C_r A_n s.
struct CodeBook
{
    int T = 4;
    std::vector<Eigen::MatrixXd> A; // Ns source matrices
    std::vector<Eigen::MatrixXd> C; // R relay matrices

    // basis[k] is the T x NsR matrix with S(s) = sum_k s_k basis[k]
    std::vector<Eigen::MatrixXd> basis;

    int src_antennas() const { return static_cast<int>(A.size()); }
    int num_relays() const { return static_cast<int>(C.size()); }
    int columns() const { return src_antennas() * num_relays(); }

    Eigen::MatrixXcd codeword(const Eigen::VectorXcd &s) const
    {
        Eigen::MatrixXcd S(T, columns());
        for (int r = 0; r < num_relays(); ++r)
            for (int n = 0; n < src_antennas(); ++n)
                S.col(r * src_antennas() + n) = (C[r] * A[n]).cast<cplx>() * s;
        return S;
    }
};

namespace detail
{

// 4x4 real orthogonal design {I, A2, C2, C2 A2}; A2 and C2 are anticommuting skew-symmetric
// signed permutations, so every pair B_i^T B_j (i != j) is skew-symmetric.
inline std::vector<Eigen::MatrixXd> real_design4()
{
    Eigen::MatrixXd A2(4, 4), C2(4, 4);
    A2 << 0, -1, 0, 0, //
        1, 0, 0, 0,    //
        0, 0, 0, -1,   //
        0, 0, 1, 0;
    C2 << 0, 0, -1, 0, //
        0, 0, 0, 1,    //
        1, 0, 0, 0,    //
        0, -1, 0, 0;
    return {Eigen::MatrixXd::Identity(4, 4), A2, C2, C2 * A2};
}

} // namespace detail

inline CodeBook build_codebook(int Ns, int R, int T)
{
    const std::string supported = "supported shapes: T = 4 with (Ns, R) in {(1, 1..4), (2..4, 1), (2, 2)}";
    if (T != 4 || Ns < 1 || R < 1 || Ns * R > 4 || (Ns > 1 && R > 1 && !(Ns == 2 && R == 2)))
        throw CapabilityError("no orthogonal design for Ns=" + std::to_string(Ns) + ", R=" +
                              std::to_string(R) + ", T=" + std::to_string(T) + "; " + supported);
    const auto B = detail::real_design4();
    CodeBook cb;
    cb.T = T;
    if (Ns == 2 && R == 2)
    {
        cb.A = {B[0], B[1]};
        cb.C = {B[0], B[2]};
    }
    else if (Ns == 1)
    {
        // relay order keeps C_2 of the two-relay code in second place
        const int order[4] = {0, 2, 1, 3};
        cb.A = {B[0]};
        for (int r = 0; r < R; ++r)
            cb.C.push_back(B[order[r]]);
    }
    else
    {
        for (int n = 0; n < Ns; ++n)
            cb.A.push_back(B[n]);
        cb.C = {B[0]};
    }
    for (int k = 0; k < T; ++k)
    {
        Eigen::MatrixXd E(T, Ns * R);
        for (int r = 0; r < R; ++r)
            for (int n = 0; n < Ns; ++n)
                E.col(r * Ns + n) = cb.C[r] * cb.A[n].col(k);
        cb.basis.push_back(std::move(E));
    }
    return cb;
}

// ------------------------------------------------------------------------
// Transmission
// ------------------------------------------------------------------------

// Equivalent channel (NsR x Nd) such that Y = sqrt(T) S H + W_T:
// row r * Ns + n is sqrt(P_{1,n}) f_{n,r} rho_r g_r. With P_{1,n} = P1 / Ns this is
// sqrt(P1 / Ns) F Lambda G.
inline Eigen::MatrixXcd effective_channel(const NetworkConfig &config, const PowerAllocation &alloc,
                                          const ChannelRealization &chan)
{
    check_channel(config, chan);
    const int Ns = config.src_antennas, R = config.num_relays;
    Eigen::MatrixXcd H(Ns * R, config.dst_antennas);
    for (int r = 0; r < R; ++r)
    {
        const double rho = relay_gain(config, alloc, r);
        for (int n = 0; n < Ns; ++n)
            H.row(r * Ns + n) = (std::sqrt(alloc.p1_per_antenna[n]) * rho * chan.f(n, r)) * chan.g.row(r);
    }
    return H;
}

struct TransmissionTrace
{
    Eigen::VectorXcd s;             // T symbols, E[||s||^2] = 1
    std::vector<int> symbol_index;  // constellation index of each s_k (empty if not drawn from one)
    std::vector<Eigen::VectorXcd> x; // per-relay received T-vectors
    Eigen::MatrixXcd Y;             // T x Nd
    Eigen::MatrixXcd H;             // NsR x Nd equivalent channel, see effective_channel
    Eigen::MatrixXcd W;             // T x Nd total noise W_T
};

enum class Noise
{
    on,
    off
};

// Draws T constellation points scaled so that E[||s||^2] = 1
template <typename Rng>
void draw_symbols(const Constellation &con, int T, Rng &rng, TransmissionTrace &trace)
{
    std::uniform_int_distribution<int> pick(0, static_cast<int>(con.points.size()) - 1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(T));
    trace.s.resize(T);
    trace.symbol_index.resize(T);
    for (int k = 0; k < T; ++k)
    {
        trace.symbol_index[k] = pick(rng);
        trace.s(k) = scale * con.points[trace.symbol_index[k]];
    }
}

// Two-phase transmission of the symbols already in trace.s:
//   x_r = sqrt(T) sum_n sqrt(P_{1,n}) f_{n,r} A_n s + v_r
//   y_j = sum_r g_{r,j} rho_r C_r x_r + w_j
template <typename Rng>
void simulate_transmission(const NetworkConfig &config, const CodeBook &cb, const PowerAllocation &alloc,
                           const ChannelRealization &chan, Rng &rng, TransmissionTrace &trace,
                           Noise noise = Noise::on)
{
    const int R = config.num_relays, Ns = config.src_antennas, Nd = config.dst_antennas, T = cb.T;
    if (cb.src_antennas() != Ns || cb.num_relays() != R || trace.s.size() != T)
        throw ContractError("simulate_transmission: codebook or symbol vector does not match the configuration");
    check_channel(config, chan);

    std::normal_distribution<double> n01(0.0, 1.0);
    auto cn = [&](double var) {
        const double sd = std::sqrt(0.5 * var);
        const double re = n01(rng), im = n01(rng);
        return cplx(sd * re, sd * im);
    };

    const double sqrtT = std::sqrt(static_cast<double>(T));
    trace.x.resize(R);
    trace.Y.setZero(T, Nd);
    trace.W.setZero(T, Nd);
    Eigen::VectorXcd v(T), cx(T), cv(T);
    for (int r = 0; r < R; ++r)
    {
        auto &x = trace.x[r];
        x.setZero(T);
        for (int n = 0; n < Ns; ++n)
            x += (sqrtT * std::sqrt(alloc.p1_per_antenna[n]) * chan.f(n, r)) * (cb.A[n].cast<cplx>() * trace.s);
        for (int t = 0; t < T; ++t)
            v(t) = noise == Noise::on ? cn(config.noise1) : cplx(0.0);
        x += v;
        const double rho = relay_gain(config, alloc, r);
        cx.noalias() = cb.C[r].cast<cplx>() * x;
        cv.noalias() = cb.C[r].cast<cplx>() * v;
        for (int j = 0; j < Nd; ++j)
        {
            const cplx a = chan.g(r, j) * rho;
            trace.Y.col(j) += a * cx;
            trace.W.col(j) += a * cv;
        }
    }
    for (int j = 0; j < Nd; ++j)
        for (int t = 0; t < T; ++t)
        {
            const cplx w = noise == Noise::on ? cn(config.noise2) : cplx(0.0);
            trace.Y(t, j) += w;
            trace.W(t, j) += w;
        }
    trace.H = effective_channel(config, alloc, chan);
}

template <typename Rng>
TransmissionTrace simulate_transmission(const NetworkConfig &config, const CodeBook &cb,
                                        const PowerAllocation &alloc, const ChannelRealization &chan,
                                        const Eigen::VectorXcd &s, Rng &rng, Noise noise = Noise::on)
{
    TransmissionTrace trace;
    trace.s = s;
    simulate_transmission(config, cb, alloc, chan, rng, trace, noise);
    return trace;
}

// ------------------------------------------------------------------------
// Detection
// ------------------------------------------------------------------------

inline bool is_real_constellation(const Constellation &con)
{
    for (auto p : con.points)
        if (std::abs(p.imag()) > 1e-12)
            return false;
    return true;
}

// Largest joint search accepted for complex constellations (M^T candidates)
inline constexpr long max_joint_candidates = 4096;

// Minimizes ||Y - sqrt(T) S(s) H||_F over constellation vectors. For real constellations the
// orthogonal design makes the metric separable, so each symbol is decided on its own; complex
// constellations on a real design couple Re s_k with Im s_l and are searched jointly.
inline std::vector<int> decode_ml_indices(const Eigen::MatrixXcd &Y, const CodeBook &cb, const Eigen::MatrixXcd &H,
                                          const Constellation &con)
{
    const int T = cb.T;
    const int M = static_cast<int>(con.points.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(T));
    const Eigen::MatrixXcd G = std::sqrt(static_cast<double>(T)) * H;
    std::vector<int> out(T, 0);

    if (is_real_constellation(con))
    {
        const Eigen::MatrixXcd Z = Y * G.adjoint(); // T x NsR
        const double g2 = G.squaredNorm();
        for (int k = 0; k < T; ++k)
        {
            const double z = (cb.basis[k].array() * Z.real().array()).sum();
            // per-symbol metric: s^2 ||G||^2 - 2 s z
            double best = std::numeric_limits<double>::infinity();
            for (int m = 0; m < M; ++m)
            {
                const double s = scale * con.points[m].real();
                const double metric = s * s * g2 - 2.0 * s * z;
                if (metric < best)
                {
                    best = metric;
                    out[k] = m;
                }
            }
        }
        return out;
    }

    long total = 1;
    for (int k = 0; k < T; ++k)
    {
        total *= M;
        if (total > max_joint_candidates)
            throw CapabilityError("joint ML search over " + std::to_string(M) + "^" + std::to_string(T) +
                                  " candidates exceeds the supported size (" +
                                  std::to_string(max_joint_candidates) + ")");
    }
    std::vector<Eigen::MatrixXcd> B(T);
    for (int k = 0; k < T; ++k)
        B[k] = cb.basis[k].cast<cplx>() * G;
    std::vector<int> idx(T, 0);
    Eigen::MatrixXcd D(Y.rows(), Y.cols());
    double best = std::numeric_limits<double>::infinity();
    for (long c = 0; c < total; ++c)
    {
        long rem = c;
        D = Y;
        for (int k = 0; k < T; ++k)
        {
            idx[k] = static_cast<int>(rem % M);
            rem /= M;
            D -= (scale * con.points[idx[k]]) * B[k];
        }
        const double metric = D.squaredNorm();
        if (metric < best)
        {
            best = metric;
            out = idx;
        }
    }
    return out;
}

inline Eigen::VectorXcd decode_ml(const TransmissionTrace &trace, const CodeBook &cb, const NetworkConfig &config,
                                  const PowerAllocation &alloc, const ChannelRealization &chan,
                                  const ModulationSpec &modulation)
{
    const auto con = make_constellation(modulation);
    const auto H = effective_channel(config, alloc, chan);
    const auto idx = decode_ml_indices(trace.Y, cb, H, con);
    Eigen::VectorXcd s(cb.T);
    for (int k = 0; k < cb.T; ++k)
        s(k) = con.points[idx[k]] / std::sqrt(static_cast<double>(cb.T));
    return s;
}

// ------------------------------------------------------------------------
// SNR
// ------------------------------------------------------------------------

// sum_{r,n} P_{1,n} |f_{n,r}|^2 rho_r^2 ||g_r||^2 / (sum_k rho_k^2 ||g_k||^2 N1 + Nd N2)
inline double instantaneous_snr(const NetworkConfig &config, const PowerAllocation &alloc,
                                const ChannelRealization &chan)
{
    check_channel(config, chan);
    double num = 0.0, relay_noise = 0.0;
    for (int r = 0; r < config.num_relays; ++r)
    {
        const double rho2 = std::pow(relay_gain(config, alloc, r), 2);
        const double g2 = chan.g_norm_sq(r);
        double fp = 0.0;
        for (int n = 0; n < config.src_antennas; ++n)
            fp += alloc.p1_per_antenna[n] * std::norm(chan.f(n, r));
        num += fp * rho2 * g2;
        relay_noise += rho2 * g2;
    }
    return num / (relay_noise * config.noise1 + config.dst_antennas * config.noise2);
}

// SNR of each symbol after matched filtering with the equivalent channel, accounting for the
// relay noise being shared across receive antennas:
//   ||H||^4 / (N2 ||H||^2 + N1 sum_r rho_r^2 ||H g_r^H||^2)
// Coincides with instantaneous_snr when Nd = 1.
inline double post_detection_snr(const NetworkConfig &config, const PowerAllocation &alloc,
                                 const ChannelRealization &chan)
{
    const Eigen::MatrixXcd H = effective_channel(config, alloc, chan);
    const double h2 = H.squaredNorm();
    if (h2 == 0.0)
        return 0.0;
    double relay = 0.0;
    for (int r = 0; r < config.num_relays; ++r)
    {
        const double rho = relay_gain(config, alloc, r);
        relay += rho * rho * (H * chan.g.row(r).adjoint()).squaredNorm();
    }
    return h2 * h2 / (config.noise2 * h2 + config.noise1 * relay);
}

} // namespace afrelay

#endif
