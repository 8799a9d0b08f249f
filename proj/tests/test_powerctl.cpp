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


#include <afrelay/powerctl.hpp>
#include <afrelay/stc.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

using namespace afrelay;

namespace
{

double budget(const PowerAllocation &a)
{
    return std::accumulate(a.p1_per_antenna.begin(), a.p1_per_antenna.end(), 0.0) +
           std::accumulate(a.p2_per_relay.begin(), a.p2_per_relay.end(), 0.0);
}

// Uniform random point on the probability simplex
std::vector<double> simplex_point(std::mt19937_64 &rng, int n)
{
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto &x : p)
        s += (x = e(rng));
    for (auto &x : p)
        x /= s;
    return p;
}

double grid_argmax(const std::function<double(double)> &f, double step)
{
    double best = -1.0, arg = 0.0;
    for (double t = step; t < 1.0; t += step)
    {
        const double v = f(t);
        if (v > best)
        {
            best = v;
            arg = t;
        }
    }
    return arg;
}

} // namespace

TEST(Dstc, Examples)
{
    auto a = allocate_dstc_uniform(NetworkConfig::uniform(2, 2, 1, 4, 1, 1, 1, 1, 4.0));
    EXPECT_EQ(a.tau, 0.5);
    EXPECT_EQ(a.p1_per_antenna, (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(a.p2_per_relay, (std::vector<double>{1.0, 1.0}));
    auto b = allocate_dstc_uniform(NetworkConfig::uniform(4, 1, 1, 4, 1, 1, 1, 1, 8.0));
    EXPECT_EQ(b.p2_per_relay, std::vector<double>(4, 1.0));
}

TEST(Schemes, StringNames)
{
    for (auto s : all_schemes())
        EXPECT_EQ(scheme_from_string(to_string(s)), s);
    EXPECT_EQ(to_string(SchemeId::FullOpportunism), "full-opp");
    EXPECT_THROW(scheme_from_string("best"), ConfigError);
}

TEST(Schemes, BudgetIdentity)
{
    std::mt19937_64 rng(1);
    for (auto [R, Ns, Nd] : {std::tuple{2, 2, 1}, {2, 2, 2}, {4, 1, 1}, {3, 3, 2}})
    {
        auto c = NetworkConfig::uniform(R, Ns, Nd, 4, 1, 1, 1, 1, 37.3);
        for (int i = 0; i < 100; ++i)
        {
            auto ch = sample_channel(c, rng);
            for (auto s : all_schemes())
            {
                auto sel = allocate(s, c, ch);
                EXPECT_NEAR(budget(sel.alloc), c.total_power, 1e-12 * c.total_power);
                EXPECT_NO_THROW(sel.alloc.validate(c));
            }
        }
    }
}

TEST(OpportunisticRelay, DominanceTieAndDegenerate)
{
    auto c = NetworkConfig::uniform(3, 2, 1, 4, 1, 1, 1, 1, 10.0);
    ChannelRealization ch{Eigen::MatrixXcd::Ones(2, 3), Eigen::MatrixXcd::Ones(3, 1)};
    auto tie = allocate_opportunistic_relay(c, ch);
    EXPECT_EQ(tie.relay, 0);
    EXPECT_FALSE(tie.degenerate);
    ch.f.col(1) *= 2.0;
    auto dom = allocate_opportunistic_relay(c, ch);
    EXPECT_EQ(dom.relay, 1);
    EXPECT_EQ(dom.alloc.p2_per_relay, (std::vector<double>{0.0, 5.0, 0.0}));
    ch.f.setZero();
    auto deg = allocate_opportunistic_relay(c, ch);
    EXPECT_EQ(deg.relay, 0);
    EXPECT_TRUE(deg.degenerate);
}

TEST(OpportunisticRelay, LambdaIsSnrOfSelection)
{
    std::mt19937_64 rng(2);
    auto c = NetworkConfig::uniform(3, 2, 2, 4, 1, 1, 1, 1, 20.0);
    c.sigma_f_sq = {0.5, 1.0, 2.0};
    for (int i = 0; i < 200; ++i)
    {
        auto ch = sample_channel(c, rng);
        auto m = selection_metrics(c, ch);
        auto sel = allocate_opportunistic_relay(c, ch);
        EXPECT_NEAR(instantaneous_snr(c, sel.alloc, ch), m.lambda_per_relay[sel.relay], 1e-12 * m.lambda_per_relay[sel.relay]);
    }
}

TEST(OpportunisticRelay, BeatsRandomPowerVectors)
{
    std::mt19937_64 rng(3);
    auto c = NetworkConfig::uniform(3, 2, 2, 4, 1, 1, 1, 1, 10.0);
    c.sigma_g_sq = {1.0, 0.5, 2.0};
    for (int i = 0; i < 1000; ++i)
    {
        auto ch = sample_channel(c, rng);
        auto sel = allocate_opportunistic_relay(c, ch);
        const double best = instantaneous_snr(c, sel.alloc, ch);
        auto trial = sel.alloc;
        for (int k = 0; k < 1000; ++k)
        {
            auto p = simplex_point(rng, c.num_relays);
            for (int r = 0; r < c.num_relays; ++r)
                trial.p2_per_relay[r] = p[r] * sel.alloc.p2(c);
            ASSERT_LE(instantaneous_snr(c, trial, ch), best * (1.0 + 1e-12));
        }
    }
}

TEST(OpportunisticRelay, JointScalingInvariance)
{
    std::mt19937_64 rng(4);
    auto c = NetworkConfig::uniform(3, 2, 2, 4, 1, 1, 1, 1, 10.0);
    for (int i = 0; i < 200; ++i)
    {
        auto ch = sample_channel(c, rng);
        const double k = 0.1 + 3.0 * i / 200.0;
        auto cs = c;
        cs.total_power /= k * k;
        for (auto &v : cs.sigma_f_sq)
            v *= k * k;
        for (auto &v : cs.sigma_g_sq)
            v *= k * k;
        ChannelRealization sc{ch.f * k, ch.g * k};
        auto a = selection_metrics(c, ch).lambda_per_relay;
        auto b = selection_metrics(cs, sc).lambda_per_relay;
        for (int r = 0; r < 3; ++r)
            EXPECT_NEAR(a[r], b[r], 1e-12 * a[r]);
        EXPECT_EQ(allocate_opportunistic_relay(c, ch).relay, allocate_opportunistic_relay(cs, sc).relay);
    }
}

TEST(OpportunisticRelay, DominanceProperty)
{
    std::mt19937_64 rng(5);
    auto c = NetworkConfig::uniform(2, 2, 2, 4, 1, 1, 1, 1, 10.0);
    std::uniform_real_distribution<double> u(1.0, 2.0);
    for (int i = 0; i < 500; ++i)
    {
        auto ch = sample_channel(c, rng);
        ch.f.col(0) = ch.f.col(1) * u(rng);
        ch.g.row(0) = ch.g.row(1) * u(rng);
        auto m = selection_metrics(c, ch);
        EXPECT_GE(m.lambda_per_relay[0], m.lambda_per_relay[1]);
    }
}

TEST(FullOpportunism, SingleAntennaMatchesOpportunisticRelay)
{
    std::mt19937_64 rng(6);
    auto c = NetworkConfig::uniform(4, 1, 2, 4, 1, 1, 1, 1, 10.0);
    for (int i = 0; i < 1000; ++i)
    {
        auto ch = sample_channel(c, rng);
        auto a = allocate_full_opportunism(c, ch), b = allocate_opportunistic_relay(c, ch);
        EXPECT_EQ(a.relay, b.relay);
        EXPECT_EQ(a.antenna, 0);
        EXPECT_NEAR(instantaneous_snr(c, a.alloc, ch), instantaneous_snr(c, b.alloc, ch), 1e-12);
    }
}

TEST(FullOpportunism, SingleRelayPicksStrongestAntenna)
{
    std::mt19937_64 rng(7);
    auto c = NetworkConfig::uniform(1, 3, 1, 4, 1, 1, 1, 1, 10.0);
    for (int i = 0; i < 100; ++i)
    {
        auto ch = sample_channel(c, rng);
        Eigen::Index n;
        ch.f.col(0).cwiseAbs2().maxCoeff(&n);
        auto sel = allocate_full_opportunism(c, ch);
        EXPECT_EQ(sel.relay, 0);
        EXPECT_EQ(sel.antenna, n);
    }
}

TEST(FullOpportunism, EqualsExhaustivePairSearch)
{
    std::mt19937_64 rng(8);
    auto c = NetworkConfig::uniform(3, 3, 2, 4, 1, 1, 1, 1, 10.0);
    c.sigma_f_sq = {1.0, 0.4, 2.0};
    c.sigma_g_sq = {0.8, 1.5, 1.0};
    for (int i = 0; i < 1000; ++i)
    {
        auto ch = sample_channel(c, rng);
        auto sel = allocate_full_opportunism(c, ch);
        double best = -1.0;
        int br = -1, bn = -1;
        for (int r = 0; r < 3; ++r)
            for (int n = 0; n < 3; ++n)
            {
                PowerAllocation a = allocate_dstc_uniform(c);
                a.p1_per_antenna.assign(3, 0.0);
                a.p1_per_antenna[n] = a.p1(c);
                a.p2_per_relay.assign(3, 0.0);
                a.p2_per_relay[r] = a.p2(c);
                for (int k = 0; k < 3; ++k)
                    a.relay_input_var.push_back(c.sigma_f_sq[k] * (1.0 + 0.5 + 1.0 / 3.0));
                const double snr = instantaneous_snr(c, a, ch);
                if (snr > best)
                {
                    best = snr;
                    br = r;
                    bn = n;
                }
            }
        ASSERT_EQ(sel.relay, br);
        ASSERT_EQ(sel.antenna, bn);
        EXPECT_NEAR(instantaneous_snr(c, sel.alloc, ch), best, 1e-12 * best);
    }
}

// With a common relay normalization the full-opportunism feasible set contains the
// opportunistic-relay choice, so its SNR can never be lower.
TEST(FullOpportunism, DominatesOpportunisticRelayUnderCommonNormalization)
{
    std::mt19937_64 rng(9);
    auto c = NetworkConfig::uniform(2, 2, 2, 4, 1, 1, 1, 1, 10.0);
    double mean_full = 0.0, mean_relay = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
    {
        auto ch = sample_channel(c, rng);
        auto full = allocate_full_opportunism(c, ch);
        auto rel = allocate_opportunistic_relay(c, ch);
        const double sr = instantaneous_snr(c, rel.alloc, ch);
        mean_full += instantaneous_snr(c, full.alloc, ch);
        mean_relay += sr;
        // best (relay, antenna) pair with the plain sigma_f^2 relay normalization
        double best = 0.0;
        for (int r = 0; r < 2; ++r)
            for (int a = 0; a < 2; ++a)
            {
                auto alloc = allocate_dstc_uniform(c);
                alloc.p1_per_antenna = {0.0, 0.0};
                alloc.p1_per_antenna[a] = alloc.p1(c);
                alloc.p2_per_relay = {0.0, 0.0};
                alloc.p2_per_relay[r] = alloc.p2(c);
                best = std::max(best, instantaneous_snr(c, alloc, ch));
            }
        ASSERT_GE(best, sr * (1.0 - 1e-12));
        ASSERT_GE(sr, 0.0);
    }
    EXPECT_GT(mean_full, mean_relay);
}

TEST(FullOpportunism, SigmaXiClosedForm)
{
    auto c = NetworkConfig::uniform(1, 3, 1, 4, 1.7, 1, 1, 1, 10.0);
    std::mt19937_64 rng(10);
    double acc = 0.0;
    const int n = 400000;
    ChannelRealization ch;
    for (int i = 0; i < n; ++i)
    {
        sample_channel_into(c, rng, ch);
        acc += ch.f_max_sq(0);
    }
    EXPECT_NEAR(acc / n, sigma_xi_sq(c, 0), 0.01 * sigma_xi_sq(c, 0));
    EXPECT_DOUBLE_EQ(sigma_xi_sq(c, 0), 1.7 * (1.0 + 0.5 + 1.0 / 3.0));
}

TEST(OpportunisticSource, SingleAntennaEqualsDstc)
{
    std::mt19937_64 rng(11);
    auto c = NetworkConfig::uniform(2, 1, 1, 4, 1, 1, 1, 1, 10.0);
    auto d = allocate_dstc_uniform(c);
    for (int i = 0; i < 50; ++i)
    {
        auto sel = allocate_opportunistic_source(c, sample_channel(c, rng));
        EXPECT_EQ(sel.antenna, 0);
        EXPECT_EQ(sel.alloc.p1_per_antenna, d.p1_per_antenna);
        EXPECT_EQ(sel.alloc.p2_per_relay, d.p2_per_relay);
    }
}

TEST(OpportunisticSource, Dominance)
{
    std::mt19937_64 rng(12);
    auto c = NetworkConfig::uniform(2, 3, 1, 4, 1, 1, 1, 1, 10.0);
    for (int i = 0; i < 100; ++i)
    {
        auto ch = sample_channel(c, rng);
        for (int r = 0; r < 2; ++r)
        {
            const double top = std::max(std::abs(ch.f(1, r)), std::abs(ch.f(2, r)));
            ch.f(0, r) = 1.5 * top + 0.1;
        }
        EXPECT_EQ(allocate_opportunistic_source(c, ch).antenna, 0);
    }
}

TEST(OpportunisticSource, EqualsVertexEnumeration)
{
    std::mt19937_64 rng(13);
    auto c = NetworkConfig::uniform(2, 3, 2, 4, 1, 1, 1, 1, 10.0);
    c.sigma_f_sq = {0.5, 2.0};
    for (int i = 0; i < 1000; ++i)
    {
        auto ch = sample_channel(c, rng);
        double best = -1.0;
        int arg = -1;
        for (int n = 0; n < 3; ++n)
        {
            auto a = allocate_dstc_uniform(c);
            a.p1_per_antenna.assign(3, 0.0);
            a.p1_per_antenna[n] = a.p1(c);
            const double snr = instantaneous_snr(c, a, ch);
            if (snr > best)
            {
                best = snr;
                arg = n;
            }
        }
        auto sel = allocate_opportunistic_source(c, ch);
        ASSERT_EQ(sel.antenna, arg);
        auto m = selection_metrics(c, ch);
        EXPECT_NEAR(m.theta_per_antenna[arg] * sel.alloc.p1(c), best, 1e-12 * best);
    }
}

TEST(OptimalTau, SymmetricIsExactlyHalf)
{
    EXPECT_EQ(optimal_tau(NetworkConfig::uniform(2, 2, 1, 4, 1, 1, 1, 1, 100.0)), 0.5);
    EXPECT_EQ(optimal_tau(NetworkConfig::uniform(2, 2, 1, 4, 4, 2, 2, 1, 7.0)), 0.5);
    auto c = NetworkConfig::uniform(2, 2, 1, 4, 1.0 + 1e-11, 1, 1, 1, 3.0);
    EXPECT_NEAR(optimal_tau(c), 0.5, 1e-8);
}

TEST(OptimalTau, MatchesGridSearch)
{
    auto c = NetworkConfig::uniform(2, 2, 1, 4, 4.0, 1.0, 1.0, 1.0, 10.0);
    auto f = [&](double t) { return average_snr_two_phase(c, t); };
    EXPECT_NEAR(optimal_tau(c), grid_argmax(f, 1e-5), 1e-5);

    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 50; ++i)
    {
        auto r = NetworkConfig::uniform(2, 1, 1, 4, std::pow(10.0, u(rng)), std::pow(10.0, u(rng)),
                                        std::pow(10.0, u(rng)), std::pow(10.0, u(rng)), std::pow(10.0, 1.5 + 1.5 * u(rng)));
        auto g = [&](double t) { return average_snr_two_phase(r, t); };
        EXPECT_NEAR(optimal_tau(r), grid_argmax(g, 1e-5), 1e-4);
    }
}

TEST(OptimalTau, RejectsHeterogeneous)
{
    auto c = NetworkConfig::uniform(2, 2, 1);
    c.sigma_f_sq[1] = 2.0;
    EXPECT_THROW(optimal_tau(c), CapabilityError);
    EXPECT_THROW(average_snr_two_phase(c, 0.5), CapabilityError);
}

TEST(AverageSnr, LimitsAndShape)
{
    auto c = NetworkConfig::uniform(2, 2, 1, 4, 1, 1, 1, 1, 50.0);
    EXPECT_LT(average_snr_two_phase(c, 1e-9), 1e-6);
    EXPECT_LT(average_snr_two_phase(c, 1.0 - 1e-9), 1e-6);
    EXPECT_GE(average_snr_two_phase(c, 0.5), average_snr_two_phase(c, 0.3));
    EXPECT_GE(average_snr_two_phase(c, 0.5), average_snr_two_phase(c, 0.7));
    EXPECT_THROW(average_snr_two_phase(c, 0.0), DomainError);
    EXPECT_THROW(average_snr_two_phase(c, 1.0), DomainError);
}

TEST(AverageSnr, JensenMonteCarlo)
{
    auto c = NetworkConfig::uniform(2, 2, 2, 4, 2.0, 0.5, 1.0, 1.5, 30.0);
    const double tau = 0.35;
    PowerAllocation a;
    a.tau = tau;
    a.p1_per_antenna.assign(2, tau * c.total_power / 2);
    a.p2_per_relay.assign(2, (1 - tau) * c.total_power / 2);
    std::mt19937_64 rng(15);
    ChannelRealization ch;
    double num = 0.0, den = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
    {
        sample_channel_into(c, rng, ch);
        double s = 0.0, d = 0.0;
        for (int r = 0; r < 2; ++r)
        {
            const double rho2 = std::pow(relay_gain(c, a, r), 2);
            s += a.p1_per_antenna[0] * ch.f_norm_sq(r) * rho2 * ch.g_norm_sq(r);
            d += rho2 * ch.g_norm_sq(r);
        }
        num += s;
        den += d * c.noise1 + c.dst_antennas * c.noise2;
    }
    const double expect = average_snr_two_phase(c, tau);
    EXPECT_NEAR(num / den, expect, 0.01 * expect);
}
