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


#ifndef AFRELAY_ANALYSIS_HPP
#define AFRELAY_ANALYSIS_HPP

#include "errors.hpp"
#include "network.hpp"
#include "powerctl.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace afrelay
{

// ------------------------------------------------------------------------
// Parameters
// ------------------------------------------------------------------------

// gamma_r = X Y / (a Y + b_r) with X ~ Gamma(Ns, Xbar_r) and Y ~ Gamma(Nd, Ybar_r) (shape, scale).
struct GammaRatioParams
{
    int Ns = 1;
    int Nd = 1;
    double a = 1.0;
    std::vector<double> b;
    std::vector<double> Xbar; // scale of ||f_r||^2, i.e. sigma_{f_r}^2
    std::vector<double> Ybar; // scale of ||g_r||^2, i.e. sigma_{g_r}^2

    int mu() const { return Ns + Nd; }
    int nu() const { return Nd - Ns; }
    int num_relays() const { return static_cast<int>(b.size()); }

    static GammaRatioParams from_config(const NetworkConfig &c, double tau = 0.5)
    {
        c.validate();
        const double P1 = tau * c.total_power, P2 = (1.0 - tau) * c.total_power;
        GammaRatioParams p;
        p.Ns = c.src_antennas;
        p.Nd = c.dst_antennas;
        p.a = p.Ns * c.noise1 / P1;
        for (int r = 0; r < c.num_relays; ++r)
        {
            p.b.push_back(p.Ns * p.Nd * c.noise2 * (c.sigma_f_sq[r] * P1 + c.noise1) / (P1 * P2));
            p.Xbar.push_back(c.sigma_f_sq[r]);
            p.Ybar.push_back(c.sigma_g_sq[r]);
        }
        return p;
    }
};

// zeta_r = X Y / (alpha Y + beta_r) with X = max of Ns iid Exp(sigma_{f_r}^2), Y ~ Gamma(Nd, Ybar_r).
struct ZetaParams
{
    int Ns = 1;
    int Nd = 1;
    double alpha = 1.0;
    std::vector<double> beta;
    std::vector<double> sigma_f_sq;
    std::vector<double> Ybar;

    int num_relays() const { return static_cast<int>(beta.size()); }

    static ZetaParams from_config(const NetworkConfig &c, double tau = 0.5)
    {
        c.validate();
        const double P1 = tau * c.total_power, P2 = (1.0 - tau) * c.total_power;
        ZetaParams p;
        p.Ns = c.src_antennas;
        p.Nd = c.dst_antennas;
        p.alpha = c.noise1 / P1;
        for (int r = 0; r < c.num_relays; ++r)
        {
            p.beta.push_back(p.Nd * c.noise2 * (sigma_xi_sq(c, r) * P1 + c.noise1) / (P1 * P2));
            p.sigma_f_sq.push_back(c.sigma_f_sq[r]);
            p.Ybar.push_back(c.sigma_g_sq[r]);
        }
        return p;
    }
};

// ------------------------------------------------------------------------
// Curves
// ------------------------------------------------------------------------

enum class Provenance
{
    simulated,
    exact,
    asymptotic,
    upper_bound,
    mgf
};

inline std::string to_string(Provenance p)
{
    switch (p)
    {
    case Provenance::simulated:
        return "simulated";
    case Provenance::exact:
        return "exact";
    case Provenance::asymptotic:
        return "asymptotic";
    case Provenance::upper_bound:
        return "upper_bound";
    case Provenance::mgf:
        return "mgf";
    }
    return "?";
}

struct SerPoint
{
    double snr_db = 0.0;
    double value = 0.0;
    double ci_halfwidth = 0.0;
};

struct SerCurve
{
    std::vector<SerPoint> points;
    Provenance provenance = Provenance::exact;
};

// ------------------------------------------------------------------------
// Internals
// ------------------------------------------------------------------------

namespace detail
{

// Sum/|result| above this switches an alternating series to quadrature
inline constexpr double cancellation_limit = 1e6;

inline specfun::QuadratureSpec inner_quadrature()
{
    specfun::QuadratureSpec s;
    s.abs_tol = 1e-300;
    s.rel_tol = 1e-11;
    return s;
}

inline specfun::QuadratureSpec ser_quadrature()
{
    specfun::QuadratureSpec s;
    s.abs_tol = 1e-16;
    s.rel_tol = 1e-9;
    return s;
}

inline double log_binomial(int n, int k)
{
    return specfun::log_factorial(n) - specfun::log_factorial(k) - specfun::log_factorial(n - k);
}

// E_Y[h(Y)] for Y ~ Gamma(Nd, Ybar), integrating over u = y / Ybar
template <typename H>
double expect_over_gamma(int Nd, double Ybar, H &&h)
{
    const double lnorm = specfun::log_factorial(Nd - 1);
    auto f = [&](double u) {
        const double w = std::exp((Nd - 1) * std::log(u) - u - lnorm);
        return w == 0.0 ? 0.0 : w * h(Ybar * u);
    };
    return specfun::integrate_semi_infinite(f, inner_quadrature());
}

inline void check_relay(int r, int R)
{
    if (r < 0 || r >= R)
        throw ContractError("relay index out of range");
}

// integral_0^inf c Q(sqrt(g x)) p(x) dx, integrated over u = g x
template <typename Pdf>
double ser_integral(const ModulationSpec &mod, Pdf &&pdf)
{
    auto f = [&](double u) {
        const double q = specfun::gaussian_q(std::sqrt(u));
        if (q == 0.0)
            return 0.0;
        return mod.c * q * pdf(u / mod.g) / mod.g;
    };
    const double v = specfun::integrate_semi_infinite(f, ser_quadrature());
    return std::clamp(v, 0.0, 1.0);
}

} // namespace detail

// ------------------------------------------------------------------------
// gamma_r family (no CSI at the source)
// ------------------------------------------------------------------------

inline double pdf_gamma_r(const GammaRatioParams &p, int r, double gamma)
{
    detail::check_relay(r, p.num_relays());
    if (!(gamma > 0.0))
        throw DomainError("pdf_gamma_r: gamma must be > 0");
    const double X = p.Xbar[r], Y = p.Ybar[r], b = p.b[r];
    const double z = b * gamma / (X * Y);
    const double x = 2.0 * std::sqrt(z);
    const double lz = std::log(z);
    const double base = std::log(2.0) - p.a * gamma / X - std::log(gamma) - specfun::log_factorial(p.Nd - 1) -
                        specfun::log_factorial(p.Ns - 1);
    const double lratio = std::log(p.a * Y / b);
    double sum = 0.0;
    for (int k = 0; k <= p.Ns; ++k)
    {
        const double lt = base + k * lratio + detail::log_binomial(p.Ns, k) + 0.5 * (p.mu() + k) * lz +
                          specfun::log_bessel_k(p.nu() + k, x);
        sum += std::exp(lt);
    }
    return sum;
}

// E_Y[ P(Ns, gamma (a Y + b) / (Y Xbar)) ]
inline double cdf_gamma_r_quadrature(const GammaRatioParams &p, int r, double gamma)
{
    detail::check_relay(r, p.num_relays());
    if (!(gamma > 0.0))
        return 0.0;
    const double X = p.Xbar[r], b = p.b[r];
    return detail::expect_over_gamma(p.Nd, p.Ybar[r], [&](double y) {
        return specfun::regularized_lower_gamma(p.Ns, gamma * (p.a + b / y) / X);
    });
}

inline double cdf_gamma_r(const GammaRatioParams &p, int r, double gamma)
{
    detail::check_relay(r, p.num_relays());
    if (!(gamma > 0.0))
        return 0.0;
    if (std::isinf(gamma))
        return 1.0;
    const double X = p.Xbar[r], Y = p.Ybar[r], b = p.b[r];
    const double z = b * gamma / (X * Y);
    const double x = 2.0 * std::sqrt(z);
    const double lz = std::log(z);
    const double lratio = std::log(p.a * Y / b);
    const double base = std::log(2.0) - p.a * gamma / X - specfun::log_factorial(p.Nd - 1);
    specfun::NeumaierSum s;
    for (int n = 0; n < p.Ns; ++n)
        for (int k = 0; k <= n; ++k)
        {
            const double lt = base + detail::log_binomial(n, k) + k * lratio - specfun::log_factorial(n) +
                              0.5 * (p.Nd + n + k) * lz + specfun::log_bessel_k(p.Nd - n + k, x);
            s.add(std::exp(lt));
        }
    const double tail = s.value();
    const double cdf = 1.0 - tail;
    if ((1.0 + s.abs_sum()) > detail::cancellation_limit * std::abs(cdf))
        return cdf_gamma_r_quadrature(p, r, gamma);
    return std::clamp(cdf, 0.0, 1.0);
}

inline double cdf_gamma_max(const GammaRatioParams &p, double gamma)
{
    double prod = 1.0;
    for (int r = 0; r < p.num_relays(); ++r)
        prod *= cdf_gamma_r(p, r, gamma);
    return prod;
}

inline double pdf_gamma_max(const GammaRatioParams &p, double gamma)
{
    const int R = p.num_relays();
    if (R == 1)
        return pdf_gamma_r(p, 0, gamma);
    std::vector<double> F(R);
    for (int r = 0; r < R; ++r)
        F[r] = cdf_gamma_r(p, r, gamma);
    double sum = 0.0;
    for (int r = 0; r < R; ++r)
    {
        double prod = 1.0;
        for (int j = 0; j < R; ++j)
            if (j != r)
                prod *= F[j];
        if (prod != 0.0)
            sum += pdf_gamma_r(p, r, gamma) * prod;
    }
    return sum;
}

inline double ser_exact_opportunistic(const GammaRatioParams &p, const ModulationSpec &mod)
{
    return detail::ser_integral(mod, [&](double g) { return pdf_gamma_max(p, g); });
}

// Small-argument form of pdf_gamma_r for Ns = Nd (K_0(x) ~ -ln x, K_k(x) ~ Gamma(k)/2 (x/2)^-k)
inline double pdf_gamma_r_small_arg(const GammaRatioParams &p, int r, double gamma)
{
    detail::check_relay(r, p.num_relays());
    if (p.Ns != p.Nd)
        throw CapabilityError("small-argument PDF form requires Ns = Nd");
    if (!(gamma > 0.0))
        throw DomainError("pdf_gamma_r_small_arg: gamma must be > 0");
    const int N = p.Ns;
    const double X = p.Xbar[r], Y = p.Ybar[r], b = p.b[r];
    const double z = b * gamma / (X * Y);
    const double lf = 2.0 * specfun::log_factorial(N - 1);
    const double common = std::exp(-p.a * gamma / X + N * std::log(z) - lf) / gamma;
    double s = 0.0;
    for (int k = 1; k <= N; ++k)
        s += std::exp(detail::log_binomial(N, k) + k * std::log(p.a * Y / b) + specfun::log_factorial(k - 1));
    return common * (s - 2.0 * std::log(2.0 * std::sqrt(z)));
}

// ------------------------------------------------------------------------
// zeta_r family (source knows source-relay CSI)
// ------------------------------------------------------------------------

inline double pdf_zeta_r_quadrature(const ZetaParams &p, int r, double zeta)
{
    detail::check_relay(r, p.num_relays());
    if (!(zeta > 0.0))
        throw DomainError("pdf_zeta_r: zeta must be > 0");
    const double s2 = p.sigma_f_sq[r], beta = p.beta[r];
    return detail::expect_over_gamma(p.Nd, p.Ybar[r], [&](double y) {
        const double slope = p.alpha + beta / y;
        const double x = zeta * slope / s2;
        const double e = std::exp(-x);
        if (e == 0.0)
            return 0.0;
        const double head = p.Ns == 1 ? 1.0 : std::pow(-std::expm1(-x), p.Ns - 1);
        return p.Ns * head * e / s2 * slope;
    });
}

inline double cdf_zeta_r_quadrature(const ZetaParams &p, int r, double zeta)
{
    detail::check_relay(r, p.num_relays());
    if (!(zeta > 0.0))
        return 0.0;
    const double s2 = p.sigma_f_sq[r], beta = p.beta[r];
    return detail::expect_over_gamma(p.Nd, p.Ybar[r], [&](double y) {
        return std::pow(-std::expm1(-zeta * (p.alpha + beta / y) / s2), p.Ns);
    });
}

inline double pdf_zeta_r(const ZetaParams &p, int r, double zeta)
{
    detail::check_relay(r, p.num_relays());
    if (!(zeta > 0.0))
        throw DomainError("pdf_zeta_r: zeta must be > 0");
    const double s2 = p.sigma_f_sq[r], Y = p.Ybar[r], beta = p.beta[r];
    const double lnorm = specfun::log_factorial(p.Nd - 1) + std::log(s2);
    specfun::NeumaierSum s;
    for (int k = 1; k <= p.Ns; ++k)
    {
        const double w = beta * k * zeta / (s2 * Y);
        const double x = 2.0 * std::sqrt(w);
        const double lw = std::log(w);
        const double lc = std::log(2.0 * k) + detail::log_binomial(p.Ns, k) - p.alpha * zeta * k / s2 - lnorm;
        const double t1 = std::exp(lc + std::log(p.alpha) + 0.5 * p.Nd * lw + specfun::log_bessel_k(p.Nd, x));
        const double t2 =
            std::exp(lc + std::log(beta / Y) + 0.5 * (p.Nd - 1) * lw + specfun::log_bessel_k(p.Nd - 1, x));
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;
        s.add(sign * t1);
        s.add(sign * t2);
    }
    const double v = s.value();
    if (s.abs_sum() > detail::cancellation_limit * std::abs(v))
        return pdf_zeta_r_quadrature(p, r, zeta);
    return std::max(v, 0.0);
}

inline double cdf_zeta_r(const ZetaParams &p, int r, double zeta)
{
    detail::check_relay(r, p.num_relays());
    if (!(zeta > 0.0))
        return 0.0;
    if (std::isinf(zeta))
        return 1.0;
    const double s2 = p.sigma_f_sq[r], Y = p.Ybar[r], beta = p.beta[r];
    specfun::NeumaierSum s;
    s.add(1.0);
    for (int k = 1; k <= p.Ns; ++k)
    {
        const double w = beta * k * zeta / (s2 * Y);
        const double lt = std::log(2.0) + detail::log_binomial(p.Ns, k) - p.alpha * zeta * k / s2 -
                          specfun::log_factorial(p.Nd - 1) + 0.5 * p.Nd * std::log(w) +
                          specfun::log_bessel_k(p.Nd, 2.0 * std::sqrt(w));
        s.add((k % 2 == 0 ? 1.0 : -1.0) * std::exp(lt));
    }
    const double v = s.value();
    if (s.abs_sum() > detail::cancellation_limit * std::abs(v))
        return cdf_zeta_r_quadrature(p, r, zeta);
    return std::clamp(v, 0.0, 1.0);
}

inline double cdf_zeta_max(const ZetaParams &p, double zeta)
{
    double prod = 1.0;
    for (int r = 0; r < p.num_relays(); ++r)
        prod *= cdf_zeta_r(p, r, zeta);
    return prod;
}

inline double pdf_zeta_max(const ZetaParams &p, double zeta)
{
    const int R = p.num_relays();
    if (R == 1)
        return pdf_zeta_r(p, 0, zeta);
    std::vector<double> F(R);
    for (int r = 0; r < R; ++r)
        F[r] = cdf_zeta_r(p, r, zeta);
    double sum = 0.0;
    for (int r = 0; r < R; ++r)
    {
        double prod = 1.0;
        for (int j = 0; j < R; ++j)
            if (j != r)
                prod *= F[j];
        if (prod != 0.0)
            sum += pdf_zeta_r(p, r, zeta) * prod;
    }
    return sum;
}

inline double ser_exact_full_opportunism(const ZetaParams &p, const ModulationSpec &mod)
{
    return detail::ser_integral(mod, [&](double z) { return pdf_zeta_max(p, z); });
}

// ------------------------------------------------------------------------
// Behaviour at zero and high-SNR asymptotes
// ------------------------------------------------------------------------

// log of the (N-1)th derivative of pdf_gamma_r at 0, N = min(Ns, Nd), Ns != Nd
inline double log_phi_constant(const GammaRatioParams &p, int r)
{
    detail::check_relay(r, p.num_relays());
    if (p.Ns == p.Nd)
        throw CapabilityError("derivative-at-zero constant requires Ns != Nd");
    const double X = p.Xbar[r], Y = p.Ybar[r], b = p.b[r];
    if (p.Ns < p.Nd)
    {
        double mx = -std::numeric_limits<double>::infinity();
        std::vector<double> lt;
        for (int k = 0; k <= p.Ns; ++k)
        {
            lt.push_back(detail::log_binomial(p.Ns, k) + k * std::log(p.a) + (p.Ns - k) * std::log(b) +
                         specfun::log_factorial(p.nu() + k - 1) - specfun::log_factorial(p.Nd - 1) -
                         p.Ns * std::log(X) - (p.Ns - k) * std::log(Y));
            mx = std::max(mx, lt.back());
        }
        double s = 0.0;
        for (double v : lt)
            s += std::exp(v - mx);
        return mx + std::log(s);
    }
    return specfun::log_factorial(p.Ns - p.Nd - 1) - specfun::log_factorial(p.Ns - 1) +
           p.Nd * std::log(b / (X * Y));
}

inline double phi_constant(const GammaRatioParams &p, int r) { return std::exp(log_phi_constant(p, r)); }

// log of the (Ns-1)th derivative of pdf_zeta_r at 0 (Ns < Nd):
// Ns! sigma^-2Ns sum_k C(Ns,k) alpha^(Ns-k) beta^k (Nd-k-1)! / ((Nd-1)! Ybar^k)
inline double log_delta_constant(const ZetaParams &p, int r)
{
    detail::check_relay(r, p.num_relays());
    if (p.Ns >= p.Nd)
        throw CapabilityError("full-opportunism asymptote requires Ns < Nd");
    const double s2 = p.sigma_f_sq[r], Y = p.Ybar[r], beta = p.beta[r];
    std::vector<double> lt;
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= p.Ns; ++k)
    {
        lt.push_back(detail::log_binomial(p.Ns, k) + (p.Ns - k) * std::log(p.alpha) + k * std::log(beta) +
                     specfun::log_factorial(p.Nd - k - 1) - specfun::log_factorial(p.Nd - 1) - k * std::log(Y));
        mx = std::max(mx, lt.back());
    }
    double s = 0.0;
    for (double v : lt)
        s += std::exp(v - mx);
    return specfun::log_factorial(p.Ns) - p.Ns * std::log(s2) + mx + std::log(s);
}

inline double delta_constant(const ZetaParams &p, int r) { return std::exp(log_delta_constant(p, r)); }

namespace detail
{

// With p_r(x) ~ C_r x^(N-1) / (N-1)! near 0, p_max(x) ~ K x^t, t = N R - 1,
// K = R prod_r C_r / ((N-1)! (N!)^(R-1)), and
// integral c Q(sqrt(g x)) K x^t dx = c K (2t+1)!! / (2 (t+1) g^(t+1)).
inline double asymptote_from_log_constants(const std::vector<double> &log_c, int N, const ModulationSpec &mod)
{
    const int R = static_cast<int>(log_c.size());
    const int t = N * R - 1;
    double lK = std::log(static_cast<double>(R)) - specfun::log_factorial(N - 1) -
                (R - 1) * specfun::log_factorial(N);
    for (double v : log_c)
        lK += v;
    // (2t+1)!! = (2t+2)! / (2^(t+1) (t+1)!)
    const double ldf = specfun::log_factorial(2 * t + 2) - (t + 1) * std::log(2.0) - specfun::log_factorial(t + 1);
    const double lpe = std::log(mod.c) + lK + ldf - std::log(2.0 * (t + 1)) - (t + 1) * std::log(mod.g);
    return std::min(1.0, std::exp(lpe));
}

} // namespace detail

inline double ser_upper_bound_equal_antennas(const NetworkConfig &config, const ModulationSpec &mod,
                                             double tau = 0.5);

inline double ser_asymptotic(const NetworkConfig &config, const ModulationSpec &mod, SchemeId scheme,
                             double tau = 0.5)
{
    config.validate();
    if (scheme == SchemeId::OpportunisticRelay)
    {
        if (config.src_antennas == config.dst_antennas)
            return ser_upper_bound_equal_antennas(config, mod, tau);
        const auto p = GammaRatioParams::from_config(config, tau);
        std::vector<double> lc;
        for (int r = 0; r < p.num_relays(); ++r)
            lc.push_back(log_phi_constant(p, r));
        return detail::asymptote_from_log_constants(lc, std::min(p.Ns, p.Nd), mod);
    }
    if (scheme == SchemeId::FullOpportunism)
    {
        if (config.src_antennas >= config.dst_antennas)
            throw CapabilityError("full-opportunism asymptote holds only for Ns < Nd (diversity Ns R)");
        const auto p = ZetaParams::from_config(config, tau);
        std::vector<double> lc;
        for (int r = 0; r < p.num_relays(); ++r)
            lc.push_back(log_delta_constant(p, r));
        return detail::asymptote_from_log_constants(lc, p.Ns, mod);
    }
    throw CapabilityError("no closed-form asymptote for scheme " + to_string(scheme));
}

// ------------------------------------------------------------------------
// Closed-form bound for Ns = Nd
// ------------------------------------------------------------------------

namespace detail
{

// integral_0^inf exp(-m x) x^(n-1) ptilde_r(x) e^{a x / Xbar} dx with the small-argument PDF,
// i.e. (n-1)! / m^n { sum_k Psi_k + Psi_0 [ln(m Xbar Ybar / (4 b)) + kappa - H_(n-1)] }
inline double bound_term(const GammaRatioParams &p, int r, double m, int n)
{
    const int N = p.Ns;
    const double X = p.Xbar[r], Y = p.Ybar[r], b = p.b[r];
    const double lf = 2.0 * specfun::log_factorial(N - 1);
    const double psi0 = std::exp(N * std::log(b / (X * Y)) - lf);
    double psik = 0.0;
    for (int k = 1; k <= N; ++k)
        psik += std::exp(detail::log_binomial(N, k) + k * std::log(p.a) + (N - k) * std::log(b) +
                         specfun::log_factorial(k - 1) - lf - N * std::log(X) - (N - k) * std::log(Y));
    const double bracket =
        psik + psi0 * (std::log(m * X * Y / (4.0 * b)) + specfun::euler_gamma - specfun::harmonic(n - 1));
    return std::exp(specfun::log_factorial(n - 1) - n * std::log(m)) * bracket;
}

} // namespace detail

inline double ser_upper_bound_equal_antennas(const NetworkConfig &config, const ModulationSpec &mod, double tau)
{
    config.validate();
    if (config.src_antennas != config.dst_antennas)
        throw CapabilityError("closed-form bound requires Ns = Nd");
    const auto p = GammaRatioParams::from_config(config, tau);
    const int R = p.num_relays(), N = p.Ns;
    const double g = mod.g;
    double total = 0.0;
    if (R == 2)
    {
        for (int r = 0; r < 2; ++r)
        {
            const int j = 1 - r;
            const double m1 = g + p.a / p.Xbar[r];
            const double m2 = m1 + p.a / p.Xbar[j];
            total += detail::bound_term(p, r, m1, N) - detail::bound_term(p, r, m2, N);
        }
    }
    else
    {
        for (int r = 0; r < R; ++r)
        {
            double prod = 1.0;
            for (int j = 0; j < R; ++j)
                if (j != r)
                    prod *= p.a / p.Xbar[j];
            total += prod * detail::bound_term(p, r, g + p.a / p.Xbar[r], N + R - 1);
        }
    }
    return std::clamp(total, 0.0, 1.0);
}

// ------------------------------------------------------------------------
// MGF route for the antenna-selection scheme
// ------------------------------------------------------------------------

struct MgfSerResult
{
    double value = 0.0;
    bool precision_warning = false;
    std::string warning;
};

// eta_r = P1 |f_{n*,r}|^2 rho_r^2 ||g_r||^2 / (sum_k rho_k^2 ||g_k||^2 N1 + Nd N2), rho_r^2 = (P2/R) / (sigma^2 P1 + N1).
// The eta_r share the selected antenna and the denominator, so they are not independent. `joint`
// estimates E[exp(s sum_r eta_r)] from mc_samples channel draws; `independent` multiplies the
// per-relay marginal MGFs. Either is integrated with 64-node Gauss-Legendre over phi in [0, pi/2].
enum class MgfMode
{
    joint,
    independent
};

inline MgfSerResult ser_mgf_opportunistic_source(const NetworkConfig &config, const ModulationSpec &mod,
                                                 int mc_samples, std::uint64_t seed = 1,
                                                 MgfMode mode = MgfMode::joint)
{
    config.validate();
    if (mc_samples < 1)
        throw ContractError("ser_mgf_opportunistic_source: mc_samples must be >= 1");
    const int R = config.num_relays;
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> eta(R, std::vector<double>(static_cast<std::size_t>(mc_samples)));
    ChannelRealization chan;
    for (int i = 0; i < mc_samples; ++i)
    {
        sample_channel_into(config, rng, chan);
        const auto sel = allocate_opportunistic_source(config, chan);
        const double P1 = sel.alloc.p1(config);
        double den = config.dst_antennas * config.noise2;
        std::vector<double> rho2(R);
        for (int r = 0; r < R; ++r)
        {
            rho2[r] = std::pow(relay_gain(config, sel.alloc, r), 2);
            den += rho2[r] * chan.g_norm_sq(r) * config.noise1;
        }
        for (int r = 0; r < R; ++r)
            eta[r][i] = P1 * std::norm(chan.f(sel.antenna, r)) * rho2[r] * chan.g_norm_sq(r) / den;
    }
    const auto [nodes, weights] = specfun::gauss_legendre(64, 0.0, std::numbers::pi / 2.0);
    double acc = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q)
    {
        const double sn = std::sin(nodes[q]);
        const double s = -mod.g / (2.0 * sn * sn);
        double mgf = 1.0;
        if (mode == MgfMode::independent)
            for (int r = 0; r < R; ++r)
            {
                double m = 0.0;
                for (double e : eta[r])
                    m += std::exp(s * e);
                mgf *= m / mc_samples;
            }
        else
        {
            double m = 0.0;
            for (int i = 0; i < mc_samples; ++i)
            {
                double sum = 0.0;
                for (int r = 0; r < R; ++r)
                    sum += eta[r][i];
                m += std::exp(s * sum);
            }
            mgf = m / mc_samples;
        }
        acc += weights[q] * mgf;
    }
    MgfSerResult out;
    out.value = std::clamp(mod.c / std::numbers::pi * acc, 0.0, 1.0);
    if (mc_samples < 1000)
    {
        out.precision_warning = true;
        out.warning = "MGF estimated from fewer than 1000 channel draws; result is imprecise";
    }
    return out;
}

// ------------------------------------------------------------------------
// Diversity
// ------------------------------------------------------------------------

// Negated least-squares slope of log10(SER) against log10(SNR) over the upper half of the
// positive points (at least 3). tail_points > 0 fixes the number of points used instead.
inline double estimate_diversity_order(const SerCurve &curve, int tail_points = 0)
{
    std::vector<SerPoint> pts;
    for (const auto &p : curve.points)
        if (p.value > 0.0 && std::isfinite(p.value))
            pts.push_back(p);
    std::sort(pts.begin(), pts.end(), [](const SerPoint &x, const SerPoint &y) { return x.snr_db < y.snr_db; });
    const int n = static_cast<int>(pts.size());
    const int use = tail_points > 0 ? tail_points : std::max(3, (n + 1) / 2);
    if (n < 3 || use < 3 || use > n)
        throw ContractError("estimate_diversity_order: need at least 3 positive points in the high-SNR tail");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = n - use; i < n; ++i)
    {
        const double x = pts[i].snr_db / 10.0, y = std::log10(pts[i].value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (use * sxy - sx * sy) / (use * sxx - sx * sx);
    return -slope;
}

} // namespace afrelay

#endif
