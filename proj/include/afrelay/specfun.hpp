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


#ifndef AFRELAY_SPECFUN_HPP
#define AFRELAY_SPECFUN_HPP

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <utility>
#include <vector>

// Special functions and quadrature used by the analytical SER engine.
//
// Only integer-order Bessel K is needed by the SNR densities, so K_n is built by upward
// recurrence from K_0 and K_1. Values below the smallest normal double are returned as 0
// (never an error) so that high-SNR evaluations do not abort.

namespace afrelay::specfun
{

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Compensated (Neumaier) summation
class NeumaierSum
{
public:
    void add(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
        abs_sum_ += std::abs(v);
    }
    double value() const noexcept { return sum_ + comp_; }
    double abs_sum() const noexcept { return abs_sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double abs_sum_ = 0.0;
};

inline double log_factorial(int n)
{
    return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

inline double binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0.0;
    k = std::min(k, n - k);
    double b = 1.0;
    for (int i = 1; i <= k; ++i)
        b = b * (n - k + i) / i;
    return std::round(b);
}

// H_n = 1 + 1/2 + ... + 1/n, H_0 = 0
inline double harmonic(int n)
{
    double h = 0.0;
    for (int i = n; i >= 1; --i)
        h += 1.0 / i;
    return h;
}

namespace detail
{

inline void check_bessel_arg(double x)
{
    if (!std::isfinite(x))
        throw DomainError("bessel_k: argument must be finite");
    if (x <= 0.0)
        throw DomainError("bessel_k: argument must be positive");
}

// Power series about 0, valid (and accurate) for 0 < x <= 2. Returns unscaled {K0, K1}.
inline std::pair<double, double> bessel_k01_series(double x)
{
    const double q = 0.25 * x * x;
    const double lx = std::log(0.5 * x);

    // I0, I1 and the digamma-weighted sums of the K series
    double term0 = 1.0;     // q^k/(k!)^2
    double term1 = 1.0;     // q^k/(k!(k+1)!)
    double psi_k1 = -euler_gamma;          // psi(k+1)
    double psi_k2 = 1.0 - euler_gamma;     // psi(k+2)
    double i0 = 0.0, i1 = 0.0, s0 = 0.0, s1 = 0.0;
    for (int k = 0; k < 60; ++k)
    {
        i0 += term0;
        i1 += term1;
        s0 += term0 * (psi_k1 + euler_gamma);
        s1 += term1 * (psi_k1 + psi_k2);
        if (term0 < 1e-18 * i0 && k > 2)
            break;
        term0 *= q / ((k + 1.0) * (k + 1.0));
        term1 *= q / ((k + 1.0) * (k + 2.0));
        psi_k1 += 1.0 / (k + 1.0);
        psi_k2 += 1.0 / (k + 2.0);
    }
    i1 *= 0.5 * x;
    const double k0 = -(lx + euler_gamma) * i0 + s0;
    const double k1 = 1.0 / x + lx * i1 - 0.25 * x * s1;
    return {k0, k1};
}

// Steed/Temme continued fraction for x >= 2. Returns exp(x)-scaled {K0, K1}.
inline std::pair<double, double> bessel_k01_cf_scaled(double x)
{
    const double a1 = 0.25;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < 100000; ++i)
    {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < 1e-17)
            break;
    }
    h *= a1;
    const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
    const double k1 = k0 * (x + 0.5 - h) / x;
    return {k0, k1};
}

} // namespace detail

// exp(x) * K_|n|(x)
inline double bessel_k_scaled(int order, double x)
{
    detail::check_bessel_arg(x);
    const int n = std::abs(order);
    double k0, k1;
    if (x <= 2.0)
    {
        std::tie(k0, k1) = detail::bessel_k01_series(x);
        const double e = std::exp(x);
        k0 *= e;
        k1 *= e;
    }
    else
        std::tie(k0, k1) = detail::bessel_k01_cf_scaled(x);

    if (n == 0)
        return k0;
    double km = k0, kn = k1;
    for (int j = 1; j < n; ++j)
    {
        const double kp = km + (2.0 * j / x) * kn;
        km = kn;
        kn = kp;
    }
    return kn;
}

// Modified Bessel function of the second kind, integer order; K_{-n} = K_n.
// Underflows to 0 for x beyond ~705.
inline double bessel_k(int order, double x)
{
    const double ks = bessel_k_scaled(order, x);
    if (x > 700.0)
        return std::exp(std::log(ks) - x);
    return ks * std::exp(-x);
}

// log K_|n|(x) without overflow or underflow for large orders or arguments
inline double log_bessel_k(int order, double x)
{
    detail::check_bessel_arg(x);
    const int n = std::abs(order);
    double k0, k1;
    double shift = 0.0;
    if (x <= 2.0)
        std::tie(k0, k1) = detail::bessel_k01_series(x);
    else
    {
        std::tie(k0, k1) = detail::bessel_k01_cf_scaled(x);
        shift = -x;
    }
    if (n == 0)
        return std::log(k0) + shift;
    double logk = std::log(k1);
    double ratio = k1 / k0; // K_{j}/K_{j-1} at j = 1
    for (int j = 1; j < n; ++j)
    {
        // K_{j+1}/K_j = K_{j-1}/K_j + 2j/x
        ratio = 1.0 / ratio + 2.0 * j / x;
        logk += std::log(ratio);
    }
    return logk + shift;
}

// Gaussian tail probability Q(x) = P(N(0,1) > x)
inline double gaussian_q(double x)
{
    if (!std::isfinite(x))
        throw DomainError("gaussian_q: argument must be finite");
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

// Gamma(n, x) for integer n >= 1 via the finite sum (n-1)! e^{-x} sum_{k<n} x^k/k!
inline double upper_incomplete_gamma(int order, double x)
{
    if (order < 1)
        throw DomainError("upper_incomplete_gamma: order must be >= 1");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw DomainError("upper_incomplete_gamma: x must be finite and >= 0");
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < order; ++k)
    {
        term *= x / k;
        sum += term;
    }
    return factorial(order - 1) * std::exp(-x) * sum;
}

// Regularized lower incomplete gamma P(n, x) for integer n; accurate when P is tiny.
inline double regularized_lower_gamma(int order, double x)
{
    if (order < 1)
        throw DomainError("regularized_lower_gamma: order must be >= 1");
    if (x <= 0.0)
        return 0.0;
    if (x < order + 1.0)
    {
        // P(n,x) = x^n e^{-x}/n! * sum_k x^k / ((n+1)...(n+k))
        double term = 1.0, sum = 1.0;
        for (int k = 1; k < 1000; ++k)
        {
            term *= x / (order + k);
            sum += term;
            if (term < 1e-17 * sum)
                break;
        }
        return std::exp(order * std::log(x) - x - log_factorial(order)) * sum;
    }
    return 1.0 - upper_incomplete_gamma(order, x) / factorial(order - 1);
}

// ------------------------------------------------------------------------
// Quadrature
// ------------------------------------------------------------------------

enum class SemiInfiniteMap
{
    log_map,     // t = exp(u), u in [-L, L]
    rational_map // t = u / (1 - u), u in [0, 1)
};

struct QuadratureSpec
{
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
    SemiInfiniteMap semi_infinite_transform = SemiInfiniteMap::log_map;

    void validate() const
    {
        if (!(abs_tol > 0.0))
            throw ConfigError("abs_tol", "must be > 0");
        if (!(rel_tol > 0.0))
            throw ConfigError("rel_tol", "must be > 0");
        if (max_subdivisions < 1)
            throw ConfigError("max_subdivisions", "must be >= 1");
    }
};

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
    int subdivisions = 0;
};

namespace detail
{

struct GkPanel
{
    double a, b, value, error;
    bool operator<(const GkPanel &o) const { return error < o.error; }
};

// 15-point Gauss-Kronrod rule with the QUADPACK error heuristic
template <typename F>
GkPanel gauss_kronrod15(F &f, double a, double b)
{
    static constexpr std::array<double, 8> xgk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
    static constexpr std::array<double, 8> wgk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double fc = f(centr);
    double resg = fc * wg[3];
    double resk = fc * wgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> fv1{}, fv2{};
    for (int j = 0; j < 7; ++j)
    {
        const double dx = hlgth * xgk[j];
        const double f1 = f(centr - dx);
        const double f2 = f(centr + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += wgk[j] * (f1 + f2);
        resabs += wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1)
            resg += wg[j / 2] * (f1 + f2);
    }
    const double reskh = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

    const double result = resk * hlgth;
    resabs *= std::abs(hlgth);
    resasc *= std::abs(hlgth);
    double abserr = std::abs((resk - resg) * hlgth);
    if (resasc != 0.0 && abserr != 0.0)
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        abserr = std::max(50.0 * eps * resabs, abserr);
    return {a, b, result, abserr};
}

// Globally adaptive bisection starting from `panels` equal pieces of [a, b]
template <typename F>
QuadratureResult integrate_adaptive(F &&f, double a, double b, int panels, const QuadratureSpec &spec)
{
    spec.validate();
    std::priority_queue<GkPanel> heap;
    double total = 0.0, err = 0.0;
    const double w = (b - a) / panels;
    for (int i = 0; i < panels; ++i)
    {
        const double lo = a + i * w;
        const double hi = (i == panels - 1) ? b : lo + w;
        GkPanel p = gauss_kronrod15(f, lo, hi);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int subdivisions = 0;
    auto done = [&] { return err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    while (!done())
    {
        if (subdivisions >= spec.max_subdivisions)
        {
            throw ConvergenceError("quadrature: tolerance not reached within max_subdivisions",
                                   total, err);
        }
        GkPanel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
            throw ConvergenceError("quadrature: interval cannot be subdivided further", total, err);
        GkPanel left = gauss_kronrod15(f, worst.a, mid);
        GkPanel right = gauss_kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // exact re-summation of the final partition
    double v = 0.0, e = 0.0;
    while (!heap.empty())
    {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    return {v, e, subdivisions};
}

} // namespace detail

// Adaptive Gauss-Kronrod over the finite interval [a, b]
template <typename F>
QuadratureResult integrate(F &&f, double a, double b, const QuadratureSpec &spec = {}, int panels = 1)
{
    return detail::integrate_adaptive(std::forward<F>(f), a, b, panels, spec);
}

// Log-map window: t in [e^-60, e^60] covers every integrand this library produces
inline constexpr double log_map_half_width = 60.0;

// Integral of f over (0, inf). f may have an integrable singularity at 0.
template <typename F>
QuadratureResult integrate_semi_infinite_ex(F &&f, const QuadratureSpec &spec = {})
{
    if (spec.semi_infinite_transform == SemiInfiniteMap::log_map)
    {
        auto g = [&f](double u) {
            const double t = std::exp(u);
            const double v = f(t);
            return v == 0.0 ? 0.0 : v * t;
        };
        return detail::integrate_adaptive(g, -log_map_half_width, log_map_half_width,
                                          static_cast<int>(log_map_half_width), spec);
    }
    auto g = [&f](double u) {
        if (u >= 1.0)
            return 0.0;
        const double om = 1.0 - u;
        const double v = f(u / om);
        return v == 0.0 ? 0.0 : v / (om * om);
    };
    return detail::integrate_adaptive(g, 0.0, 1.0, 64, spec);
}

template <typename F>
double integrate_semi_infinite(F &&f, const QuadratureSpec &spec = {})
{
    return integrate_semi_infinite_ex(std::forward<F>(f), spec).value;
}

// n-point Gauss-Legendre nodes and weights on [a, b]
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n, double a, double b)
{
    if (n < 1)
        throw ContractError("gauss_legendre: n must be >= 1");
    std::vector<double> x(n), w(n);
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it)
        {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j)
            {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15)
                break;
        }
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    return {x, w};
}

} // namespace afrelay::specfun

#endif
