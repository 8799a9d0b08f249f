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


#include <afrelay/specfun.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace sf = afrelay::specfun;

namespace
{

// Composite Simpson rule; deliberately independent of the library integrator.
template <typename F>
double simpson(F f, double a, double b, int n)
{
    if (n % 2)
        ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt
double bessel_k_integral(int n, double x)
{
    const double tmax = std::acosh(std::max(760.0 / x, 2.0));
    // factor the exponential out so that large x does not underflow the integrand
    return simpson([&](double t) { return std::exp(-x * (std::cosh(t) - 1.0)) * std::cosh(n * t); },
                   0.0, tmax, 400000) * std::exp(-x);
}

// erfc through the Maclaurin series of erf (fine for |z| < 2)
double erfc_series(double z)
{
    double sum = 0.0, term = z;
    for (int n = 0; n < 200; ++n)
    {
        sum += term / (2 * n + 1);
        term *= -z * z / (n + 1);
    }
    return 1.0 - 2.0 / std::sqrt(std::numbers::pi) * sum;
}

} // namespace

TEST(BesselK, NegativeOrderMirrorsPositive)
{
    EXPECT_EQ(sf::bessel_k(-3, 2.5), sf::bessel_k(3, 2.5));
    for (double x : {1e-6, 1e-3, 0.5, 2.0, 7.0, 100.0})
        for (int n = 0; n < 8; ++n)
            EXPECT_EQ(sf::bessel_k(n, x), sf::bessel_k(-n, x));
}

TEST(BesselK, LogDivergenceAtOrigin)
{
    EXPECT_GT(sf::bessel_k(0, 1e-6), sf::bessel_k(0, 1e-3));
    // K0(x) ~ -ln(x/2) - gamma
    const double x = 1e-8;
    EXPECT_NEAR(sf::bessel_k(0, x), -std::log(x / 2) - sf::euler_gamma, 1e-12);
}

TEST(BesselK, K1AtOneMatchesIntegralRepresentation)
{
    const double oracle = bessel_k_integral(1, 1.0);
    EXPECT_NEAR(sf::bessel_k(1, 1.0) / oracle - 1.0, 0.0, 1e-10);
}

TEST(BesselK, RelativeAccuracyAcrossRange)
{
    for (double x : {1e-8, 1e-4, 0.1, 1.0, 1.9999, 2.0, 2.0001, 5.0, 30.0, 200.0, 650.0})
        for (int n : {0, 1, 2, 5})
        {
            const double oracle = bessel_k_integral(n, x);
            EXPECT_NEAR(sf::bessel_k(n, x) / oracle - 1.0, 0.0, 1e-12) << "n=" << n << " x=" << x;
        }
}

TEST(BesselK, AgreesWithStdCylBesselK)
{
    for (double x = 1e-6; x < 600.0; x *= 1.7)
        for (int n = 0; n < 10; ++n)
        {
            const double ref = std::cyl_bessel_k(static_cast<double>(n), x);
            if (ref > 1e-290)
                EXPECT_NEAR(sf::bessel_k(n, x) / ref - 1.0, 0.0, 1e-11) << n << " " << x;
        }
}

TEST(BesselK, RecurrenceHoldsOnLogGrid)
{
    for (double x = 1e-6; x <= 100.0; x *= 3.1)
        for (int n = 1; n < 12; ++n)
        {
            const double lhs = sf::bessel_k(n + 1, x);
            const double rhs = sf::bessel_k(n - 1, x) + (2.0 * n / x) * sf::bessel_k(n, x);
            EXPECT_NEAR(lhs / rhs - 1.0, 0.0, 1e-9);
        }
}

TEST(BesselK, LogFormMatchesDirectAndSurvivesUnderflow)
{
    for (double x : {1e-5, 0.3, 3.0, 50.0})
        for (int n : {0, 1, 4, 9})
            EXPECT_NEAR(sf::log_bessel_k(n, x), std::log(sf::bessel_k(n, x)), 1e-12 * (1 + std::abs(std::log(sf::bessel_k(n, x)))));
    EXPECT_EQ(sf::bessel_k(2, 800.0), 0.0);
    EXPECT_TRUE(std::isfinite(sf::log_bessel_k(2, 800.0)));
    EXPECT_NEAR(sf::log_bessel_k(0, 800.0), -800.0 + 0.5 * std::log(std::numbers::pi / 1600.0), 1e-3);
    EXPECT_TRUE(std::isfinite(sf::log_bessel_k(60, 1e-6)));
}

TEST(BesselK, RejectsBadArguments)
{
    EXPECT_THROW(sf::bessel_k(1, 0.0), afrelay::DomainError);
    EXPECT_THROW(sf::bessel_k(1, -1.0), afrelay::DomainError);
    EXPECT_THROW(sf::bessel_k(1, std::nan("")), afrelay::DomainError);
    EXPECT_THROW(sf::bessel_k(1, INFINITY), afrelay::DomainError);
}

TEST(GaussianQ, KnownValuesAndSymmetry)
{
    EXPECT_EQ(sf::gaussian_q(0.0), 0.5);
    EXPECT_LT(sf::gaussian_q(40.0), 1e-300);
    const double oracle = 0.5 * erfc_series(1.0 / std::sqrt(2.0));
    EXPECT_NEAR(sf::gaussian_q(1.0) / oracle - 1.0, 0.0, 1e-12);
    for (double x = -8.0; x <= 8.0; x += 0.37)
        EXPECT_NEAR(sf::gaussian_q(-x), 1.0 - sf::gaussian_q(x), 1e-14);
    EXPECT_THROW(sf::gaussian_q(NAN), afrelay::DomainError);
}

TEST(GaussianQ, StrictlyDecreasing)
{
    double prev = sf::gaussian_q(-5.0);
    for (double x = -4.9; x < 37.0; x += 0.1)
    {
        const double q = sf::gaussian_q(x);
        EXPECT_LT(q, prev);
        prev = q;
    }
}

TEST(IncompleteGamma, IntegerOrder)
{
    EXPECT_DOUBLE_EQ(sf::upper_incomplete_gamma(1, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(sf::upper_incomplete_gamma(4, 0.0), 6.0);
    const double oracle = simpson([](double t) { return t * t * std::exp(-t); }, 2.0, 80.0, 200000);
    EXPECT_NEAR(sf::upper_incomplete_gamma(3, 2.0) / oracle - 1.0, 0.0, 1e-10);
    EXPECT_NEAR(sf::upper_incomplete_gamma(3, 2.0), 10.0 * std::exp(-2.0), 1e-15);
    EXPECT_THROW(sf::upper_incomplete_gamma(2, -0.1), afrelay::DomainError);
}

TEST(IncompleteGamma, LowerRegularizedComplements)
{
    for (int n = 1; n < 6; ++n)
        for (double x : {0.01, 0.5, 2.0, 7.0, 20.0})
            EXPECT_NEAR(sf::regularized_lower_gamma(n, x) + sf::upper_incomplete_gamma(n, x) / sf::factorial(n - 1), 1.0, 1e-13);
    // tiny values keep full relative accuracy: P(3, x) ~ x^3/6
    EXPECT_NEAR(sf::regularized_lower_gamma(3, 1e-6) / (1e-18 / 6.0), 1.0, 1e-5);
}

TEST(Quadrature, SemiInfiniteElementary)
{
    sf::QuadratureSpec spec;
    spec.abs_tol = 1e-13;
    spec.rel_tol = 1e-12;
    EXPECT_NEAR(sf::integrate_semi_infinite([](double t) { return std::exp(-t); }, spec), 1.0, spec.abs_tol);
    EXPECT_NEAR(sf::integrate_semi_infinite([](double t) { return t * std::exp(-t * t); }, spec), 0.5, spec.abs_tol);

    spec.semi_infinite_transform = sf::SemiInfiniteMap::rational_map;
    EXPECT_NEAR(sf::integrate_semi_infinite([](double t) { return std::exp(-t); }, spec), 1.0, 1e-12);
    EXPECT_NEAR(sf::integrate_semi_infinite([](double t) { return t * std::exp(-t * t); }, spec), 0.5, 1e-12);
}

TEST(Quadrature, IntegrableSingularityAtOrigin)
{
    // int_0^inf t^{-1/2} e^{-t} dt = sqrt(pi)
    const double v = sf::integrate_semi_infinite([](double t) { return std::exp(-t) / std::sqrt(t); });
    EXPECT_NEAR(v, std::sqrt(std::numbers::pi), 1e-9);
}

TEST(Quadrature, BesselIdentityCrossCheck)
{
    // int t^{nu-1} exp(-t - z^2/t) dt = 2 z^nu K_nu(2z), z = 1, nu = 3
    const double v = sf::integrate_semi_infinite([](double t) { return t * t * std::exp(-t - 1.0 / t); });
    EXPECT_NEAR(v / (2.0 * sf::bessel_k(3, 2.0)) - 1.0, 0.0, 1e-8);
}

TEST(Quadrature, Linearity)
{
    sf::QuadratureSpec spec;
    auto f = [](double t) { return std::exp(-2.0 * t) * std::sqrt(t); };
    auto g = [](double t) { return t * t * std::exp(-t / 3.0); };
    const double a = 0.7, b = -2.3;
    const double lhs = sf::integrate_semi_infinite([&](double t) { return a * f(t) + b * g(t); }, spec);
    const double rhs = a * sf::integrate_semi_infinite(f, spec) + b * sf::integrate_semi_infinite(g, spec);
    EXPECT_NEAR(lhs, rhs, 2.0 * std::max(spec.abs_tol, spec.rel_tol * std::abs(rhs)) * 10);
}

TEST(Quadrature, Deterministic)
{
    auto f = [](double t) { return std::log1p(t) * std::exp(-t); };
    EXPECT_EQ(sf::integrate_semi_infinite(f), sf::integrate_semi_infinite(f));
}

TEST(Quadrature, ReportsNonConvergence)
{
    sf::QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-15;
    spec.max_subdivisions = 1;
    try
    {
        sf::integrate([](double t) { return std::sin(500.0 * t) * std::exp(-t); }, 0.0, 10.0, spec);
        FAIL() << "expected ConvergenceError";
    }
    catch (const afrelay::ConvergenceError &e)
    {
        EXPECT_TRUE(std::isfinite(e.estimate()));
        EXPECT_GT(e.error_bound(), 0.0);
    }
}

TEST(Quadrature, SpecValidation)
{
    sf::QuadratureSpec spec;
    spec.abs_tol = 0.0;
    EXPECT_THROW(spec.validate(), afrelay::ConfigError);
    spec = {};
    spec.max_subdivisions = 0;
    EXPECT_THROW(spec.validate(), afrelay::ConfigError);
}

TEST(GaussLegendre, ExactForPolynomials)
{
    auto [x, w] = sf::gauss_legendre(64, 0.0, std::numbers::pi / 2);
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        s += w[i];
        c += w[i] * std::cos(x[i]);
    }
    EXPECT_NEAR(s, std::numbers::pi / 2, 1e-14);
    EXPECT_NEAR(c, 1.0, 1e-14);
}
