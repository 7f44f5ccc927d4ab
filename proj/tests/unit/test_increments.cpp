#include "lindrec/increments.hpp"

#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace lindrec;

namespace
{
    // Second route to rho: arctan through the argument of 1 + i x.
    double rho_complex(double alpha, double beta)
    {
        if (alpha == 1.0 || alpha == 2.0)
        {
            return 0.5;
        }
        const double x = beta * std::tan(std::numbers::pi * alpha / 2.0);
        return 0.5 + std::arg(std::complex<double>(1.0, x)) / (std::numbers::pi * alpha);
    }
}

TEST_CASE("finite support laws")
{
    const auto sym = make_finite_support({{1, 1.0}, {-1, 1.0}});
    CHECK(*sym.mean() == 0.0);
    CHECK(sym.variance() == 1.0);
    CHECK(sym.is_symmetric());
    CHECK(sym.period() == 2);

    const auto ex = make_finite_support({{-4, 1.0}, {-3, 1.0}, {1, 1.0}, {2, 1.0}});
    CHECK(*ex.exact_mean() == Rational(-1));
    for (const auto& a : ex.atoms())
    {
        CHECK(a.prob == 0.25);
    }

    const auto delta = make_finite_support({{0, 5.0}});
    CHECK(delta.variance() == 0.0);
    CHECK(delta.period() == 0);
    CHECK(delta.atoms().size() == 1);
}

TEST_CASE("finite support rejects bad input")
{
    CHECK_THROWS_AS(make_finite_support({}), std::invalid_argument);
    CHECK_THROWS_AS(make_finite_support({{1, -0.5}, {2, 1.5}}), std::invalid_argument);
    CHECK_THROWS_AS(make_finite_support({{1, 0.5}, {1, 0.5}}), std::invalid_argument);
}

TEST_CASE("exact normalization and sorted atoms")
{
    const auto law = IncrementLaw::finite_support(
        std::vector<std::pair<std::int64_t, Rational>>{{3, Rational(2)}, {-1, Rational(1)}, {0, Rational(3)}});
    Rational total = 0;
    for (const auto& p : law.exact_probs())
    {
        total += p;
    }
    CHECK(total == 1);
    const auto atoms = law.atoms();
    for (std::size_t i = 1; i < atoms.size(); ++i)
    {
        CHECK(atoms[i - 1].value < atoms[i].value);
    }
    CHECK(law.exact_probs()[0] == Rational(1, 6));
    CHECK(law.period() == 1);
}

TEST_CASE("double weights are read as decimals")
{
    const auto law = make_finite_support({{-3, 0.2}, {0, 0.5}, {2, 0.3}});
    CHECK(*law.exact_mean() == 0);
    CHECK(law.exact_probs()[0] == Rational(1, 5));
    const auto tiny = make_finite_support({{0, 1e-05}, {1, 0.99999}});
    CHECK(tiny.exact_probs()[0] == Rational(1, 100000));
}

TEST_CASE("admissible set")
{
    CHECK(in_A(0.5, 0.9));
    CHECK_FALSE(in_A(0.5, 1.0));
    CHECK(in_A(2.0, 0.0));
    CHECK(in_A(1.5, -1.0));
    CHECK_FALSE(in_A(1.0, 0.5));
    CHECK_FALSE(in_A(2.5, 0.0));
    CHECK_FALSE(in_A(0.0, 0.0));
}

TEST_CASE("rho from stable parameters")
{
    CHECK(rho_from(2.0, 0.0) == 0.5);
    CHECK(rho_from(1.5, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(rho_from(1.5, -1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(rho_from(0.5, 1.0), std::invalid_argument);
    CHECK(StableParams::make(1.5, 1.0).rho == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("rho agrees with the complex arctangent route")
{
    for (double a = 0.05; a < 2.0; a += 0.05)
    {
        for (double b = -1.0; b <= 1.0; b += 0.1)
        {
            if (!in_A(a, b))
            {
                continue;
            }
            CHECK(rho_from(a, b) == doctest::Approx(rho_complex(a, b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("rho reflection and continuity")
{
    for (double a = 0.1; a < 2.0; a += 0.1)
    {
        for (double b = -0.9; b <= 0.9; b += 0.1)
        {
            if (in_A(a, b) && in_A(a, -b))
            {
                CHECK(rho_from(a, -b) == doctest::Approx(1.0 - rho_from(a, b)).epsilon(1e-12));
            }
        }
    }
    // O(h) continuity on 1 < alpha < 2: halving the step halves the difference.
    const double h = 0.01;
    for (double a = 1.05; a < 1.95 + 1e-9; a += 0.05)
    {
        for (double b = -1.0; b + h <= 1.0 + 1e-12; b += 0.1)
        {
            const double r = rho_from(a, b);
            const double db = std::abs(rho_from(a, b + h) - r);
            const double db2 = std::abs(rho_from(a, b + h / 2) - r);
            CHECK(db2 <= 0.6 * db + 1e-15);
            const double da = std::abs(rho_from(a + h, b) - r);
            const double da2 = std::abs(rho_from(a + h / 2, b) - r);
            CHECK(da2 <= 0.6 * da + 1e-15);
        }
    }
}

TEST_CASE("slowly varying log powers")
{
    const auto ell = SlowlyVarying::log_power(2.0, 1.5);
    CHECK(ell(0.0) > 0.0);
    CHECK(ell(0.0) == doctest::Approx(2.0));
    // |log(l(lx) / l(x))| ~ |eta log l| / log x, so the 1% band needs |eta log l| well below log x.
    for (double eta : {-0.1, 0.1})
    {
        const auto small = SlowlyVarying::log_power(1.0, eta);
        for (double x : {1e6, 1e9})
        {
            for (double lam : {0.5, 2.0})
            {
                CHECK(small(lam * x) / small(x) == doctest::Approx(1.0).epsilon(0.01));
            }
        }
    }
    for (double lam : {0.5, 2.0, 10.0})
    {
        double prev = INFINITY;
        for (double x : {1e6, 1e9, 1e12, 1e15})
        {
            const double dev = std::abs(std::log(ell(lam * x) / ell(x)));
            CHECK(dev < prev);
            prev = dev;
        }
    }
    CHECK(ell.log_value(1e300) == doctest::Approx(std::log(ell(1e300))));
    CHECK_THROWS(SlowlyVarying::log_power(0.0, 1.0));
}

TEST_CASE("stable lattice construction")
{
    const auto sym = make_stable_lattice(1.5, 0.0, 1.0);
    for (std::int64_t k = 0; k <= 1000; ++k)
    {
        CHECK(sym.pmf(k) == sym.pmf(-k));
    }
    REQUIRE(sym.mean().has_value());
    CHECK(std::abs(*sym.mean()) < 1e-10);
    CHECK(std::isinf(sym.variance()));

    const auto skew = make_stable_lattice(1.5, 0.7, 1.0);
    CHECK(std::abs(*skew.mean()) < 1e-10);

    const auto half = make_stable_lattice(0.5, 0.5, 1.0);
    CHECK(half.stable()->c_plus / half.stable()->c_minus == doctest::Approx(3.0));
    CHECK_FALSE(half.mean().has_value());

    CHECK_THROWS_AS(make_stable_lattice(0.5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_stable_lattice(1.5, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("stable lattice mass sums to one")
{
    for (auto [a, b] : std::vector<std::pair<double, double>>{{1.5, 0.0}, {1.5, -1.0}, {0.5, 0.5}, {1.0, 0.0}, {2.0, 0.0}})
    {
        const auto law = make_stable_lattice(a, b, 1.0);
        const std::int64_t R = 20000;
        double s = law.upper_tail(R) + law.lower_tail(R);
        for (std::int64_t k = -R; k <= R; ++k)
        {
            s += law.pmf(k);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("stable lattice tail index")
{
    const auto law = make_stable_lattice(1.5, 0.0, 1.0);
    // Least squares of log P(|Y| > n) on log n, n on a log grid in [1e3, 1e6].
    std::vector<double> lx, ly;
    for (double e = 3.0; e <= 6.0 + 1e-9; e += 0.25)
    {
        const auto n = static_cast<std::int64_t>(std::pow(10.0, e));
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(law.upper_tail(n) + law.lower_tail(n)));
        const double scaled = std::pow(static_cast<double>(n), 1.5) * (law.upper_tail(n) + law.lower_tail(n));
        CHECK(scaled > 0.0);
        CHECK(scaled < 10.0);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i)
    {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    CHECK(sxy / sxx == doctest::Approx(-1.5).epsilon(0.05 / 1.5));
}

TEST_CASE("sampling")
{
    Rng rng(7);
    const auto delta = IncrementLaw::point_mass(0);
    for (int i = 0; i < 100; ++i)
    {
        CHECK(sample(delta, rng) == 0);
    }

    const auto sym = make_finite_support({{1, 0.5}, {-1, 0.5}});
    const int N = 1000000;
    double s = 0;
    for (int i = 0; i < N; ++i)
    {
        s += static_cast<double>(sym.sample(rng));
    }
    CHECK(std::abs(s / N) < 3e-3);

    const auto st = make_stable_lattice(1.5, 0.0, 1.0);
    const double p = st.upper_tail(100) + st.lower_tail(100);
    std::int64_t hits = 0;
    for (int i = 0; i < N; ++i)
    {
        const auto y = st.sample(rng);
        hits += (y > 100 || y < -100);
    }
    CHECK(std::abs(static_cast<double>(hits) / N - p) < 3.0 * std::sqrt(p * (1 - p) / N));
}

TEST_CASE("sampling reproduces atom probabilities")
{
    const auto law = make_finite_support({{-4, 0.1}, {-1, 0.2}, {0, 0.3}, {5, 0.4}});
    Rng rng(11);
    const int N = 1000000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < N; ++i)
    {
        const auto y = law.sample(rng);
        for (std::size_t j = 0; j < 4; ++j)
        {
            counts[j] += (y == law.atoms()[j].value);
        }
    }
    for (std::size_t j = 0; j < 4; ++j)
    {
        const double p = law.atoms()[j].prob;
        CHECK(std::abs(counts[j] / static_cast<double>(N) - p) < 4.0 * std::sqrt(p * (1 - p) / N));
    }
}

TEST_CASE("sampling is deterministic given the seed")
{
    const auto law = make_stable_lattice(0.5, 0.5, 1.0);
    Rng a(99), b(99);
    for (int i = 0; i < 10000; ++i)
    {
        CHECK(law.sample(a) == law.sample(b));
    }
}

TEST_CASE("truncated variance")
{
    const auto sym = make_finite_support({{1, 0.5}, {-1, 0.5}});
    CHECK(truncated_variance(sym, 1) == 1.0);
    CHECK(truncated_variance(sym, 0) == 0.0);

    const auto law = make_stable_lattice(2.0, 0.0, 1.0, 1.0);
    const auto ell = law.truncated_variance_sv();
    REQUIRE(ell.has_value());
    for (std::int64_t y : {10000, 100000, 1000000})
    {
        CHECK(law.truncated_variance(y) * (*ell)(static_cast<double>(y)) / 2.0 == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("negation and shift")
{
    const auto law = make_finite_support({{-2, 0.25}, {1, 0.75}});
    const auto neg = law.negated();
    CHECK(neg.pmf(2) == 0.25);
    CHECK(neg.pmf(-1) == 0.75);
    const auto sh = law.shifted(3);
    CHECK(*sh.min_support() == 1);
    CHECK(*sh.max_support() == 4);
    CHECK(*sh.exact_mean() == *law.exact_mean() + 3);
}
