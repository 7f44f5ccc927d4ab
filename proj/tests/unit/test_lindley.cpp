#include "lindrec/lindley.hpp"
#include "lindrec/walk.hpp"

#include "support/enumerate.hpp"

#include "doctest.h"

#include <algorithm>
#include <vector>

using namespace lindrec;

namespace
{
    VectorLaw negative_drift_joint()
    {
        return VectorLaw::joint(std::vector<std::pair<Vec, Rational>>{
            {{-4, 1}, Rational(1, 4)}, {{-3, 2}, Rational(1, 4)}, {{1, -4}, Rational(1, 4)}, {{2, -3}, Rational(1, 4)}});
    }

    VectorLaw positive_drift_joint()
    {
        return VectorLaw::joint(std::vector<std::pair<Vec, Rational>>{
            {{-1, 1}, Rational(1, 4)}, {{-1, 2}, Rational(1, 4)}, {{1, -1}, Rational(1, 4)}, {{2, -1}, Rational(1, 4)}});
    }

    VectorLaw one_dim(const IncrementLaw& law) { return VectorLaw::product({law}); }

    IncrementLaw rational_law(std::vector<std::pair<std::int64_t, Rational>> e)
    {
        return IncrementLaw::finite_support(std::move(e));
    }
}

TEST_CASE("lindley step")
{
    CHECK(lindley_step(5, 7) == 0);
    CHECK(lindley_step(0, -3) == 3);
    CHECK(lindley_step(Vec{2, 0}, Vec{1, -4}) == Vec{1, 4});
    CHECK_THROWS(lindley_step(Vec{1, 2}, Vec{1}));
    CHECK_THROWS(lindley_step(Vec{-1}, Vec{0}));
}

TEST_CASE("lindley step is monotone and 1-Lipschitz")
{
    for (std::int64_t w = 0; w <= 12; ++w)
    {
        for (std::int64_t v = w; v <= 12; ++v)
        {
            for (std::int64_t y = -6; y <= 6; ++y)
            {
                CHECK(lindley_step(w, y) <= lindley_step(v, y));
                CHECK(lindley_step(v, y) - lindley_step(w, y) <= v - w);
            }
        }
    }
}

TEST_CASE("vector laws")
{
    const auto mu = positive_drift_joint();
    CHECK(mu.dim() == 2);
    CHECK(mu.is_joint());
    CHECK_FALSE(mu.independent());
    CHECK(mu.marginal(0).pmf(-1) == doctest::Approx(0.5));
    CHECK(*mu.marginal(1).exact_mean() == Rational(1, 4));

    const auto prod = VectorLaw::product(
        {make_finite_support({{-1, 0.5}, {1, 0.5}}), make_finite_support({{0, 0.25}, {2, 0.75}})});
    CHECK(prod.is_product());
    CHECK(prod.independent());
    CHECK(prod.atoms().size() == 4);

    const auto factorizing = VectorLaw::joint(std::vector<std::pair<Vec, Rational>>{
        {{0, 0}, Rational(1, 4)}, {{0, 1}, Rational(1, 4)}, {{1, 0}, Rational(1, 4)}, {{1, 1}, Rational(1, 4)}});
    CHECK(factorizing.independent());
}

TEST_CASE("returns for a deterministic positive step")
{
    Rng rng(1);
    const auto st = simulate_returns(one_dim(IncrementLaw::point_mass(1)), Vec{0}, 50, rng);
    CHECK(st.count == 50);
    std::vector<std::int64_t> all(50);
    for (int i = 0; i < 50; ++i)
    {
        all[i] = i + 1;
    }
    CHECK(st.return_times == all);
    REQUIRE(st.mean_return_time.has_value());
    CHECK(*st.mean_return_time == doctest::Approx(1.0));
}

TEST_CASE("returns coincide with weak ascending ladder epochs")
{
    for (const auto& law : {make_finite_support({{-1, 0.5}, {1, 0.5}}),
                            make_finite_support({{-2, 0.3}, {0, 0.2}, {1, 0.5}}),
                            make_stable_lattice(1.5, -1.0, 1.0)})
    {
        for (std::uint64_t r = 0; r < 200; ++r)
        {
            const std::uint64_t seed = derive_seed(17, stream::primary, r);
            Rng a(seed), b(seed);
            const auto st = simulate_returns(one_dim(law), Vec{0}, 2000, a);
            const auto path = simulate_path(law, 2000, b);
            const auto weak = ladder_epochs(path, LadderKind::WeakAscending);
            CHECK(st.return_times == weak.epochs);
            CHECK(st.count == static_cast<std::int64_t>(st.return_times.size()));
            CHECK(std::is_sorted(st.return_times.begin(), st.return_times.end()));
        }
    }
}

TEST_CASE("pathwise conjugacy with the running maximum")
{
    const auto law = make_finite_support({{-3, 0.2}, {0, 0.3}, {2, 0.5}});
    for (std::uint64_t r = 0; r < 500; ++r)
    {
        Rng rng(r);
        const auto path = simulate_path(law, 400, rng);
        const auto m = running_max(path);
        std::int64_t w = 0;
        for (std::size_t n = 1; n < path.sums.size(); ++n)
        {
            w = lindley_step(w, path.increments[n - 1]);
            CHECK(w == m[n] - path.sums[n]);
        }
    }
}

TEST_CASE("positive drift joint law never returns to the origin")
{
    Rng rng(5);
    const auto st = simulate_returns(positive_drift_joint(), Vec{0, 0}, 100000, rng);
    CHECK(st.count == 0);
    CHECK_FALSE(st.mean_return_time.has_value());
}

TEST_CASE("exact lindley law is the law of the maximum of the negated walk")
{
    const std::vector<IncrementLaw> laws = {
        rational_law({{-1, Rational(1, 2)}, {1, Rational(1, 2)}}),
        rational_law({{-2, Rational(1, 3)}, {0, Rational(1, 6)}, {1, Rational(1, 2)}}),
        rational_law({{-1, Rational(3, 4)}, {3, Rational(1, 4)}}),
    };
    for (const auto& law : laws)
    {
        for (int n = 1; n <= 6; ++n)
        {
            const auto w = exact_lindley_pmf<Rational>(one_dim(law), Vec{0}, n);
            std::map<std::int64_t, Rational> flat;
            for (const auto& [state, p] : w)
            {
                flat[state[0]] = p;
            }
            CHECK(flat == testing::strip_zeros(testing::enumerate_lindley(law, n)));
            CHECK(flat == testing::to_sparse(exact_max_pmf<Rational>(law.negated(), n).pmf));
        }
    }
    // A one-sided law separates the two: W_n = n while M_n = 0.
    const auto down = IncrementLaw::point_mass(-1);
    const auto w = exact_lindley_pmf<Rational>(one_dim(down), Vec{0}, 4);
    CHECK(w.at(Vec{4}) == 1);
    CHECK(exact_max_pmf<Rational>(down, 4).pmf[0] == 1);
}

TEST_CASE("backward map composition")
{
    BackwardMap f(1);
    for (std::int64_t y : {3, -1, 2, -4, 1})
    {
        f.compose_inner(Vec{y});
    }
    // F1 o ... o F5 applied directly
    for (std::int64_t x = 0; x <= 20; ++x)
    {
        std::int64_t v = x;
        for (std::int64_t y : {1, -4, 2, -1, 3})
        {
            v = lindley_step(v, y);
        }
        CHECK(f.apply(Vec{x})[0] == v);
    }
}

TEST_CASE("backward coalescence for a deterministic positive step")
{
    for (std::int64_t y : {1, 2, 3, 7})
    {
        Rng rng(1);
        const auto res = backward_iterate(one_dim(IncrementLaw::point_mass(y)), {Vec{0}, Vec{5}}, 100, rng);
        REQUIRE(res.coalesced_at.has_value());
        CHECK(*res.coalesced_at == (5 + y - 1) / y);
        CHECK(res.value == Vec{0});
        CHECK_FALSE(res.censored);
    }
}

TEST_CASE("backward iteration without positive jumps is censored")
{
    Rng rng(1);
    const auto res = backward_iterate(one_dim(IncrementLaw::point_mass(-1)), {Vec{0}, Vec{5}}, 1000, rng);
    CHECK(res.censored);
    CHECK_FALSE(res.coalesced_at.has_value());
    CHECK(res.value.empty());
    CHECK_THROWS(backward_iterate(one_dim(IncrementLaw::point_mass(1)), {Vec{0}}, 10, rng));
}

TEST_CASE("backward samples agree with the forward chain")
{
    const auto law = one_dim(make_finite_support({{1, 0.75}, {-1, 0.25}}));
    const int runs = 20000;
    std::vector<double> emp(40, 0.0);
    int coalesced = 0;
    for (int r = 0; r < runs; ++r)
    {
        Rng rng(derive_seed(3, stream::primary, r));
        const auto res = backward_iterate(law, {Vec{0}, Vec{32}}, 10000, rng);
        if (res.coalesced_at)
        {
            ++coalesced;
            if (res.value[0] < 40)
            {
                emp[res.value[0]] += 1.0 / runs;
            }
        }
    }
    CHECK(coalesced == runs);
    const auto fwd = forward_grid_law(law, Vec{0}, 2000, 39);
    double tv = fwd.overflow;
    for (int k = 0; k < 40; ++k)
    {
        tv += std::abs(emp[k] - fwd.mass[k]);
    }
    CHECK(tv / 2 < 0.03);
}

TEST_CASE("essential classes")
{
    const auto mu = positive_drift_joint();
    const auto rep = essential_class(mu, 32);
    CHECK_FALSE(rep.origin_revisitable);
    CHECK(rep.definitive);
    // One-step image of the origin
    std::vector<Vec> image;
    for (const auto& a : mu.atoms())
    {
        image.push_back(lindley_step(Vec{0, 0}, a.value));
    }
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    CHECK(image == std::vector<Vec>{{0, 1}, {1, 0}});

    const auto one = essential_class(one_dim(make_finite_support({{1, 0.5}, {-1, 0.5}})), 16);
    CHECK(one.origin_revisitable);
    CHECK(one.definitive);
    REQUIRE(one.witness.size() >= 2);
    CHECK(one.witness.front() == Vec{0});
    CHECK(one.witness.back() == Vec{0});
}

TEST_CASE("essential class exploration is closed under one-step images")
{
    const auto law = negative_drift_joint();
    const auto rep = essential_class(law, 20);
    CHECK_FALSE(rep.boundary.empty());
    for (const auto& s : rep.explored)
    {
        if (std::find(rep.boundary.begin(), rep.boundary.end(), s) != rep.boundary.end())
        {
            continue;
        }
        for (const auto& a : law.atoms())
        {
            const auto t = lindley_step(s, a.value);
            CHECK(std::binary_search(rep.explored.begin(), rep.explored.end(), t));
        }
    }
}

TEST_CASE("negative drift joint law drifts away in both coordinates")
{
    const auto law = negative_drift_joint();
    CHECK(classify_drift(law.marginal(0)).kind == DriftKind::NegativeDrift);
    CHECK(classify_drift(law.marginal(1)).kind == DriftKind::NegativeDrift);
    Rng rng(9);
    Vec w{0, 0};
    Vec y(2);
    for (int n = 0; n < 20000; ++n)
    {
        law.sample(rng, y);
        w = lindley_step(w, y);
    }
    CHECK(w[0] > 1000);
    CHECK(w[1] > 1000);
}

TEST_CASE("forward grid law conserves mass")
{
    const auto g = forward_grid_law(positive_drift_joint(), Vec{0, 0}, 200, 40);
    double s = g.overflow;
    for (double m : g.mass)
    {
        s += m;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.mass[g.index(Vec{0, 0})] == 0.0);
    CHECK(g.state(g.index(Vec{3, 7})) == Vec{3, 7});
}
