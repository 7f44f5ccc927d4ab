#include "lindrec/experiments.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace lindrec;

namespace
{
    constexpr auto L = CoordinateRole::Lindley;
    constexpr auto W = CoordinateRole::Walk;

    VectorLaw positive_drift_joint()
    {
        return VectorLaw::joint(std::vector<std::pair<Vec, Rational>>{
            {{-1, 1}, Rational(1, 4)}, {{-1, 2}, Rational(1, 4)}, {{1, -1}, Rational(1, 4)}, {{2, -1}, Rational(1, 4)}});
    }

    EvidenceOptions no_evidence()
    {
        EvidenceOptions o;
        o.enabled = false;
        return o;
    }

    const IncrementLaw& coin()
    {
        static const auto law = make_finite_support({{-1, 0.5}, {1, 0.5}});
        return law;
    }

    const IncrementLaw& lazy()
    {
        static const auto law = make_finite_support({{-1, 0.3}, {0, 0.4}, {1, 0.3}});
        return law;
    }
}

TEST_CASE("criterion labels and classes")
{
    CHECK(criterion_class(Criterion::BackwardPositive) == PredictedClass::PositiveRecurrent);
    CHECK(criterion_class(Criterion::RhoSum) == PredictedClass::NullRecurrent);
    CHECK(criterion_class(Criterion::FiniteVariance) == PredictedClass::NullRecurrent);
    CHECK(criterion_class(Criterion::SubordinatedTransient) == PredictedClass::Transient);
    for (auto c : kCriterionOrder)
    {
        CHECK(std::string(to_string(c)).size() > 0);
    }
}

TEST_CASE("positive drift in both coordinates")
{
    EvidenceOptions o;
    o.replicas = 20;
    o.horizon = 2000;
    o.backward_runs = 200;
    o.seed = 5;
    const auto v = classify_2d(positive_drift_joint(), {L, L}, o);
    CHECK(v.predicted == PredictedClass::PositiveRecurrent);
    REQUIRE(v.criterion.has_value());
    CHECK(*v.criterion == Criterion::BackwardPositive);
    CHECK(v.evidence.returns_2h == 0);
    CHECK(v.evidence.coalesced == 200);
    CHECK(v.consistency == Consistency::Consistent);
}

TEST_CASE("two oscillating coordinates with rho 2/3")
{
    const auto s = make_stable_lattice(1.5, -1.0, 1.0);
    const auto v = classify_2d(VectorLaw::product({s, s}), {L, L}, no_evidence());
    CHECK(v.predicted == PredictedClass::NullRecurrent);
    CHECK(*v.criterion == Criterion::RhoSum);
    CHECK(v.independent);
    CHECK(*v.facts[0].rho == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("Lindley with rho 1/3 against a symmetric walk")
{
    const auto s = make_stable_lattice(1.5, 1.0, 1.0);
    const auto v = classify_2d(VectorLaw::product({s, coin()}), {L, W}, no_evidence());
    CHECK(v.predicted == PredictedClass::Transient);
    CHECK(*v.criterion == Criterion::SubordinatedTransient);
}

TEST_CASE("Lindley and walk cases")
{
    const auto pos = make_finite_support({{1, 0.75}, {-1, 0.25}});
    CHECK(*classify_2d(VectorLaw::product({pos, coin()}), {L, W}, no_evidence()).criterion ==
          Criterion::LindleyWalkCase1);
    const auto s = make_stable_lattice(1.5, -1.0, 1.0);
    CHECK(*classify_2d(VectorLaw::product({s, coin()}), {L, W}, no_evidence()).criterion ==
          Criterion::LindleyWalkCase2);
    CHECK(*classify_2d(VectorLaw::product({lazy(), coin()}), {L, W}, no_evidence()).criterion ==
          Criterion::LindleyWalkCase3);
}

TEST_CASE("finite variance pair")
{
    const auto v = classify_2d(VectorLaw::product({lazy(), coin()}), {L, L}, no_evidence());
    CHECK(v.predicted == PredictedClass::NullRecurrent);
    CHECK(*v.criterion == Criterion::FiniteVariance);
}

TEST_CASE("outside every criterion")
{
    const auto s = make_stable_lattice(1.5, 0.0, 1.0);
    const auto v = classify_2d(VectorLaw::product({s, s}), {L, L}, no_evidence());
    CHECK(v.predicted == PredictedClass::OutsideTheory);
    CHECK_FALSE(v.criterion.has_value());
    CHECK(v.fired.empty());
    CHECK(v.reasons.size() == kCriterionOrder.size());

    const auto ww = classify_2d(VectorLaw::product({coin(), coin()}), {W, W}, no_evidence());
    CHECK(ww.predicted == PredictedClass::OutsideTheory);
}

TEST_CASE("correlated coordinates do not satisfy independence hypotheses")
{
    const auto law = VectorLaw::joint(std::vector<std::pair<Vec, Rational>>{
        {{-1, -1}, Rational(1, 2)}, {{1, 1}, Rational(1, 2)}});
    const auto v = classify_2d(law, {L, L}, no_evidence());
    CHECK_FALSE(v.independent);
    CHECK(v.predicted == PredictedClass::OutsideTheory);
}

TEST_CASE("fired criteria follow the documented order")
{
    std::vector<IncrementLaw> laws = {coin(),
                                      lazy(),
                                      make_finite_support({{1, 0.75}, {-1, 0.25}}),
                                      make_finite_support({{1, 0.25}, {-1, 0.75}}),
                                      make_stable_lattice(1.5, -1.0, 1.0),
                                      make_stable_lattice(1.5, 1.0, 1.0),
                                      make_stable_lattice(1.5, 0.0, 1.0)};
    for (const auto& a : laws)
    {
        for (const auto& b : laws)
        {
            for (auto roles : {std::array{L, L}, std::array{L, W}, std::array{W, L}})
            {
                const auto v = classify_2d(VectorLaw::product({a, b}), roles, no_evidence());
                if (v.fired.empty())
                {
                    CHECK(v.predicted == PredictedClass::OutsideTheory);
                    continue;
                }
                CHECK(v.fired.front() == *v.criterion);
                CHECK(v.predicted == criterion_class(*v.criterion));
                auto pos = [](Criterion c) {
                    return std::find(kCriterionOrder.begin(), kCriterionOrder.end(), c) - kCriterionOrder.begin();
                };
                for (std::size_t i = 1; i < v.fired.size(); ++i)
                {
                    CHECK(pos(v.fired[i - 1]) < pos(v.fired[i]));
                }
            }
        }
    }
}

TEST_CASE("evidence volume never changes the predicted class")
{
    const auto s = make_stable_lattice(1.5, -1.0, 1.0);
    for (const auto& law : {VectorLaw::product({s, coin()}), VectorLaw::product({lazy(), coin()}), positive_drift_joint()})
    {
        const auto roles = law.is_joint() ? std::array{L, L} : std::array{L, W};
        std::optional<PredictedClass> first;
        for (std::int64_t reps : {5, 20})
        {
            EvidenceOptions o;
            o.replicas = reps;
            o.horizon = 1000;
            o.backward_runs = 20 * reps;
            o.green_K = 200;
            o.seed = 3;
            const auto v = classify_2d(law, roles, o);
            if (!first)
            {
                first = v.predicted;
            }
            CHECK(v.predicted == *first);
        }
    }
}

TEST_CASE("return counts")
{
    const auto det = VectorLaw::product({IncrementLaw::point_mass(1), IncrementLaw::point_mass(2)});
    const auto c = return_counts(det, {L, L}, {10, 20}, 3, 1);
    CHECK(c == std::vector<std::int64_t>{30, 60});

    // A walk coordinate with steps of +-1 is at 0 only at even times.
    const auto w = VectorLaw::product({coin()});
    const auto cw = return_counts(w, {W}, {1}, 100, 1);
    CHECK(cw[0] == 0);

    const auto a = return_counts(VectorLaw::product({lazy(), coin()}), {L, W}, {100, 200}, 50, 9);
    const auto b = return_counts(VectorLaw::product({lazy(), coin()}), {L, W}, {100, 200}, 50, 9, 1);
    CHECK(a == b);
    CHECK(a[1] >= a[0]);
}

TEST_CASE("Chung-Fuchs integral")
{
    const auto one = SlowlyVarying::constant(1.0);
    const auto t = pitman_chung_fuchs(0.3, one, 0.5);
    CHECK(t.convergent);
    REQUIRE(t.value.has_value());
    // int_0^eps t^-0.6 dt = eps^0.4 / 0.4
    CHECK(*t.value == doctest::Approx(std::pow(0.5, 0.4) / 0.4).epsilon(1e-8));

    CHECK(pitman_chung_fuchs(0.5, SlowlyVarying::log_power(1.0, 1.5), 0.5).convergent);
    CHECK_FALSE(pitman_chung_fuchs(0.5, SlowlyVarying::log_power(1.0, 1.0), 0.5).convergent);
    CHECK_FALSE(pitman_chung_fuchs(0.5, one, 0.5).convergent);
    CHECK_THROWS(pitman_chung_fuchs(0.0, one, 0.5));
    CHECK_THROWS(pitman_chung_fuchs(0.3, one, 1.5));

    // rho = 1/2, l = log^eta: int_0^eps dt / (t log(1/t^2)^eta) = (2 log(1/eps))^(1-eta) / (2 (eta - 1)) asymptotically
    const double eps = 1e-6;
    const auto v = pitman_chung_fuchs(0.5, SlowlyVarying::log_power(1.0, 1.5), eps);
    CHECK(*v.value == doctest::Approx(std::pow(2 * std::log(1 / eps), -0.5) / (2 * 0.5)).epsilon(1e-3));
}

TEST_CASE("log example regimes")
{
    CHECK(pitman_chung_fuchs_log_example(3.0).convergent);
    CHECK_FALSE(pitman_chung_fuchs_log_example(2.0).convergent);
    for (double eta = -4.0; eta <= 4.0; eta += 0.25)
    {
        const bool transient = eta_regime(eta) == EtaRegime::Transient;
        CHECK(pitman_chung_fuchs_log_example(eta).convergent == transient);
    }
}

TEST_CASE("Wald identity with deterministic ladders")
{
    // tau_bar(k) = k, so E tau_bar(1) = 1 exactly.
    const auto w = wald_check(IncrementLaw::point_mass(1), make_finite_support({{1, 0.6}, {-1, 0.4}}), 20000, 7);
    CHECK(w.tau_bar.mean == 1.0);
    CHECK(w.tau_bar.stderr_ == 0.0);
    CHECK(std::abs(w.lhs.mean - w.t_tilde.mean) < 4 * std::hypot(w.lhs.stderr_, w.t_tilde.stderr_));

    // T~ = 1 when the second coordinate always returns at once.
    const auto one = wald_check(make_finite_support({{1, 0.75}, {-1, 0.25}}), IncrementLaw::point_mass(1), 20000, 8);
    CHECK(one.t_tilde.mean == 1.0);
    CHECK(std::abs(one.lhs.mean - one.tau_bar.mean) < 4 * std::hypot(one.lhs.stderr_, one.tau_bar.stderr_));
}

TEST_CASE("Wald identity for the positive drift law")
{
    const auto w = wald_check(make_finite_support({{1, 0.75}, {-1, 0.25}}), make_finite_support({{1, 0.6}, {-1, 0.4}}),
                              100000, 13);
    CHECK(w.conclusive);
    CHECK(w.censored_fraction <= kWaldCensoredLimit);
    CHECK(w.gap_ci_low < 0.0);
    CHECK(w.gap_ci_high > 0.0);
    const auto bad = wald_check(coin(), coin(), 10, 1);
    CHECK_FALSE(bad.conclusive);
    CHECK_FALSE(bad.reason.empty());
    CHECK_THROWS(wald_check(coin(), coin(), 1, 1));
}

TEST_CASE("backward against forward on a small run")
{
    const auto bc = compare_backward_forward(positive_drift_joint(), 20000, 10000, 32, 4000, 60, 11);
    CHECK(bc.coalesced == bc.runs);
    CHECK(bc.coalescence_rate == 1.0);
    CHECK(bc.total_variation < 0.05);
    CHECK(bc.forward_overflow < 1e-3);
}

TEST_CASE("coordinate facts")
{
    const auto f = coordinate_facts(lazy(), L);
    CHECK(f.drift.kind == DriftKind::Oscillating);
    CHECK(*f.rho == 0.5);
    CHECK(f.finite_variance);
    CHECK(f.centered);
    CHECK(f.symmetric);
    CHECK(f.finite_range);
    CHECK_FALSE(f.degenerate);

    const auto g = coordinate_facts(make_stable_lattice(1.5, 1.0, 1.0), L);
    CHECK(*g.rho == doctest::Approx(1.0 / 3.0));
    CHECK_FALSE(g.finite_variance);
    CHECK_FALSE(g.finite_range);

    const auto h = coordinate_facts(make_finite_support({{1, 0.75}, {-1, 0.25}}), L);
    CHECK(h.drift.kind == DriftKind::PositiveDrift);
    CHECK_FALSE(h.rho.has_value());

    CHECK(coordinate_facts(IncrementLaw::point_mass(0), W).degenerate);
}

TEST_CASE("Green-sum evidence for an independent Lindley pair")
{
    EvidenceOptions o;
    o.replicas = 10;
    o.horizon = 1000;
    o.backward_runs = 10;
    o.green_K = 4000;
    o.seed = 2;
    const auto v = classify_2d(VectorLaw::product({lazy(), coin()}), {L, L}, o);
    REQUIRE(v.evidence.green.has_value());
    CHECK(v.evidence.green_K == 4000);
    CHECK(v.evidence.green->best == GrowthModel::Logarithmic);

    o.green_K = 0;
    CHECK_FALSE(classify_2d(VectorLaw::product({lazy(), coin()}), {L, L}, o).evidence.green.has_value());
}
