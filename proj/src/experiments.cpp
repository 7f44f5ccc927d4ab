#include "lindrec/experiments.hpp"

#include "lindrec/parallel.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lindrec
{
    const char* to_string(PredictedClass c) noexcept
    {
        switch (c)
        {
        case PredictedClass::PositiveRecurrent:
            return "PositiveRecurrent";
        case PredictedClass::NullRecurrent:
            return "NullRecurrent";
        case PredictedClass::Transient:
            return "Transient";
        case PredictedClass::OutsideTheory:
            return "OutsideTheory";
        }
        return "?";
    }

    const char* to_string(CoordinateRole r) noexcept
    {
        return r == CoordinateRole::Lindley ? "lindley" : "walk";
    }

    const char* to_string(Criterion c) noexcept
    {
        switch (c)
        {
        case Criterion::BackwardPositive:
            return "backward-positive-recurrence";
        case Criterion::LindleyNegativeDrift:
            return "lindley-negative-drift";
        case Criterion::LindleyWalkCase1:
            return "lindley-walk-case-1";
        case Criterion::LindleyWalkCase2:
            return "lindley-walk-case-2";
        case Criterion::LindleyWalkCase3:
            return "lindley-walk-case-3";
        case Criterion::RhoSum:
            return "rho-sum-above-one";
        case Criterion::FiniteVariance:
            return "centered-finite-variance";
        case Criterion::SubordinatedTransient:
            return "subordinated-transient-rho-below-half";
        }
        return "?";
    }

    PredictedClass criterion_class(Criterion c) noexcept
    {
        switch (c)
        {
        case Criterion::BackwardPositive:
            return PredictedClass::PositiveRecurrent;
        case Criterion::LindleyNegativeDrift:
        case Criterion::SubordinatedTransient:
            return PredictedClass::Transient;
        case Criterion::LindleyWalkCase1:
        case Criterion::LindleyWalkCase2:
        case Criterion::LindleyWalkCase3:
        case Criterion::RhoSum:
        case Criterion::FiniteVariance:
            return PredictedClass::NullRecurrent;
        }
        return PredictedClass::OutsideTheory;
    }

    const char* to_string(Consistency c) noexcept
    {
        switch (c)
        {
        case Consistency::Consistent:
            return "consistent";
        case Consistency::Inconsistent:
            return "inconsistent";
        case Consistency::Inconclusive:
            return "inconclusive";
        case Consistency::NotApplicable:
            return "n/a";
        }
        return "?";
    }

    CoordinateFacts coordinate_facts(const IncrementLaw& law, CoordinateRole role)
    {
        CoordinateFacts f;
        f.role = role;
        f.drift = classify_drift(law);
        f.symmetric = law.is_symmetric();
        f.finite_range = law.is_finite();
        f.degenerate = law.is_finite() && law.atoms().size() == 1;
        f.finite_variance = std::isfinite(law.variance());
        const auto m = law.mean();
        if (law.is_finite())
        {
            f.centered = *law.exact_mean() == 0;
        }
        else
        {
            f.centered = m.has_value() && *m == 0.0;
        }
        if (f.drift.kind == DriftKind::Oscillating && !f.degenerate)
        {
            if (const StableLatticeParams* sp = law.stable())
            {
                f.rho = f.finite_variance ? 0.5 : sp->stable.rho;
            }
            else if (f.finite_variance)
            {
                f.rho = 0.5;
            }
        }
        return f;
    }

    // ---------------------------------------------------------------------

    std::vector<std::int64_t> return_counts(const VectorLaw& law, const std::vector<CoordinateRole>& roles,
                                            const std::vector<std::int64_t>& checkpoints, std::int64_t replicas,
                                            std::uint64_t master_seed, unsigned threads)
    {
        if (roles.size() != law.dim())
        {
            throw std::invalid_argument("return_counts: one role per coordinate required");
        }
        if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() < 1)
        {
            throw std::invalid_argument("return_counts: checkpoints must be sorted and >= 1");
        }
        const std::size_t d = law.dim();
        const std::size_t m = checkpoints.size();
        std::vector<std::int64_t> per(static_cast<std::size_t>(std::max<std::int64_t>(replicas, 0)) * m, 0);
        parallel_for(replicas, threads, [&](std::int64_t r) {
            Rng rng(derive_seed(master_seed, stream::primary, static_cast<std::uint64_t>(r)));
            Vec x(d, 0);
            Vec y(d);
            std::int64_t count = 0;
            std::size_t next = 0;
            const std::int64_t horizon = checkpoints.back();
            for (std::int64_t n = 1; n <= horizon; ++n)
            {
                law.sample(rng, y);
                bool zero = true;
                for (std::size_t i = 0; i < d; ++i)
                {
                    x[i] = roles[i] == CoordinateRole::Lindley ? lindley_step(x[i], y[i]) : x[i] + y[i];
                    zero = zero && x[i] == 0;
                }
                count += zero;
                while (next < m && checkpoints[next] == n)
                {
                    per[static_cast<std::size_t>(r) * m + next] = count;
                    ++next;
                }
            }
        });
        std::vector<std::int64_t> total(m, 0);
        for (std::int64_t r = 0; r < replicas; ++r)
        {
            for (std::size_t j = 0; j < m; ++j)
            {
                total[j] += per[static_cast<std::size_t>(r) * m + j];
            }
        }
        return total;
    }

    // ---------------------------------------------------------------------

    namespace
    {
        std::string fmt(double v)
        {
            std::ostringstream os;
            os.precision(6);
            os << v;
            return os.str();
        }

        struct Hypotheses
        {
            std::vector<Criterion> fired;
            std::vector<std::string> reasons;
        };

        Hypotheses check_hypotheses(const std::array<CoordinateFacts, 2>& f, bool independent)
        {
            Hypotheses h;
            auto fail = [&](Criterion c, const std::string& why) {
                h.reasons.push_back(std::string(to_string(c)) + ": " + why);
            };
            const bool both_lindley = f[0].role == CoordinateRole::Lindley && f[1].role == CoordinateRole::Lindley;
            const bool mixed = f[0].role != f[1].role;
            const CoordinateFacts* w = nullptr;
            const CoordinateFacts* z = nullptr;
            if (mixed)
            {
                w = f[0].role == CoordinateRole::Lindley ? &f[0] : &f[1];
                z = f[0].role == CoordinateRole::Lindley ? &f[1] : &f[0];
            }
            const bool z_symmetric_finite = z != nullptr && z->symmetric && z->finite_range && !z->degenerate;
            const bool w_oscillating = w != nullptr && w->drift.kind == DriftKind::Oscillating && !w->degenerate;

            // BackwardPositive
            if (!both_lindley)
            {
                fail(Criterion::BackwardPositive, "needs Lindley coordinates only");
            }
            else if (f[0].drift.kind == DriftKind::PositiveDrift && f[1].drift.kind == DriftKind::PositiveDrift)
            {
                h.fired.push_back(Criterion::BackwardPositive);
            }
            else
            {
                fail(Criterion::BackwardPositive, "some coordinate without positive drift");
            }

            // LindleyNegativeDrift
            {
                bool any = false;
                for (const auto& c : f)
                {
                    any = any || (c.role == CoordinateRole::Lindley && c.drift.kind == DriftKind::NegativeDrift);
                }
                if (any)
                {
                    h.fired.push_back(Criterion::LindleyNegativeDrift);
                }
                else
                {
                    fail(Criterion::LindleyNegativeDrift, "no Lindley coordinate with negative drift");
                }
            }

            // Case 1
            if (!mixed)
            {
                fail(Criterion::LindleyWalkCase1, "needs one Lindley and one walk coordinate");
            }
            else if (w->drift.kind != DriftKind::PositiveDrift)
            {
                fail(Criterion::LindleyWalkCase1, "W not positive recurrent");
            }
            else if (!z->centered || z->degenerate)
            {
                fail(Criterion::LindleyWalkCase1, "Z not a nondegenerate centered walk");
            }
            else
            {
                h.fired.push_back(Criterion::LindleyWalkCase1);
            }

            // Case 2
            if (!mixed)
            {
                fail(Criterion::LindleyWalkCase2, "needs one Lindley and one walk coordinate");
            }
            else if (!w_oscillating || !w->rho)
            {
                fail(Criterion::LindleyWalkCase2, "S not oscillating in a domain of attraction");
            }
            else if (!(*w->rho > 0.5 && *w->rho < 1.0))
            {
                fail(Criterion::LindleyWalkCase2, "rho = " + fmt(*w->rho) + " outside (1/2, 1)");
            }
            else if (!z_symmetric_finite)
            {
                fail(Criterion::LindleyWalkCase2, "Z not symmetric of finite range");
            }
            else if (!independent)
            {
                fail(Criterion::LindleyWalkCase2, "coordinates not independent");
            }
            else
            {
                h.fired.push_back(Criterion::LindleyWalkCase2);
            }

            // Case 3
            if (!mixed)
            {
                fail(Criterion::LindleyWalkCase3, "needs one Lindley and one walk coordinate");
            }
            else if (!w_oscillating)
            {
                fail(Criterion::LindleyWalkCase3, "W not null recurrent");
            }
            else if (!w->finite_variance)
            {
                fail(Criterion::LindleyWalkCase3, "E Y^2 infinite");
            }
            else if (!z_symmetric_finite)
            {
                fail(Criterion::LindleyWalkCase3, "Z not symmetric of finite range");
            }
            else if (!independent)
            {
                fail(Criterion::LindleyWalkCase3, "coordinates not independent");
            }
            else
            {
                h.fired.push_back(Criterion::LindleyWalkCase3);
            }

            // RhoSum
            if (!both_lindley)
            {
                fail(Criterion::RhoSum, "needs Lindley coordinates only");
            }
            else if (!independent)
            {
                fail(Criterion::RhoSum, "coordinates not independent");
            }
            else if (!f[0].rho || !f[1].rho)
            {
                fail(Criterion::RhoSum, "some coordinate not oscillating in a domain of attraction");
            }
            else if (!(*f[0].rho + *f[1].rho > 1.0))
            {
                fail(Criterion::RhoSum, "rho1 + rho2 = " + fmt(*f[0].rho + *f[1].rho) + " <= 1");
            }
            else
            {
                h.fired.push_back(Criterion::RhoSum);
            }

            // FiniteVariance
            if (!both_lindley)
            {
                fail(Criterion::FiniteVariance, "needs Lindley coordinates only");
            }
            else if (!independent)
            {
                fail(Criterion::FiniteVariance, "coordinates not independent");
            }
            else if (!(f[0].centered && f[1].centered && f[0].finite_variance && f[1].finite_variance) ||
                     f[0].degenerate || f[1].degenerate)
            {
                fail(Criterion::FiniteVariance, "some coordinate not centered with finite variance");
            }
            else
            {
                h.fired.push_back(Criterion::FiniteVariance);
            }

            // SubordinatedTransient
            if (!mixed)
            {
                fail(Criterion::SubordinatedTransient, "needs one Lindley and one walk coordinate");
            }
            else if (!w_oscillating || !w->rho)
            {
                fail(Criterion::SubordinatedTransient, "S not oscillating in a domain of attraction");
            }
            else if (!(*w->rho < 0.5))
            {
                fail(Criterion::SubordinatedTransient, "rho = " + fmt(*w->rho) + " not below 1/2");
            }
            else if (!z_symmetric_finite)
            {
                fail(Criterion::SubordinatedTransient, "Z not symmetric of finite range");
            }
            else if (!independent)
            {
                fail(Criterion::SubordinatedTransient, "coordinates not independent");
            }
            else
            {
                h.fired.push_back(Criterion::SubordinatedTransient);
            }
            return h;
        }

        Consistency combine(Consistency a, Consistency b)
        {
            if (a == Consistency::NotApplicable)
            {
                return b;
            }
            if (b == Consistency::NotApplicable)
            {
                return a;
            }
            if (a == Consistency::Inconsistent || b == Consistency::Inconsistent)
            {
                return Consistency::Inconsistent;
            }
            if (a == Consistency::Consistent || b == Consistency::Consistent)
            {
                return Consistency::Consistent;
            }
            return Consistency::Inconclusive;
        }
    }

    Verdict classify_2d(const VectorLaw& law, std::array<CoordinateRole, 2> roles, const EvidenceOptions& opts)
    {
        if (law.dim() != 2)
        {
            throw std::invalid_argument("classify_2d: law must be two-dimensional");
        }
        Verdict v;
        v.independent = law.independent();
        for (std::size_t i = 0; i < 2; ++i)
        {
            v.facts[i] = coordinate_facts(law.marginal(i), roles[i]);
        }
        Hypotheses h = check_hypotheses(v.facts, v.independent);
        v.fired = h.fired;
        v.reasons = h.reasons;
        if (!v.fired.empty())
        {
            v.criterion = v.fired.front();
            v.predicted = criterion_class(*v.criterion);
        }
        else
        {
            for (const auto& c : v.facts)
            {
                if (c.drift.kind == DriftKind::Inconclusive)
                {
                    v.reasons.push_back("drift class inconclusive: " + c.drift.reason);
                }
            }
        }
        if (!opts.enabled)
        {
            return v;
        }

        Evidence& ev = v.evidence;
        Consistency mc = Consistency::NotApplicable;
        if (opts.replicas > 0 && opts.horizon > 0)
        {
            const auto counts = return_counts(law, {roles[0], roles[1]}, {opts.horizon, 2 * opts.horizon},
                                              opts.replicas, opts.seed, opts.threads);
            ev.replicas = opts.replicas;
            ev.horizon = opts.horizon;
            ev.returns_h = counts[0];
            ev.returns_2h = counts[1];
            if (counts[0] > 0)
            {
                ev.growth = static_cast<double>(counts[1]) / static_cast<double>(counts[0]);
            }
            if (v.predicted == PredictedClass::NullRecurrent || v.predicted == PredictedClass::Transient)
            {
                const bool recurrent_like = (ev.growth && *ev.growth >= opts.recurrence_growth) ||
                                            (counts[0] == 0 && counts[1] > 0);
                const bool transient_like = (ev.growth && *ev.growth < opts.transience_growth) ||
                                            (counts[0] == 0 && counts[1] == 0);
                const bool want_recurrent = v.predicted == PredictedClass::NullRecurrent;
                if (recurrent_like)
                {
                    mc = want_recurrent ? Consistency::Consistent : Consistency::Inconsistent;
                }
                else if (transient_like && !(counts[1] == 0 && want_recurrent))
                {
                    mc = want_recurrent ? Consistency::Inconsistent : Consistency::Consistent;
                }
                else
                {
                    mc = Consistency::Inconclusive;
                }
            }
        }

        Consistency back = Consistency::NotApplicable;
        if (v.predicted == PredictedClass::PositiveRecurrent && opts.backward_runs > 0)
        {
            std::vector<std::int64_t> hit(static_cast<std::size_t>(opts.backward_runs), 0);
            const std::vector<Vec> starts = {Vec{0, 0}, Vec{64, 64}};
            parallel_for(opts.backward_runs, opts.threads, [&](std::int64_t r) {
                Rng rng(derive_seed(opts.seed, stream::tertiary, static_cast<std::uint64_t>(r)));
                hit[static_cast<std::size_t>(r)] = backward_iterate(law, starts, opts.backward_steps, rng).censored ? 0 : 1;
            });
            ev.backward_runs = opts.backward_runs;
            for (auto x : hit)
            {
                ev.coalesced += x;
            }
            ev.coalescence_rate = static_cast<double>(ev.coalesced) / static_cast<double>(ev.backward_runs);
            back = *ev.coalescence_rate >= opts.coalescence_fraction ? Consistency::Consistent
                                                                      : Consistency::Inconsistent;
            if (law.is_finite())
            {
                const auto ec = essential_class(law, 64);
                if (ec.definitive)
                {
                    ev.notes.push_back(ec.origin_revisitable ? "origin lies in the essential class"
                                                             : "origin not revisitable; recurrence holds in the essential class");
                }
            }
        }

        Consistency green = Consistency::NotApplicable;
        const bool both_lindley = roles[0] == CoordinateRole::Lindley && roles[1] == CoordinateRole::Lindley;
        if (opts.green_K > 100 && both_lindley && v.independent && law.is_finite() &&
            (v.predicted == PredictedClass::NullRecurrent || v.predicted == PredictedClass::Transient))
        {
            std::array<RenewalSeq, 2> u;
            for (std::size_t i = 0; i < 2; ++i)
            {
                const auto pmf = exact_ladder_pmf<double>(law.marginal(i), LadderKind::StrictAscending, opts.green_K);
                u[i] = renewal_sequence(pmf.pmf, opts.green_K);
            }
            const auto G = green_partial_sums(u[0], u[1], opts.green_K);
            ev.green = fit_growth_models(G, 100, opts.green_K);
            ev.green_K = opts.green_K;
            if (!ev.green->accepted)
            {
                green = Consistency::Inconclusive;
            }
            else
            {
                const bool divergent = ev.green->best != GrowthModel::Bounded;
                const bool want = v.predicted == PredictedClass::NullRecurrent;
                green = divergent == want ? Consistency::Consistent : Consistency::Inconsistent;
            }
        }

        v.consistency = combine(combine(mc, back), green);
        if (v.predicted == PredictedClass::OutsideTheory)
        {
            v.consistency = Consistency::NotApplicable;
        }
        return v;
    }

    // ---------------------------------------------------------------------

    IntegralTest pitman_chung_fuchs(double rho, const SlowlyVarying& ell, double epsilon)
    {
        if (!(rho > 0.0 && rho < 1.0))
        {
            throw std::invalid_argument("pitman_chung_fuchs: rho must lie in (0, 1)");
        }
        if (!(epsilon > 0.0 && epsilon < 1.0))
        {
            throw std::invalid_argument("pitman_chung_fuchs: epsilon must lie in (0, 1)");
        }
        if (!(ell.c > 0.0) || !std::isfinite(ell.eta))
        {
            throw std::invalid_argument("pitman_chung_fuchs: l must be c log(e+x)^eta with c > 0");
        }
        IntegralTest out;
        out.rho = rho;
        out.ell = ell;
        out.epsilon = epsilon;
        if (2.0 * rho > 1.0)
        {
            out.convergent = false;
            out.reason = "2 rho > 1: t^(-2 rho) is not integrable at 0";
            return out;
        }
        if (2.0 * rho == 1.0)
        {
            out.convergent = ell.eta > 1.0;
            out.reason = out.convergent ? "2 rho = 1 and eta > 1" : "2 rho = 1 and eta <= 1";
        }
        else
        {
            out.convergent = true;
            out.reason = "2 rho < 1";
        }
        if (!out.convergent)
        {
            return out;
        }
        const double decay = 1.0 - 2.0 * rho;
        const double s0 = -std::log(epsilon);
        const double log_c = std::log(ell.c);
        auto f = [&](double u) {
            const double s = s0 + u;
            const double lx = 2.0 * s + std::log1p(std::exp(1.0 - 2.0 * s));
            return std::exp(-decay * s - log_c - ell.eta * std::log(lx));
        };
        boost::math::quadrature::exp_sinh<double> integrator;
        out.value = integrator.integrate(f);
        return out;
    }

    IntegralTest pitman_chung_fuchs_log_example(double eta, double epsilon)
    {
        const SlowlyVarying conj = conjugate_sv(SlowlyVarying::log_power(1.0, eta), 2.0);
        return pitman_chung_fuchs(0.5, SlowlyVarying{1.0 / conj.c, -conj.eta}, epsilon);
    }

    // ---------------------------------------------------------------------

    namespace
    {
        MeanEstimate summarize(const std::vector<std::int64_t>& v)
        {
            MeanEstimate m;
            long double sum = 0.0L;
            long double sq = 0.0L;
            for (auto x : v)
            {
                if (x < 0)
                {
                    ++m.censored;
                    continue;
                }
                sum += x;
                sq += static_cast<long double>(x) * x;
                ++m.n;
            }
            if (m.n > 0)
            {
                const long double mean = sum / m.n;
                m.mean = static_cast<double>(mean);
                if (m.n > 1)
                {
                    const long double var = (sq - m.n * mean * mean) / (m.n - 1);
                    m.stderr_ = std::sqrt(static_cast<double>(std::max(0.0L, var)) / static_cast<double>(m.n));
                }
            }
            return m;
        }
    }

    WaldCheck wald_check(const IncrementLaw& law1, const IncrementLaw& law2, std::int64_t replicas,
                         std::uint64_t master_seed, std::int64_t step_cap, unsigned threads)
    {
        if (replicas < 2)
        {
            throw std::invalid_argument("wald_check: need at least 2 replicas");
        }
        WaldCheck out;
        const DriftClass d1 = classify_drift(law1);
        if (d1.kind != DriftKind::PositiveDrift)
        {
            out.reason = "law1 drift is " + std::string(to_string(d1.kind)) + ", E taubar(1) may be infinite";
            return out;
        }
        const auto n = static_cast<std::size_t>(replicas);
        std::vector<std::int64_t> a(n), b(n), c(n);

        // T: first return of (W1, W2) to the origin
        parallel_for(replicas, threads, [&](std::int64_t r) {
            Rng rng(derive_seed(master_seed, stream::primary, static_cast<std::uint64_t>(r)));
            std::int64_t w1 = 0, w2 = 0;
            std::int64_t result = -1;
            for (std::int64_t k = 1; k <= step_cap; ++k)
            {
                w1 = lindley_step(w1, law1.sample(rng));
                w2 = lindley_step(w2, law2.sample(rng));
                if (w1 == 0 && w2 == 0)
                {
                    result = k;
                    break;
                }
            }
            a[static_cast<std::size_t>(r)] = result;
        });
        // taubar(1): first n with S1_n >= 0
        parallel_for(replicas, threads, [&](std::int64_t r) {
            Rng rng(derive_seed(master_seed, stream::secondary, static_cast<std::uint64_t>(r)));
            std::int64_t s = 0;
            std::int64_t result = -1;
            for (std::int64_t k = 1; k <= step_cap; ++k)
            {
                s += law1.sample(rng);
                if (s >= 0)
                {
                    result = k;
                    break;
                }
            }
            b[static_cast<std::size_t>(r)] = result;
        });
        // T~: index of the first weak ladder epoch of S1 at which W2 = 0
        parallel_for(replicas, threads, [&](std::int64_t r) {
            Rng rng(derive_seed(master_seed, stream::tertiary, static_cast<std::uint64_t>(r)));
            std::int64_t w1 = 0, w2 = 0;
            std::int64_t ladders = 0;
            std::int64_t result = -1;
            for (std::int64_t k = 1; k <= step_cap; ++k)
            {
                w1 = lindley_step(w1, law1.sample(rng));
                w2 = lindley_step(w2, law2.sample(rng));
                if (w1 == 0)
                {
                    ++ladders;
                    if (w2 == 0)
                    {
                        result = ladders;
                        break;
                    }
                }
            }
            c[static_cast<std::size_t>(r)] = result;
        });

        out.lhs = summarize(a);
        out.tau_bar = summarize(b);
        out.t_tilde = summarize(c);
        const double cens = static_cast<double>(out.lhs.censored + out.tau_bar.censored + out.t_tilde.censored);
        out.censored_fraction = cens / (3.0 * static_cast<double>(replicas));
        out.rhs = out.tau_bar.mean * out.t_tilde.mean;
        out.rhs_stderr = std::hypot(out.t_tilde.mean * out.tau_bar.stderr_, out.tau_bar.mean * out.t_tilde.stderr_);
        if (out.rhs > 0.0)
        {
            const double gap = (out.lhs.mean - out.rhs) / out.rhs;
            const double se = std::hypot(out.lhs.stderr_, out.rhs_stderr) / out.rhs;
            out.relative_gap = std::abs(gap);
            out.gap_ci_low = gap - 1.96 * se;
            out.gap_ci_high = gap + 1.96 * se;
        }
        if (out.censored_fraction > kWaldCensoredLimit)
        {
            out.reason = "censored fraction " + fmt(out.censored_fraction) + " exceeds 1e-3";
            return out;
        }
        out.conclusive = true;
        out.reason = "ok";
        return out;
    }

    // ---------------------------------------------------------------------

    BackwardComparison compare_backward_forward(const VectorLaw& law, std::int64_t runs, std::int64_t max_steps,
                                                std::int64_t start_level, std::int64_t forward_n, std::int64_t bound,
                                                std::uint64_t master_seed, unsigned threads)
    {
        if (runs < 1 || start_level < 1)
        {
            throw std::invalid_argument("compare_backward_forward: runs and start_level must be >= 1");
        }
        const std::size_t d = law.dim();
        const std::vector<Vec> starts = {Vec(d, 0), Vec(d, start_level)};
        std::vector<BackwardResult> res(static_cast<std::size_t>(runs));
        parallel_for(runs, threads, [&](std::int64_t r) {
            Rng rng(derive_seed(master_seed, stream::primary, static_cast<std::uint64_t>(r)));
            res[static_cast<std::size_t>(r)] = backward_iterate(law, starts, max_steps, rng);
        });

        BackwardComparison out;
        out.runs = runs;
        out.max_steps = max_steps;
        out.forward_n = forward_n;
        out.bound = bound;
        const GridLaw fwd = forward_grid_law(law, Vec(d, 0), forward_n, bound);
        out.forward_overflow = fwd.overflow;

        std::vector<double> emp(fwd.mass.size(), 0.0);
        double outside = 0.0;
        for (const auto& r : res)
        {
            if (r.censored)
            {
                continue;
            }
            ++out.coalesced;
            bool inside = true;
            for (auto x : r.value)
            {
                inside = inside && x <= bound;
            }
            if (inside)
            {
                emp[fwd.index(r.value)] += 1.0;
            }
            else
            {
                outside += 1.0;
            }
        }
        out.coalescence_rate = static_cast<double>(out.coalesced) / static_cast<double>(runs);
        if (out.coalesced == 0)
        {
            out.total_variation = 1.0;
            return out;
        }
        const double scale = 1.0 / static_cast<double>(out.coalesced);
        double tv = 0.0;
        for (std::size_t i = 0; i < emp.size(); ++i)
        {
            tv += std::abs(emp[i] * scale - fwd.mass[i]);
        }
        out.outside_bound = outside * scale;
        out.total_variation = 0.5 * (tv + out.outside_bound + fwd.overflow);
        return out;
    }
}
