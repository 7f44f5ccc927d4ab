#include "lindrec/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lindrec
{
    WalkPath simulate_path(const IncrementLaw& law, std::int64_t n, Rng& rng)
    {
        if (n < 1)
        {
            throw std::invalid_argument("simulate_path: length must be >= 1");
        }
        WalkPath path;
        path.seed = rng.seed();
        path.law = law.describe();
        path.increments.resize(static_cast<std::size_t>(n));
        path.sums.resize(static_cast<std::size_t>(n) + 1);
        path.sums[0] = 0;
        for (std::size_t i = 0; i < path.increments.size(); ++i)
        {
            const std::int64_t y = law.sample(rng);
            path.increments[i] = y;
            path.sums[i + 1] = path.sums[i] + y;
        }
        return path;
    }

    WalkPath path_from_increments(std::vector<std::int64_t> increments)
    {
        WalkPath path;
        path.increments = std::move(increments);
        path.sums.resize(path.increments.size() + 1);
        path.sums[0] = 0;
        for (std::size_t i = 0; i < path.increments.size(); ++i)
        {
            path.sums[i + 1] = path.sums[i] + path.increments[i];
        }
        return path;
    }

    LadderRecord ladder_epochs(const WalkPath& path, LadderKind kind)
    {
        LadderRecord rec;
        rec.kind = kind;
        rec.censored_at = path.length();
        std::int64_t record = 0;
        for (std::size_t n = 1; n < path.sums.size(); ++n)
        {
            const std::int64_t s = path.sums[n];
            const bool hit = kind == LadderKind::StrictAscending ? s > record : s >= record;
            if (hit)
            {
                rec.epochs.push_back(static_cast<std::int64_t>(n));
                rec.heights.push_back(s);
                record = s;
            }
        }
        return rec;
    }

    std::vector<std::int64_t> running_max(const WalkPath& path)
    {
        std::vector<std::int64_t> m(path.sums.size());
        std::int64_t best = 0;
        for (std::size_t n = 0; n < path.sums.size(); ++n)
        {
            best = std::max(best, path.sums[n]);
            m[n] = best;
        }
        return m;
    }

    namespace
    {
        template <class P>
        std::vector<P> atom_probs(const IncrementLaw& law)
        {
            std::vector<P> out;
            if constexpr (std::is_same_v<P, Rational>)
            {
                out = law.exact_probs();
            }
            else
            {
                for (const auto& a : law.atoms())
                {
                    out.push_back(a.prob);
                }
            }
            return out;
        }

        void require_finite(const IncrementLaw& law, const char* who)
        {
            if (!law.is_finite())
            {
                throw std::invalid_argument(std::string(who) + ": law must have finite support");
            }
        }
    }

    template <class P>
    LadderPmf<P> exact_ladder_pmf(const IncrementLaw& law, LadderKind kind, std::int64_t n_max, std::size_t state_budget)
    {
        require_finite(law, "exact_ladder_pmf");
        if (n_max < 1)
        {
            throw std::invalid_argument("exact_ladder_pmf: n_max must be >= 1");
        }
        const auto atoms = law.atoms();
        const std::vector<P> probs = atom_probs<P>(law);
        const std::int64_t up = std::max<std::int64_t>(*law.max_support(), 0);
        const std::int64_t down = std::max<std::int64_t>(-*law.min_support(), 0);
        const bool strict = kind == LadderKind::StrictAscending;

        // States are offsets d = -S >= 0. After step n a state can still exit
        // before n_max iff d < r * up (strict) or d <= r * up (weak), r = n_max - n.
        auto keep_limit = [&](std::int64_t n) -> std::int64_t {
            const std::int64_t r = n_max - n;
            if (up == 0)
            {
                return -1;
            }
            const i128 lim = static_cast<i128>(r) * up - (strict ? 1 : 0);
            return lim > std::numeric_limits<std::int64_t>::max() ? std::numeric_limits<std::int64_t>::max()
                                                                    : static_cast<std::int64_t>(lim);
        };

        const i128 reach = static_cast<i128>(n_max) * std::min(up, down);
        const std::size_t budget_slots = std::max<std::size_t>(state_budget / 2, 1);
        const std::size_t slots = static_cast<std::size_t>(std::min<i128>(reach + 1, static_cast<i128>(budget_slots)));

        LadderPmf<P> out;
        out.kind = kind;
        out.n_requested = n_max;
        out.pmf.assign(1, P(0));
        std::vector<P> cur(slots, P(0));
        std::vector<P> nxt(slots, P(0));
        cur[0] = P(1);
        std::int64_t hi = 0;
        P pruned(0);
        bool overflow = false;

        for (std::int64_t n = 1; n <= n_max; ++n)
        {
            const std::int64_t limit = keep_limit(n);
            P absorbed(0);
            P pruned_now(0);
            std::int64_t new_hi = -1;
            std::fill(nxt.begin(), nxt.begin() + std::min<std::int64_t>(hi + down + 1, static_cast<std::int64_t>(slots)), P(0));
            for (std::int64_t d = 0; d <= hi && !overflow; ++d)
            {
                const P& m = cur[static_cast<std::size_t>(d)];
                if (m == 0)
                {
                    continue;
                }
                for (std::size_t i = 0; i < atoms.size(); ++i)
                {
                    const std::int64_t t = atoms[i].value - d; // new S
                    const bool exits = strict ? t > 0 : t >= 0;
                    if (exits)
                    {
                        absorbed += m * probs[i];
                        continue;
                    }
                    const std::int64_t nd = -t;
                    if (nd > limit)
                    {
                        pruned_now += m * probs[i];
                    }
                    else if (nd >= static_cast<std::int64_t>(slots))
                    {
                        overflow = true;
                        break;
                    }
                    else
                    {
                        nxt[static_cast<std::size_t>(nd)] += m * probs[i];
                        new_hi = std::max(new_hi, nd);
                    }
                }
            }
            if (overflow)
            {
                break;
            }
            out.pmf.push_back(absorbed);
            pruned += pruned_now;
            std::swap(cur, nxt);
            hi = new_hi;
            out.n_reached = n;
        }
        P survival = pruned;
        for (std::int64_t d = 0; d <= hi; ++d)
        {
            survival += cur[static_cast<std::size_t>(d)];
        }
        out.survival = survival;
        out.complete = out.n_reached == n_max;
        if constexpr (!std::is_same_v<P, Rational>)
        {
            out.error_bound = static_cast<double>(out.n_reached) * std::numeric_limits<double>::epsilon();
        }
        return out;
    }

    template LadderPmf<double> exact_ladder_pmf<double>(const IncrementLaw&, LadderKind, std::int64_t, std::size_t);
    template LadderPmf<Rational> exact_ladder_pmf<Rational>(const IncrementLaw&, LadderKind, std::int64_t, std::size_t);

    template <class P>
    MaxPmf<P> exact_max_pmf(const IncrementLaw& law, std::int64_t n, std::size_t state_budget)
    {
        require_finite(law, "exact_max_pmf");
        if (n < 0)
        {
            throw std::invalid_argument("exact_max_pmf: n must be >= 0");
        }
        const auto atoms = law.atoms();
        const std::vector<P> probs = atom_probs<P>(law);
        using State = std::pair<std::int64_t, std::int64_t>; // (M, D)
        std::map<State, P> cur{{{0, 0}, P(1)}};
        MaxPmf<P> out;
        out.complete = true;
        for (std::int64_t k = 0; k < n; ++k)
        {
            std::map<State, P> nxt;
            for (const auto& [st, m] : cur)
            {
                const auto [M, D] = st;
                for (std::size_t i = 0; i < atoms.size(); ++i)
                {
                    const std::int64_t y = atoms[i].value;
                    const State ns{M + std::max<std::int64_t>(y - D, 0), std::max<std::int64_t>(D - y, 0)};
                    nxt[ns] += m * probs[i];
                }
            }
            if (nxt.size() > state_budget)
            {
                out.complete = false;
                break;
            }
            cur = std::move(nxt);
            out.n = k + 1;
        }
        if (!out.complete)
        {
            throw std::length_error("exact_max_pmf: state budget exceeded at n = " + std::to_string(out.n + 1));
        }
        out.n = n;
        for (const auto& [st, m] : cur)
        {
            const auto M = static_cast<std::size_t>(st.first);
            if (out.pmf.size() <= M)
            {
                out.pmf.resize(M + 1, P(0));
            }
            out.pmf[M] += m;
        }
        if (out.pmf.empty())
        {
            out.pmf.push_back(P(1));
        }
        return out;
    }

    template MaxPmf<double> exact_max_pmf<double>(const IncrementLaw&, std::int64_t, std::size_t);
    template MaxPmf<Rational> exact_max_pmf<Rational>(const IncrementLaw&, std::int64_t, std::size_t);

    const char* to_string(DriftKind kind) noexcept
    {
        switch (kind)
        {
        case DriftKind::Oscillating:
            return "Oscillating";
        case DriftKind::PositiveDrift:
            return "PositiveDrift";
        case DriftKind::NegativeDrift:
            return "NegativeDrift";
        case DriftKind::Inconclusive:
            return "Inconclusive";
        }
        return "?";
    }

    DriftClass classify_drift(const IncrementLaw& law, const McBudget& budget)
    {
        DriftClass dc;
        dc.mean = law.mean();
        dc.symmetric = law.is_symmetric();

        if (budget.paths > 0 && budget.horizon > 0)
        {
            std::int64_t pos = 0;
            std::int64_t neg = 0;
            for (std::int64_t r = 0; r < budget.paths; ++r)
            {
                Rng rng(derive_seed(budget.seed, stream::drift_probe, static_cast<std::uint64_t>(r)));
                std::int64_t s = 0;
                for (std::int64_t k = 0; k < budget.horizon; ++k)
                {
                    s += law.sample(rng);
                }
                pos += s > 0;
                neg += s < 0;
            }
            dc.mc_paths = budget.paths;
            dc.mc_horizon = budget.horizon;
            dc.frac_positive = static_cast<double>(pos) / static_cast<double>(budget.paths);
            dc.frac_negative = static_cast<double>(neg) / static_cast<double>(budget.paths);
        }

        if (law.is_finite())
        {
            const Rational m = *law.exact_mean();
            if (m > 0)
            {
                dc.kind = DriftKind::PositiveDrift;
                dc.reason = "finite mean > 0";
            }
            else if (m < 0)
            {
                dc.kind = DriftKind::NegativeDrift;
                dc.reason = "finite mean < 0";
            }
            else
            {
                dc.kind = DriftKind::Oscillating;
                dc.reason = law.period() == 0 ? "point mass at 0" : "mean = 0";
            }
            return dc;
        }
        if (dc.symmetric)
        {
            dc.kind = DriftKind::Oscillating;
            dc.reason = "symmetric law";
            return dc;
        }
        if (dc.mean && *dc.mean == 0.0)
        {
            dc.kind = DriftKind::Oscillating;
            dc.reason = "mean = 0";
            return dc;
        }
        const StableLatticeParams* sp = law.stable();
        if (sp != nullptr && sp->stable.rho > 0.0 && sp->stable.rho < 1.0)
        {
            // P(S_n > 0) -> rho in (0,1) rules out both drift cases.
            dc.kind = DriftKind::Oscillating;
            dc.reason = "domain of attraction with 0 < rho < 1";
            return dc;
        }
        if (dc.mc_paths > 0)
        {
            const double eps = 4.0 / std::sqrt(static_cast<double>(dc.mc_paths));
            if (dc.frac_positive > 1.0 - eps)
            {
                dc.reason = "Monte Carlo: S_horizon > 0 on nearly all paths; not a proof";
            }
            else if (dc.frac_negative > 1.0 - eps)
            {
                dc.reason = "Monte Carlo: S_horizon < 0 on nearly all paths; not a proof";
            }
            else
            {
                dc.reason = "Monte Carlo: both signs observed; not a proof";
            }
        }
        else
        {
            dc.reason = "no mean and no Monte Carlo budget";
        }
        dc.kind = DriftKind::Inconclusive;
        return dc;
    }
}
