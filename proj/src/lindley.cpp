#include "lindrec/lindley.hpp"

#include "lindrec/detail/discrete_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lindrec
{
    // ---------------------------------------------------------------------
    // VectorLaw
    // ---------------------------------------------------------------------

    VectorLaw VectorLaw::joint(std::vector<std::pair<Vec, Rational>> entries)
    {
        if (entries.empty())
        {
            throw std::invalid_argument("joint law: at least one atom is required");
        }
        const std::size_t d = entries.front().first.size();
        if (d == 0)
        {
            throw std::invalid_argument("joint law: atoms must have dimension >= 1");
        }
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        Rational total = 0;
        for (std::size_t i = 0; i < entries.size(); ++i)
        {
            if (entries[i].first.size() != d)
            {
                throw std::invalid_argument("joint law: atoms have different dimensions");
            }
            if (entries[i].second <= 0)
            {
                throw std::invalid_argument("joint law: weights must be positive");
            }
            if (i > 0 && entries[i].first == entries[i - 1].first)
            {
                throw std::invalid_argument("joint law: duplicate atom");
            }
            total += entries[i].second;
        }
        VectorLaw law;
        law.dim_ = d;
        std::vector<double> probs;
        for (auto& [v, w] : entries)
        {
            Rational p = w / total;
            probs.push_back(to_double(p));
            law.atoms_.push_back(VecAtom{v, probs.back(), std::move(p)});
        }
        law.sampler_ = std::make_shared<detail::DiscreteSampler>(probs);
        return law;
    }

    VectorLaw VectorLaw::joint(const std::vector<std::pair<Vec, double>>& entries)
    {
        std::vector<std::pair<Vec, Rational>> exact;
        for (const auto& [v, w] : entries)
        {
            if (!std::isfinite(w))
            {
                throw std::invalid_argument("joint law: weight must be finite");
            }
            exact.emplace_back(v, Rational(w));
        }
        return joint(std::move(exact));
    }

    VectorLaw VectorLaw::product(std::vector<IncrementLaw> coordinates)
    {
        if (coordinates.empty())
        {
            throw std::invalid_argument("product law: at least one coordinate is required");
        }
        VectorLaw law;
        law.dim_ = coordinates.size();
        law.coordinates_ = std::move(coordinates);
        return law;
    }

    bool VectorLaw::is_finite() const noexcept
    {
        return std::all_of(coordinates_.begin(), coordinates_.end(), [](const IncrementLaw& l) { return l.is_finite(); });
    }

    bool VectorLaw::independent() const
    {
        if (is_product())
        {
            return true;
        }
        std::vector<std::map<std::int64_t, Rational>> marg(dim_);
        for (const auto& a : atoms_)
        {
            for (std::size_t i = 0; i < dim_; ++i)
            {
                marg[i][a.value[i]] += a.exact;
            }
        }
        std::size_t cells = 1;
        for (const auto& m : marg)
        {
            cells *= m.size();
        }
        if (cells != atoms_.size())
        {
            return false;
        }
        for (const auto& a : atoms_)
        {
            Rational p = 1;
            for (std::size_t i = 0; i < dim_; ++i)
            {
                p *= marg[i][a.value[i]];
            }
            if (p != a.exact)
            {
                return false;
            }
        }
        return true;
    }

    const std::vector<VecAtom>& VectorLaw::atoms() const
    {
        if (!is_product())
        {
            return atoms_;
        }
        if (expanded_)
        {
            return *expanded_;
        }
        if (!is_finite())
        {
            throw std::invalid_argument("VectorLaw::atoms: product has a coordinate without finite support");
        }
        std::vector<VecAtom> table{VecAtom{Vec{}, 1.0, Rational(1)}};
        for (const auto& c : coordinates_)
        {
            std::vector<VecAtom> next;
            const auto atoms = c.atoms();
            const auto& exact = c.exact_probs();
            for (const auto& t : table)
            {
                for (std::size_t j = 0; j < atoms.size(); ++j)
                {
                    VecAtom a = t;
                    a.value.push_back(atoms[j].value);
                    a.exact *= exact[j];
                    a.prob = to_double(a.exact);
                    next.push_back(std::move(a));
                }
            }
            table = std::move(next);
        }
        std::sort(table.begin(), table.end(), [](const VecAtom& a, const VecAtom& b) { return a.value < b.value; });
        expanded_ = std::make_shared<const std::vector<VecAtom>>(std::move(table));
        return *expanded_;
    }

    IncrementLaw VectorLaw::marginal(std::size_t i) const
    {
        if (i >= dim_)
        {
            throw std::out_of_range("VectorLaw::marginal: coordinate out of range");
        }
        if (is_product())
        {
            return coordinates_[i];
        }
        std::map<std::int64_t, Rational> m;
        for (const auto& a : atoms_)
        {
            m[a.value[i]] += a.exact;
        }
        return IncrementLaw::finite_support(std::vector<std::pair<std::int64_t, Rational>>(m.begin(), m.end()));
    }

    void VectorLaw::sample(Rng& rng, Vec& out) const
    {
        out.resize(dim_);
        if (is_product())
        {
            for (std::size_t i = 0; i < dim_; ++i)
            {
                out[i] = coordinates_[i].sample(rng);
            }
            return;
        }
        const auto& a = atoms_[sampler_->draw(rng)];
        std::copy(a.value.begin(), a.value.end(), out.begin());
    }

    Vec VectorLaw::sample(Rng& rng) const
    {
        Vec out;
        sample(rng, out);
        return out;
    }

    std::string VectorLaw::describe() const
    {
        std::ostringstream os;
        if (is_product())
        {
            os << "product{ ";
            for (std::size_t i = 0; i < coordinates_.size(); ++i)
            {
                os << (i ? " x " : "") << coordinates_[i].describe();
            }
            os << " }";
            return os.str();
        }
        os << "joint{ ";
        for (std::size_t i = 0; i < atoms_.size(); ++i)
        {
            os << (i ? ", " : "") << "(";
            for (std::size_t j = 0; j < dim_; ++j)
            {
                os << (j ? "," : "") << atoms_[i].value[j];
            }
            os << "):" << to_fraction_string(atoms_[i].exact);
        }
        os << " }";
        return os.str();
    }

    // ---------------------------------------------------------------------
    // Recursion and returns
    // ---------------------------------------------------------------------

    Vec lindley_step(const Vec& w, const Vec& y)
    {
        if (w.size() != y.size())
        {
            throw std::invalid_argument("lindley_step: dimension mismatch (" + std::to_string(w.size()) + " vs " +
                                        std::to_string(y.size()) + ")");
        }
        Vec out(w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
        {
            if (w[i] < 0)
            {
                throw std::invalid_argument("lindley_step: state has a negative coordinate");
            }
            out[i] = lindley_step(w[i], y[i]);
        }
        return out;
    }

    namespace
    {
        void check_state(const VectorLaw& law, const Vec& w, const char* who)
        {
            if (w.size() != law.dim())
            {
                throw std::invalid_argument(std::string(who) + ": state dimension does not match the law");
            }
            for (auto v : w)
            {
                if (v < 0)
                {
                    throw std::invalid_argument(std::string(who) + ": state has a negative coordinate");
                }
            }
        }
    }

    ReturnStats simulate_returns(const VectorLaw& law, const Vec& start, std::int64_t horizon, Rng& rng,
                                 std::optional<Vec> target)
    {
        if (horizon < 1)
        {
            throw std::invalid_argument("simulate_returns: horizon must be >= 1");
        }
        check_state(law, start, "simulate_returns");
        ReturnStats st;
        st.target = target ? *target : Vec(law.dim(), 0);
        check_state(law, st.target, "simulate_returns");
        st.horizon = horizon;
        Vec w = start;
        Vec y(law.dim());
        const std::size_t d = law.dim();
        for (std::int64_t n = 1; n <= horizon; ++n)
        {
            law.sample(rng, y);
            bool hit = true;
            for (std::size_t i = 0; i < d; ++i)
            {
                w[i] = lindley_step(w[i], y[i]);
                hit = hit && w[i] == st.target[i];
            }
            if (hit)
            {
                st.return_times.push_back(n);
            }
        }
        st.count = static_cast<std::int64_t>(st.return_times.size());
        st.censored = st.return_times.empty() || st.return_times.back() != horizon;
        if (st.count >= 2)
        {
            double sum = 0.0;
            double sq = 0.0;
            std::int64_t prev = 0;
            for (auto t : st.return_times)
            {
                const double g = static_cast<double>(t - prev);
                sum += g;
                sq += g * g;
                prev = t;
            }
            const double k = static_cast<double>(st.count);
            const double mean = sum / k;
            const double var = std::max(0.0, (sq - k * mean * mean) / (k - 1.0));
            st.mean_return_time = mean;
            st.mean_return_halfwidth = 1.96 * std::sqrt(var / k);
        }
        return st;
    }

    // ---------------------------------------------------------------------
    // Backward process
    // ---------------------------------------------------------------------

    void BackwardMap::compose_inner(const Vec& y)
    {
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            b[i] = std::max(b[i], -a[i]);
            a[i] += y[i];
        }
    }

    Vec BackwardMap::apply(const Vec& x) const
    {
        Vec out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            out[i] = std::max(x[i] - a[i], b[i]);
        }
        return out;
    }

    BackwardResult backward_iterate(const VectorLaw& law, const std::vector<Vec>& starts, std::int64_t n_max, Rng& rng)
    {
        const std::size_t d = law.dim();
        Vec upper(d, 0);
        for (const auto& s : starts)
        {
            check_state(law, s, "backward_iterate");
            for (std::size_t i = 0; i < d; ++i)
            {
                upper[i] = std::max(upper[i], s[i]);
            }
        }
        if (std::all_of(upper.begin(), upper.end(), [](std::int64_t v) { return v == 0; }))
        {
            throw std::invalid_argument("backward_iterate: need a start other than the origin");
        }
        BackwardMap g(d);
        Vec y(d);
        BackwardResult res;
        for (std::int64_t n = 1; n <= n_max; ++n)
        {
            law.sample(rng, y);
            g.compose_inner(y);
            // max(B - a, b) == max(-a, b) in every coordinate
            bool same = true;
            for (std::size_t i = 0; i < d && same; ++i)
            {
                same = std::max(upper[i] - g.a[i], g.b[i]) == std::max(-g.a[i], g.b[i]);
            }
            if (same)
            {
                res.coalesced_at = n;
                res.value = g.apply(Vec(d, 0));
                res.censored = false;
                return res;
            }
        }
        return res;
    }

    // ---------------------------------------------------------------------
    // Essential class
    // ---------------------------------------------------------------------

    EssentialClassReport essential_class(const VectorLaw& law, std::int64_t state_bound)
    {
        if (!law.is_joint() && !law.is_finite())
        {
            throw std::invalid_argument("essential_class: law must have finite support");
        }
        if (state_bound < 0)
        {
            throw std::invalid_argument("essential_class: state_bound must be >= 0");
        }
        const auto& atoms = law.atoms();
        const std::size_t d = law.dim();
        const Vec origin(d, 0);

        EssentialClassReport rep;
        std::map<Vec, Vec> parent;
        std::set<Vec> boundary;
        std::deque<Vec> queue{origin};
        parent.emplace(origin, origin);
        bool found = false;
        Vec found_from;
        auto outside = [&](const Vec& w) {
            return std::any_of(w.begin(), w.end(), [&](std::int64_t v) { return v > state_bound; });
        };
        while (!queue.empty())
        {
            const Vec w = queue.front();
            queue.pop_front();
            for (const auto& a : atoms)
            {
                Vec next(d);
                for (std::size_t i = 0; i < d; ++i)
                {
                    next[i] = lindley_step(w[i], a.value[i]);
                }
                if (next == origin && !found)
                {
                    found = true;
                    found_from = w;
                }
                if (parent.count(next) != 0)
                {
                    continue;
                }
                parent.emplace(next, w);
                if (outside(next))
                {
                    boundary.insert(next);
                }
                else
                {
                    queue.push_back(next);
                }
            }
        }
        for (const auto& [s, p] : parent)
        {
            rep.explored.push_back(s);
        }
        rep.boundary.assign(boundary.begin(), boundary.end());

        bool origin_has_predecessor = false;
        for (const auto& a : atoms)
        {
            if (std::all_of(a.value.begin(), a.value.end(), [](std::int64_t v) { return v >= 0; }))
            {
                origin_has_predecessor = true;
            }
        }

        if (found)
        {
            rep.origin_revisitable = true;
            rep.definitive = true;
            rep.reason = "return path to the origin found";
            std::vector<Vec> path{origin};
            for (Vec w = found_from; w != origin; w = parent.at(w))
            {
                path.push_back(w);
            }
            path.push_back(origin);
            std::reverse(path.begin() + 1, path.end() - 1);
            rep.witness = std::move(path);
        }
        else if (!origin_has_predecessor)
        {
            rep.origin_revisitable = false;
            rep.definitive = true;
            rep.reason = "no atom is >= 0 in every coordinate, so no state maps to the origin";
        }
        else if (rep.boundary.empty())
        {
            rep.origin_revisitable = false;
            rep.definitive = true;
            rep.reason = "reachable set exhausted inside the bound without a return";
        }
        else
        {
            rep.origin_revisitable = false;
            rep.definitive = false;
            rep.reason = "exploration truncated at the bound without a return";
        }
        return rep;
    }

    // ---------------------------------------------------------------------
    // Exact forward laws
    // ---------------------------------------------------------------------

    template <class P>
    std::map<Vec, P> exact_lindley_pmf(const VectorLaw& law, const Vec& start, std::int64_t n, std::size_t state_budget)
    {
        check_state(law, start, "exact_lindley_pmf");
        if (n < 0)
        {
            throw std::invalid_argument("exact_lindley_pmf: n must be >= 0");
        }
        const auto& atoms = law.atoms();
        std::map<Vec, P> cur{{start, P(1)}};
        for (std::int64_t k = 0; k < n; ++k)
        {
            std::map<Vec, P> nxt;
            for (const auto& [w, m] : cur)
            {
                for (const auto& a : atoms)
                {
                    Vec v(w.size());
                    for (std::size_t i = 0; i < w.size(); ++i)
                    {
                        v[i] = lindley_step(w[i], a.value[i]);
                    }
                    if constexpr (std::is_same_v<P, Rational>)
                    {
                        nxt[v] += m * a.exact;
                    }
                    else
                    {
                        nxt[v] += m * a.prob;
                    }
                }
            }
            if (nxt.size() > state_budget)
            {
                throw std::length_error("exact_lindley_pmf: state budget exceeded at step " + std::to_string(k + 1));
            }
            cur = std::move(nxt);
        }
        return cur;
    }

    template std::map<Vec, double> exact_lindley_pmf<double>(const VectorLaw&, const Vec&, std::int64_t, std::size_t);
    template std::map<Vec, Rational> exact_lindley_pmf<Rational>(const VectorLaw&, const Vec&, std::int64_t, std::size_t);

    std::size_t GridLaw::index(const Vec& w) const
    {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < dim; ++i)
        {
            idx = idx * static_cast<std::size_t>(bound + 1) + static_cast<std::size_t>(w[i]);
        }
        return idx;
    }

    Vec GridLaw::state(std::size_t index) const
    {
        Vec w(dim);
        for (std::size_t i = dim; i-- > 0;)
        {
            w[i] = static_cast<std::int64_t>(index % static_cast<std::size_t>(bound + 1));
            index /= static_cast<std::size_t>(bound + 1);
        }
        return w;
    }

    GridLaw forward_grid_law(const VectorLaw& law, const Vec& start, std::int64_t n, std::int64_t bound)
    {
        check_state(law, start, "forward_grid_law");
        if (bound < 0 || n < 0)
        {
            throw std::invalid_argument("forward_grid_law: bound and n must be >= 0");
        }
        const std::size_t d = law.dim();
        const auto& atoms = law.atoms();
        GridLaw g;
        g.dim = d;
        g.bound = bound;
        std::size_t cells = 1;
        for (std::size_t i = 0; i < d; ++i)
        {
            cells *= static_cast<std::size_t>(bound + 1);
        }
        if (std::any_of(start.begin(), start.end(), [&](std::int64_t v) { return v > bound; }))
        {
            throw std::invalid_argument("forward_grid_law: start lies outside the box");
        }
        g.mass.assign(cells, 0.0);
        g.mass[g.index(start)] = 1.0;
        std::vector<double> next(cells);
        // Transition targets for every (cell, atom), -1 if outside.
        std::vector<long long> target(cells * atoms.size());
        for (std::size_t c = 0; c < cells; ++c)
        {
            const Vec w = g.state(c);
            for (std::size_t j = 0; j < atoms.size(); ++j)
            {
                Vec v(d);
                bool inside = true;
                for (std::size_t i = 0; i < d; ++i)
                {
                    v[i] = lindley_step(w[i], atoms[j].value[i]);
                    inside = inside && v[i] <= bound;
                }
                target[c * atoms.size() + j] = inside ? static_cast<long long>(g.index(v)) : -1;
            }
        }
        long double lost = 0.0L;
        for (std::int64_t k = 0; k < n; ++k)
        {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t c = 0; c < cells; ++c)
            {
                const double m = g.mass[c];
                if (m == 0.0)
                {
                    continue;
                }
                for (std::size_t j = 0; j < atoms.size(); ++j)
                {
                    const long long t = target[c * atoms.size() + j];
                    if (t < 0)
                    {
                        lost += m * atoms[j].prob;
                    }
                    else
                    {
                        next[static_cast<std::size_t>(t)] += m * atoms[j].prob;
                    }
                }
            }
            std::swap(g.mass, next);
        }
        g.overflow = static_cast<double>(lost);
        return g;
    }
}
