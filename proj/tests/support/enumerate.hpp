#pragma once

// Brute-force path enumeration for finite-support laws. Exponential in n,
// used only as an exact reference for the DP oracles.

#include "lindrec/increments.hpp"
#include "lindrec/rational.hpp"
#include "lindrec/walk.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace lindrec::testing
{
    // Calls f(increments, probability) for every path of length n.
    inline void for_each_path(const IncrementLaw& law, int n,
                              const std::function<void(const std::vector<std::int64_t>&, const Rational&)>& f)
    {
        const auto atoms = law.atoms();
        const auto& probs = law.exact_probs();
        std::vector<std::int64_t> ys(static_cast<std::size_t>(n));
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        while (true)
        {
            Rational p = 1;
            for (int i = 0; i < n; ++i)
            {
                ys[i] = atoms[idx[i]].value;
                p *= probs[idx[i]];
            }
            f(ys, p);
            int i = n - 1;
            while (i >= 0 && ++idx[i] == atoms.size())
            {
                idx[i] = 0;
                --i;
            }
            if (i < 0)
            {
                break;
            }
        }
    }

    struct EnumeratedLadder
    {
        std::vector<Rational> pmf; // pmf[k], k = 0..n
        Rational survival;
    };

    inline EnumeratedLadder enumerate_ladder(const IncrementLaw& law, LadderKind kind, int n)
    {
        EnumeratedLadder out;
        out.pmf.assign(static_cast<std::size_t>(n) + 1, Rational(0));
        out.survival = 0;
        for_each_path(law, n, [&](const std::vector<std::int64_t>& ys, const Rational& p) {
            std::int64_t s = 0;
            for (int k = 1; k <= n; ++k)
            {
                s += ys[k - 1];
                const bool hit = kind == LadderKind::StrictAscending ? s > 0 : s >= 0;
                if (hit)
                {
                    out.pmf[k] += p;
                    return;
                }
            }
            out.survival += p;
        });
        return out;
    }

    // Law of M_n = max(0, S_1, ..., S_n).
    inline std::map<std::int64_t, Rational> enumerate_max(const IncrementLaw& law, int n)
    {
        std::map<std::int64_t, Rational> out;
        for_each_path(law, n, [&](const std::vector<std::int64_t>& ys, const Rational& p) {
            std::int64_t s = 0;
            std::int64_t m = 0;
            for (auto y : ys)
            {
                s += y;
                m = std::max(m, s);
            }
            out[m] += p;
        });
        return out;
    }

    // Law of W_n from W_0 = 0 under W = max(W - Y, 0).
    inline std::map<std::int64_t, Rational> enumerate_lindley(const IncrementLaw& law, int n)
    {
        std::map<std::int64_t, Rational> out;
        for_each_path(law, n, [&](const std::vector<std::int64_t>& ys, const Rational& p) {
            std::int64_t w = 0;
            for (auto y : ys)
            {
                w = std::max<std::int64_t>(w - y, 0);
            }
            out[w] += p;
        });
        return out;
    }

    // Dense pmf vector -> sparse map without zero entries.
    template <class P>
    std::map<std::int64_t, P> to_sparse(const std::vector<P>& dense)
    {
        std::map<std::int64_t, P> out;
        for (std::size_t i = 0; i < dense.size(); ++i)
        {
            if (dense[i] != 0)
            {
                out[static_cast<std::int64_t>(i)] = dense[i];
            }
        }
        return out;
    }

    template <class P>
    std::map<std::int64_t, P> strip_zeros(std::map<std::int64_t, P> m)
    {
        std::erase_if(m, [](const auto& kv) { return kv.second == 0; });
        return m;
    }
}
