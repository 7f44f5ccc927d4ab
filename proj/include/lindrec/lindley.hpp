#pragma once

#include "lindrec/increments.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lindrec
{
    namespace detail
    {
        class DiscreteSampler;
    }

    using Vec = std::vector<std::int64_t>;

    // ---------------------------------------------------------------------
    // d-dimensional increment laws
    // ---------------------------------------------------------------------

    struct VecAtom
    {
        Vec value;
        double prob = 0.0;
        Rational exact;
    };

    // Either an explicit joint table on Z^d or a product of independent
    // one-dimensional laws.
    class VectorLaw
    {
    public:
        static VectorLaw joint(std::vector<std::pair<Vec, Rational>> entries);
        static VectorLaw joint(const std::vector<std::pair<Vec, double>>& entries);
        static VectorLaw product(std::vector<IncrementLaw> coordinates);

        std::size_t dim() const noexcept { return dim_; }
        bool is_joint() const noexcept { return !atoms_.empty() && coordinates_.empty(); }
        bool is_product() const noexcept { return !coordinates_.empty(); }
        // Every coordinate has finite support.
        bool is_finite() const noexcept;
        // Product form, or a joint table that factorizes exactly.
        bool independent() const;

        // Joint table; for finite products the expanded Cartesian table.
        const std::vector<VecAtom>& atoms() const;
        IncrementLaw marginal(std::size_t i) const;

        // Coordinates are drawn in order from the same generator, so a
        // one-dimensional product consumes randomness exactly like
        // IncrementLaw::sample.
        void sample(Rng& rng, Vec& out) const;
        Vec sample(Rng& rng) const;

        std::string describe() const;

    private:
        std::size_t dim_ = 0;
        std::vector<VecAtom> atoms_;
        std::vector<IncrementLaw> coordinates_;
        std::shared_ptr<const detail::DiscreteSampler> sampler_;
        mutable std::shared_ptr<const std::vector<VecAtom>> expanded_;
    };

    // ---------------------------------------------------------------------
    // Lindley recursion
    // ---------------------------------------------------------------------

    inline std::int64_t lindley_step(std::int64_t w, std::int64_t y) noexcept { return w > y ? w - y : 0; }

    // max(w - y, 0) coordinatewise. Throws on dimension mismatch or w < 0.
    Vec lindley_step(const Vec& w, const Vec& y);

    struct ReturnStats
    {
        Vec target;
        std::vector<std::int64_t> return_times;
        std::int64_t count = 0;
        std::int64_t horizon = 0;
        // The next return, if any, lies beyond the horizon.
        bool censored = true;
        // Mean gap between successive visits (first gap from time 0) with a
        // normal 95% half-width; nullopt with fewer than two visits.
        std::optional<double> mean_return_time;
        std::optional<double> mean_return_halfwidth;
    };

    // All n in 1..horizon with W_n = target (default: the origin).
    ReturnStats simulate_returns(const VectorLaw& law, const Vec& start, std::int64_t horizon, Rng& rng,
                                 std::optional<Vec> target = std::nullopt);

    // ---------------------------------------------------------------------
    // Backward process
    // ---------------------------------------------------------------------

    // F_1 o ... o F_n has the form x -> max(x - a, b); composing a new map
    // F(x) = max(x - y, 0) on the inside gives a' = a + y, b' = max(b, -a).
    struct BackwardMap
    {
        Vec a;
        Vec b;

        explicit BackwardMap(std::size_t d) : a(d, 0), b(d, 0) {}
        void compose_inner(const Vec& y);
        Vec apply(const Vec& x) const;
    };

    struct BackwardResult
    {
        std::optional<std::int64_t> coalesced_at;
        Vec value; // empty when censored
        bool censored = true;
    };

    // Coalescence is tested on the origin and the componentwise maximum B of
    // the starts; by monotonicity every start in [0, B] then has the same
    // image. The reported value can still change later only if some
    // coordinate walk drops by more than B below its running level.
    // Throws if every start is the origin.
    BackwardResult backward_iterate(const VectorLaw& law, const std::vector<Vec>& starts, std::int64_t n_max, Rng& rng);

    // ---------------------------------------------------------------------
    // Essential class exploration
    // ---------------------------------------------------------------------

    struct EssentialClassReport
    {
        std::vector<Vec> explored;  // sorted; includes boundary states
        std::vector<Vec> boundary;  // states outside the bound, not expanded
        bool origin_revisitable = false;
        bool definitive = false;
        std::string reason;
        // The first return path found, as a sequence of states from the origin.
        std::vector<Vec> witness;
    };

    EssentialClassReport essential_class(const VectorLaw& law, std::int64_t state_bound);

    // ---------------------------------------------------------------------
    // Exact forward laws
    // ---------------------------------------------------------------------

    // Exact law of W_n from start by DP over a sparse state map.
    template <class P>
    std::map<Vec, P> exact_lindley_pmf(const VectorLaw& law, const Vec& start, std::int64_t n,
                                       std::size_t state_budget = std::size_t{1} << 22);

    // Law of W_n on the box [0, bound]^d (row-major, first coordinate
    // slowest). Mass that ever leaves the box is dropped and reported as
    // overflow, an upper bound on the total-variation error.
    struct GridLaw
    {
        std::size_t dim = 0;
        std::int64_t bound = 0;
        std::vector<double> mass;
        double overflow = 0.0;

        std::size_t index(const Vec& w) const;
        Vec state(std::size_t index) const;
    };

    GridLaw forward_grid_law(const VectorLaw& law, const Vec& start, std::int64_t n, std::int64_t bound);
}
