#pragma once

#include "lindrec/increments.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lindrec
{
    // ---------------------------------------------------------------------
    // Paths and ladder structure
    // ---------------------------------------------------------------------

    struct WalkPath
    {
        std::vector<std::int64_t> increments; // Y_1..Y_N
        std::vector<std::int64_t> sums;       // S_0 = 0, S_1..S_N
        std::uint64_t seed = 0;
        std::string law;

        std::int64_t length() const noexcept { return static_cast<std::int64_t>(increments.size()); }
    };

    WalkPath simulate_path(const IncrementLaw& law, std::int64_t n, Rng& rng);
    WalkPath path_from_increments(std::vector<std::int64_t> increments);

    enum class LadderKind
    {
        StrictAscending,
        WeakAscending,
    };

    struct LadderRecord
    {
        LadderKind kind = LadderKind::StrictAscending;
        std::vector<std::int64_t> epochs;
        std::vector<std::int64_t> heights;
        // The epoch after the last listed one lies beyond this horizon.
        std::int64_t censored_at = 0;
    };

    LadderRecord ladder_epochs(const WalkPath& path, LadderKind kind);

    // M_0 = 0, M_n = max(0, S_1, ..., S_n)
    std::vector<std::int64_t> running_max(const WalkPath& path);

    // ---------------------------------------------------------------------
    // Exact oracles for finite-support laws
    // ---------------------------------------------------------------------

    inline constexpr std::size_t kDefaultStateBudget = std::size_t{1} << 26;
    inline constexpr std::int64_t kRationalLadderLimit = 10000;

    template <class P>
    struct LadderPmf
    {
        LadderKind kind = LadderKind::StrictAscending;
        std::vector<P> pmf;  // pmf[n] = P(tau = n), pmf[0] = 0
        P survival{};        // P(tau > n_reached)
        std::int64_t n_requested = 0;
        std::int64_t n_reached = 0;
        bool complete = false;
        // Accumulated rounding bound n_reached * eps (0 for rationals).
        double error_bound = 0.0;
    };

    // Forward DP over the walk confined to {S <= 0} (strict) or {S < 0}
    // (weak), absorbing on first exit. States that can no longer exit before
    // n_max are folded into the survival mass, so
    // sum pmf + survival = 1 exactly in rational mode.
    // If the state array would exceed state_budget entries the result is
    // partial (complete = false, n_reached < n_requested).
    template <class P>
    LadderPmf<P> exact_ladder_pmf(const IncrementLaw& law, LadderKind kind, std::int64_t n_max,
                                  std::size_t state_budget = kDefaultStateBudget);

    template <class P>
    struct MaxPmf
    {
        std::vector<P> pmf; // pmf[m] = P(M_n = m)
        std::int64_t n = 0;
        bool complete = false;
    };

    // DP over (M, D) with D = M - S >= 0: D' = max(D - y, 0), M' = M + max(y - D, 0).
    template <class P>
    MaxPmf<P> exact_max_pmf(const IncrementLaw& law, std::int64_t n, std::size_t state_budget = kDefaultStateBudget);

    // ---------------------------------------------------------------------
    // Drift class
    // ---------------------------------------------------------------------

    enum class DriftKind
    {
        Oscillating,
        PositiveDrift,
        NegativeDrift,
        Inconclusive,
    };

    const char* to_string(DriftKind kind) noexcept;

    struct McBudget
    {
        std::int64_t paths = 0;
        std::int64_t horizon = 0;
        std::uint64_t seed = 0;
    };

    struct DriftClass
    {
        DriftKind kind = DriftKind::Inconclusive;
        std::optional<double> mean;
        bool symmetric = false;
        std::string reason;
        // Monte Carlo sign statistics: fraction of paths with S_horizon > 0 / < 0.
        std::int64_t mc_paths = 0;
        std::int64_t mc_horizon = 0;
        double frac_positive = 0.0;
        double frac_negative = 0.0;
    };

    DriftClass classify_drift(const IncrementLaw& law, const McBudget& budget = {});
}
