#pragma once

#include "lindrec/increments.hpp"
#include "lindrec/lindley.hpp"
#include "lindrec/renewal.hpp"
#include "lindrec/subordinate.hpp"
#include "lindrec/walk.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lindrec
{
    // ---------------------------------------------------------------------
    // Two-dimensional classification
    // ---------------------------------------------------------------------

    enum class PredictedClass
    {
        PositiveRecurrent,
        NullRecurrent,
        Transient,
        OutsideTheory,
    };

    const char* to_string(PredictedClass c) noexcept;

    // A Lindley coordinate evolves by max(w - y, 0), a walk coordinate by z + y.
    enum class CoordinateRole
    {
        Lindley,
        Walk,
    };

    const char* to_string(CoordinateRole r) noexcept;

    // Criteria in firing order. The first one whose hypotheses hold sets the
    // verdict; every other one that holds is still listed.
    enum class Criterion
    {
        BackwardPositive,       // all Lindley coordinates with positive drift
        LindleyNegativeDrift,   // some Lindley coordinate drifts to +infinity
        LindleyWalkCase1,       // W positive recurrent, Z centered
        LindleyWalkCase2,       // S oscillating, 1/2 < rho < 1, Z symmetric finite range, independent
        LindleyWalkCase3,       // S oscillating with E Y^2 < inf, Z symmetric finite range, independent
        RhoSum,                 // independent oscillating coordinates with rho1 + rho2 > 1
        FiniteVariance,         // independent centered coordinates with finite variance
        SubordinatedTransient,  // S oscillating, 0 < rho < 1/2, Z symmetric finite range, independent
    };

    inline constexpr std::array<Criterion, 8> kCriterionOrder = {
        Criterion::BackwardPositive, Criterion::LindleyNegativeDrift, Criterion::LindleyWalkCase1,
        Criterion::LindleyWalkCase2, Criterion::LindleyWalkCase3,     Criterion::RhoSum,
        Criterion::FiniteVariance,   Criterion::SubordinatedTransient,
    };

    const char* to_string(Criterion c) noexcept;
    PredictedClass criterion_class(Criterion c) noexcept;

    struct CoordinateFacts
    {
        CoordinateRole role = CoordinateRole::Lindley;
        DriftClass drift;
        std::optional<double> rho; // positivity parameter, when the law lies in some D(alpha, beta)
        bool finite_variance = false;
        bool centered = false;     // mean exactly 0 (finite support) or 0 by construction
        bool symmetric = false;
        bool finite_range = false;
        bool degenerate = false;
    };

    CoordinateFacts coordinate_facts(const IncrementLaw& law, CoordinateRole role);

    struct EvidenceOptions
    {
        std::int64_t replicas = 200;
        std::int64_t horizon = 100000;      // return counts at horizon and 2 horizon
        std::uint64_t seed = 0;
        double recurrence_growth = 1.5;     // count(2H) / count(H) at least this
        double transience_growth = 1.05;    // count(2H) / count(H) below this
        std::int64_t backward_runs = 1000;
        std::int64_t backward_steps = 10000;
        double coalescence_fraction = 0.99;
        std::int64_t green_K = 10000;       // 0 disables the Green-sum fit
        bool enabled = true;
        unsigned threads = 0;
    };

    enum class Consistency
    {
        Consistent,
        Inconsistent,
        Inconclusive,
        NotApplicable,
    };

    const char* to_string(Consistency c) noexcept;

    struct Evidence
    {
        // Returns of the two-dimensional process to the origin, summed over replicas.
        std::int64_t replicas = 0;
        std::int64_t horizon = 0;
        std::int64_t returns_h = 0;
        std::int64_t returns_2h = 0;
        std::optional<double> growth;
        // Backward coalescence.
        std::int64_t backward_runs = 0;
        std::int64_t coalesced = 0;
        std::optional<double> coalescence_rate;
        // Green partial sums from exact renewal sequences (independent Lindley pairs).
        std::optional<GrowthVerdict> green;
        std::int64_t green_K = 0;
        std::vector<std::string> notes;
    };

    struct Verdict
    {
        PredictedClass predicted = PredictedClass::OutsideTheory;
        std::optional<Criterion> criterion;
        std::vector<Criterion> fired;
        std::vector<std::string> reasons; // failed hypotheses, one line per criterion
        std::array<CoordinateFacts, 2> facts;
        bool independent = false;
        Evidence evidence;
        Consistency consistency = Consistency::NotApplicable;
    };

    // Hypotheses are decided from the laws alone; evidence never changes the
    // predicted class, only the consistency flag.
    Verdict classify_2d(const VectorLaw& law, std::array<CoordinateRole, 2> roles, const EvidenceOptions& opts = {});

    // ---------------------------------------------------------------------
    // Mixed Lindley / walk return counts
    // ---------------------------------------------------------------------

    // Number of n <= h with (X_n^1, ..., X_n^d) = 0 for each checkpoint h
    // (sorted ascending), from X_0 = 0; replica r uses seed (master, primary, r).
    // Counts are summed over replicas.
    std::vector<std::int64_t> return_counts(const VectorLaw& law, const std::vector<CoordinateRole>& roles,
                                            const std::vector<std::int64_t>& checkpoints, std::int64_t replicas,
                                            std::uint64_t master_seed, unsigned threads = 0);

    // ---------------------------------------------------------------------
    // Chung-Fuchs test via Pitman's tail relation
    // ---------------------------------------------------------------------

    struct IntegralTest
    {
        bool convergent = false;
        std::optional<double> value;
        double rho = 0.5;
        SlowlyVarying ell;
        double epsilon = 0.5;
        std::string reason;
    };

    // int_0^eps dt / (t^(2 rho) l(t^-2)) for l = c log(e+x)^eta: convergent
    // iff 2 rho < 1, or 2 rho = 1 and eta > 1. The value is computed after
    // t = e^-s by exp-sinh quadrature on [-log eps, inf).
    IntegralTest pitman_chung_fuchs(double rho, const SlowlyVarying& ell, double epsilon = 0.5);

    // The log^eta truncated-variance example at rho = 1/2: 1 - phi(t) is
    // proportional to t / l*(t^-2) with l* the 2-conjugate of log^eta, so the
    // test runs on 1 / l*. Convergent iff eta > 2.
    IntegralTest pitman_chung_fuchs_log_example(double eta, double epsilon = 0.5);

    // ---------------------------------------------------------------------
    // Wald identity for the projected return time
    // ---------------------------------------------------------------------

    struct MeanEstimate
    {
        double mean = 0.0;
        double stderr_ = 0.0;
        std::int64_t n = 0;
        std::int64_t censored = 0;
    };

    struct WaldCheck
    {
        MeanEstimate lhs;       // E taubar1(T~) = E T, first return of (W1, W2) to the origin
        MeanEstimate tau_bar;   // E taubar1(1)
        MeanEstimate t_tilde;   // E T~, first n with W2 = 0 at the n-th weak ladder epoch of S1
        double rhs = 0.0;
        double rhs_stderr = 0.0;
        double relative_gap = 0.0; // |lhs - rhs| / rhs
        double gap_ci_low = 0.0;   // 95% interval for (lhs - rhs) / rhs
        double gap_ci_high = 0.0;
        double censored_fraction = 0.0;
        bool conclusive = false;
        std::string reason;
    };

    inline constexpr double kWaldCensoredLimit = 1e-3;

    // The three expectations come from independent replica sets (streams
    // primary, secondary, tertiary). law1 must have positive drift. Runs
    // longer than `step_cap` steps of S1 are censored.
    WaldCheck wald_check(const IncrementLaw& law1, const IncrementLaw& law2, std::int64_t replicas,
                         std::uint64_t master_seed, std::int64_t step_cap = 1000000, unsigned threads = 0);

    // ---------------------------------------------------------------------
    // Backward sampling against the forward chain
    // ---------------------------------------------------------------------

    struct BackwardComparison
    {
        std::int64_t runs = 0;
        std::int64_t coalesced = 0;
        double coalescence_rate = 0.0;
        std::int64_t max_steps = 0;
        std::int64_t forward_n = 0;
        std::int64_t bound = 0;
        double forward_overflow = 0.0;
        double total_variation = 0.0;  // empirical backward law vs forward grid law
        double outside_bound = 0.0;    // empirical mass outside the grid
    };

    // Runs backward_iterate from {0, B 1} with replica seeds (master, primary, r).
    BackwardComparison compare_backward_forward(const VectorLaw& law, std::int64_t runs, std::int64_t max_steps,
                                                std::int64_t start_level, std::int64_t forward_n, std::int64_t bound,
                                                std::uint64_t master_seed, unsigned threads = 0);
}
