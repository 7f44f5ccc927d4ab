#pragma once

#include "lindrec/random.hpp"
#include "lindrec/rational.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lindrec
{
    // ---------------------------------------------------------------------
    // Stable parameters and the positivity parameter
    // ---------------------------------------------------------------------

    // True iff (alpha, beta) belongs to the admissible set
    //   {0<a<1, |b|<1} u {1<a<2, |b|<=1} u {a in {1,2}, b=0}.
    bool in_A(double alpha, double beta) noexcept;

    struct StableParams
    {
        double alpha = 2.0;
        double beta = 0.0;
        double rho = 0.5;

        // Validates (alpha, beta) and fills rho. Throws std::invalid_argument outside the set.
        static StableParams make(double alpha, double beta);
    };

    // rho = 1/2 + arctan(beta tan(pi alpha / 2)) / (pi alpha); 1/2 when alpha is 1 or 2.
    double rho_from(double alpha, double beta);
    double rho_from(const StableParams& params);

    // ---------------------------------------------------------------------
    // Slowly varying functions: l(x) = c (log(e + x))^eta
    // ---------------------------------------------------------------------

    struct SlowlyVarying
    {
        double c = 1.0;
        double eta = 0.0;

        static SlowlyVarying constant(double c) { return {c, 0.0}; }
        static SlowlyVarying log_power(double c, double eta);

        double operator()(double x) const;
        // log l(x), stable for huge x.
        double log_value(double x) const;
    };

    // ---------------------------------------------------------------------
    // Increment laws on Z
    // ---------------------------------------------------------------------

    enum class LawKind
    {
        FiniteSupport,
        StableLattice,
    };

    struct Atom
    {
        std::int64_t value = 0;
        double prob = 0.0;
    };

    // Parameters of a lattice law in D(alpha, beta).
    //
    //   p(k) = kappa c+ k^-(1+alpha) log(e+k)^g     for k >= 3
    //   p(k) = kappa c- |k|^-(1+alpha) log(e+|k|)^g for k <= -3
    //
    // with c+ = (1+beta)/2, c- = (1-beta)/2, so (c+ - c-)/(c+ + c-) = beta.
    // The five central atoms -2..2 carry the remaining mass with a linear
    // profile a + b j chosen so that the law is centered when alpha > 1.
    // kappa = scale / (2 (Z + |beta| M)) with Z, M the tail mass and tail
    // first-moment sums; scale in (0, 2] keeps every central mass >= 0.
    struct StableLatticeParams
    {
        StableParams stable;
        double scale = 1.0;
        double log_power = 0.0;
        double c_plus = 0.5;
        double c_minus = 0.5;
        double kappa = 0.0;
        std::vector<double> central; // masses of -2..2
    };

    inline constexpr std::int64_t kStableTailStart = 3;

    class IncrementLaw
    {
    public:
        // Normalizes the weights exactly. Rejects empty input, non-positive
        // weights and duplicate values.
        static IncrementLaw finite_support(std::vector<std::pair<std::int64_t, Rational>> entries);
        // Double weights are read as their shortest decimal form (0.2 -> 1/5).
        static IncrementLaw finite_support(const std::vector<std::pair<std::int64_t, double>>& entries);
        static IncrementLaw stable_lattice(double alpha, double beta, double scale, double log_power = 0.0);
        static IncrementLaw point_mass(std::int64_t value);

        LawKind kind() const noexcept;
        bool is_finite() const noexcept { return kind() == LawKind::FiniteSupport; }

        // FiniteSupport only (empty for StableLattice).
        std::span<const Atom> atoms() const noexcept;
        const std::vector<Rational>& exact_probs() const noexcept;

        // StableLattice only.
        const StableLatticeParams* stable() const noexcept;

        double pmf(std::int64_t k) const;
        // P(Y > n) and P(Y < -n)
        double upper_tail(std::int64_t n) const;
        double lower_tail(std::int64_t n) const;

        // nullopt when E|Y| is infinite.
        std::optional<double> mean() const noexcept;
        // +inf when E Y^2 is infinite.
        double variance() const noexcept;
        std::optional<Rational> exact_mean() const;

        // gcd of pairwise support differences (0 for a point mass).
        std::int64_t period() const noexcept;
        std::optional<std::int64_t> min_support() const noexcept;
        std::optional<std::int64_t> max_support() const noexcept;
        bool is_symmetric() const noexcept;

        // Y -> -Y
        IncrementLaw negated() const;
        // Y -> Y + shift (FiniteSupport only)
        IncrementLaw shifted(std::int64_t shift) const;

        std::int64_t sample(Rng& rng) const;

        // Truncated second moment sum_{|k|<=y} k^2 p(k); 0 for y < 1.
        double truncated_variance(std::int64_t y) const;

        // For StableLattice with alpha = 2: the function l with
        // E(Y^2 1{|Y|<=y}) ~ 2 / l(y).
        std::optional<SlowlyVarying> truncated_variance_sv() const;

        // "finite{ -1:1/2, 1:1/2 }" or "stable{ alpha=1.5, beta=0, scale=1 }"
        std::string describe() const;

        struct Data;

    private:
        explicit IncrementLaw(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
        std::shared_ptr<const Data> data_;
    };

    IncrementLaw make_finite_support(const std::vector<std::pair<std::int64_t, double>>& entries);
    IncrementLaw make_stable_lattice(double alpha, double beta, double scale, double log_power = 0.0);

    inline std::int64_t sample(const IncrementLaw& law, Rng& rng) { return law.sample(rng); }
    inline double truncated_variance(const IncrementLaw& law, std::int64_t y) { return law.truncated_variance(y); }

    // sum_{k >= k0} k^-s log(e+k)^g, s > 1, k0 >= 1.
    double power_log_tail_sum(double s, double g, std::int64_t k0);
}
