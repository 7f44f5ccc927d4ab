#pragma once

#include "lindrec/increments.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lindrec
{
    template <class P>
    struct BasicRenewalSeq
    {
        std::vector<P> u; // u_0..u_K
        std::string source;
    };

    using RenewalSeq = BasicRenewalSeq<double>;
    using ExactRenewalSeq = BasicRenewalSeq<Rational>;

    // u_0 = 1, u_k = sum_{n=1}^k P(tau = n) u_{k-n}. tau_pmf[0] is ignored;
    // entries past the end count as 0, so a defective pmf simply terminates.
    // Throws on negative entries or partial mass > 1.
    RenewalSeq renewal_sequence(const std::vector<double>& tau_pmf, std::int64_t K);
    ExactRenewalSeq renewal_sequence(const std::vector<Rational>& tau_pmf, std::int64_t K);

    // Coefficients of U(s) (1 - T(s)) up to degree K; equals (1, 0, ..., 0).
    std::vector<Rational> renewal_identity_coefficients(const ExactRenewalSeq& u, const std::vector<Rational>& tau_pmf);

    // G_K = sum_{k <= K} u1_k u2_k for K = 0..K_max
    std::vector<double> green_partial_sums(const RenewalSeq& u1, const RenewalSeq& u2, std::int64_t K);

    enum class GrowthModel
    {
        Bounded,
        Logarithmic,
        Power,
    };

    const char* to_string(GrowthModel m) noexcept;

    struct GrowthFit
    {
        GrowthModel model = GrowthModel::Logarithmic;
        double slope = 0.0;     // c in G = a + c log K, c in log G = a + c log K, or 0
        double intercept = 0.0;
        double r2 = 0.0;
    };

    inline constexpr double kGrowthR2 = 0.99;

    // Least squares of G_K on log K over K in [K_lo, K_hi].
    GrowthFit fit_log_growth(const std::vector<double>& G, std::int64_t K_lo, std::int64_t K_hi);

    struct GrowthVerdict
    {
        GrowthFit bounded;
        GrowthFit logarithmic;
        GrowthFit power;
        GrowthModel best = GrowthModel::Bounded;
        bool accepted = false; // best fit reaches kGrowthR2
    };

    // Bounded: G_K = a + b / K. Logarithmic: G_K = a + c log K.
    // Power: log G_K = a + c log K. The best model has the largest R^2.
    GrowthVerdict fit_growth_models(const std::vector<double>& G, std::int64_t K_lo, std::int64_t K_hi);

    struct RatioTrajectory
    {
        std::int64_t k_min = 1;
        std::vector<double> ratio;         // ratio[i] at k = k_min + i
        std::vector<double> running_inf;   // inf over [k_min, k]
    };

    // u_k / (k^(rho-1) l(k)) and its running infimum for k >= k_min. Zero
    // entries of u are skipped when `skip_zeros` is set (periodic sequences).
    RatioTrajectory garsia_lamperti_ratio(const RenewalSeq& u, double rho, const SlowlyVarying& ell,
                                          std::int64_t k_min = 1, bool skip_zeros = false);

    // Gamma(rho) Gamma(1-rho) sin(pi rho) / pi
    double garsia_lamperti_constant(double rho);
}
