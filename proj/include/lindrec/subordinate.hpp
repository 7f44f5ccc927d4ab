#pragma once

#include "lindrec/increments.hpp"
#include "lindrec/walk.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace lindrec
{
    // ---------------------------------------------------------------------
    // Z at the first strict ladder epoch of an independent walk S
    // ---------------------------------------------------------------------

    struct ZTauSample
    {
        std::int64_t z = 0;
        std::int64_t tau = 0; // horizon + 1 when censored
        bool censored = false;
    };

    // Runs S (from rng_s) until S_n > 0 or n = horizon, then draws Z_tau as
    // a sum of tau increments of lawZ (from rng_z).
    //
    // Exact specializations are picked automatically: S with law
    // {-a:p, 0:q, a:p} is driven by 16-step lookup tables over random bits
    // plus a negative binomial count of zero steps; Z with law {-b:1/2, b:1/2}
    // is b (2 Bin(tau, 1/2) - tau) with the binomial taken from popcounts.
    class ZTauSampler
    {
    public:
        ZTauSampler(IncrementLaw law_s, IncrementLaw law_z, std::int64_t horizon);

        ZTauSample operator()(Rng& rng_s, Rng& rng_z) const;

        bool fast_s() const noexcept { return lazy_step_ != 0; }
        bool fast_z() const noexcept { return coin_step_ != 0; }
        std::int64_t horizon() const noexcept { return horizon_; }

    private:
        std::int64_t sample_tau(Rng& rng) const;
        std::int64_t sample_z(std::int64_t n, Rng& rng) const;

        IncrementLaw law_s_;
        IncrementLaw law_z_;
        std::int64_t horizon_;
        std::int64_t lazy_step_ = 0;  // a for {-a:p, 0:q, a:p}
        double lazy_move_prob_ = 1.0; // 2p
        std::int64_t coin_step_ = 0;  // b for {-b:1/2, b:1/2}
    };

    // Preconditions: lawS not NegativeDrift, lawZ finite support with mean 0.
    ZTauSample sample_z_tau(const IncrementLaw& law_s, const IncrementLaw& law_z, std::int64_t horizon, Rng& rng_s,
                            Rng& rng_z);

    // ---------------------------------------------------------------------
    // Predicted tail
    // ---------------------------------------------------------------------

    // C(rho) = rho (2 sigma2)^rho Gamma(rho + 1/2) / (sqrt(pi) Gamma(rho) Gamma(1 - rho))
    double tail_constant(double rho, double sigma2);

    // C(rho) x^-(2 rho + 1) / l(x^2)
    double predicted_tail(double x, double rho, double sigma2, const SlowlyVarying& ell);

    // ---------------------------------------------------------------------
    // Empirical tails and slope fits
    // ---------------------------------------------------------------------

    struct TailEstimate
    {
        std::vector<std::int64_t> x;
        std::vector<double> p_hat;
        std::vector<double> stderr_;
        std::int64_t n = 0; // replicas, censored included
        std::int64_t censored = 0;
        double censored_fraction = 0.0;
        // Upper bound on |E p_hat(x) - P(Z_tau = x)| from censoring; nullopt if unknown.
        std::optional<double> censoring_bias_bound;

        std::optional<std::size_t> find(std::int64_t value) const;
    };

    // counts[x] over n replicas (censored ones included in n).
    TailEstimate tail_from_counts(const std::map<std::int64_t, std::int64_t>& counts, std::int64_t n,
                                  std::int64_t censored, std::int64_t x_min, std::int64_t x_max);

    // Exact values (stderr 0), e.g. oracle pmfs or synthetic laws.
    TailEstimate tail_from_values(const std::vector<std::int64_t>& x, const std::vector<double>& p);

    // Monte Carlo: replicas of sample_z_tau with seeds (master, stream, replica).
    // Counts are recorded for |z| in [x_min, x_max], folding z -> |z| when fold is set.
    TailEstimate estimate_tail(const IncrementLaw& law_s, const IncrementLaw& law_z, std::int64_t replicas,
                               std::int64_t horizon, std::uint64_t master_seed, std::int64_t x_min, std::int64_t x_max,
                               bool fold = false, unsigned threads = 0);

    struct SlopeFit
    {
        double slope = 0.0;
        double intercept = 0.0;
        double stderr_ = 0.0;
        double ci_low = 0.0;
        double ci_high = 0.0;
        std::size_t points = 0;
        bool conclusive = false;
        std::string reason;
    };

    // Weighted least squares of log p_hat on log x over [x_lo, x_hi] with
    // weights (p_hat / stderr)^2; ordinary least squares if all stderr are 0.
    // Needs 10 points with p_hat > 0 and relative standard error < 20%.
    SlopeFit tail_index_fit(const TailEstimate& est, std::int64_t x_lo, std::int64_t x_hi);

    // ---------------------------------------------------------------------
    // alpha-conjugates and the log^eta regimes
    // ---------------------------------------------------------------------

    // For l = c log(e+x)^eta: c^(-1/alpha) alpha^(eta/alpha) log(e+x)^(-eta/alpha).
    SlowlyVarying conjugate_sv(const SlowlyVarying& ell, double alpha);

    enum class EtaRegime
    {
        RecurrentFiniteMoment,
        RecurrentInfiniteMoment,
        Transient,
    };

    const char* to_string(EtaRegime r) noexcept;

    EtaRegime eta_regime(double eta) noexcept;

    // ---------------------------------------------------------------------
    // Plateau check for finite-variance S
    // ---------------------------------------------------------------------

    struct PlateauCheck
    {
        bool stabilized = false;
        bool conclusive = true;
        double plateau = 0.0;   // mean of y^2 p_hat(y) over the range
        double max_min_ratio = 0.0;
        std::string reason;
    };

    inline constexpr double kPlateauRatio = 1.3;

    // Flat iff max/min of y^2 p_hat(y) over [y_lo, y_hi] < 1.3 with every
    // p_hat > 0. Inconclusive if the censoring bias bound exceeds 1/10 of
    // the ratio tolerance relative to some p_hat in range.
    PlateauCheck second_moment_tail_check(const TailEstimate& est, std::int64_t y_lo, std::int64_t y_hi);

    // ---------------------------------------------------------------------
    // Convolution oracle
    // ---------------------------------------------------------------------

    // Fitted slowly varying factor of the ladder epoch law:
    //   l_hat(n) = rho / (Gamma(rho) Gamma(1-rho) n^(rho+1) P(tau = n)),
    // smoothed by least squares of log l_hat on log log(e+n) (zeros skipped).
    struct EllFit
    {
        SlowlyVarying ell;
        double rho = 0.5;
        std::int64_t n_lo = 0;
        std::int64_t n_hi = 0;
        double max_rel_residual = 0.0;
    };

    EllFit fit_ell_from_tau(const std::vector<double>& tau_pmf, double rho, std::int64_t n_lo, std::int64_t n_hi);

    struct ConvolutionOracle
    {
        std::vector<std::int64_t> x;
        std::vector<double> truncated;  // sum_{n <= N} P(tau = n) P(Z_n = x)
        std::vector<double> asymptotic; // continuous approximation of sum_{N < n <= H}
        std::vector<double> total;      // truncated + asymptotic
        std::int64_t n_trunc = 0;
        std::optional<std::int64_t> horizon; // H, nullopt for infinity
        double tau_survival = 0.0;     // P(tau > N)
        double remainder_bound = 0.0;  // P(tau > N) max_y P(Z_N = y), rigorous
        double tail_amplitude = 0.0;   // A in P(tau = n) ~ A n^-(rho+1)
        double rho = 0.5;
        double sigma2 = 0.0;
        std::vector<double> tau_pmf;
    };

    // P(tau = n) by exact_ladder_pmf<double>, P(Z_n = x) by full convolution
    // (no truncation of the support). The asymptotic piece uses
    //   A (2 pi s2)^-1/2 a^-(rho+1/2) [gamma(rho+1/2, a/N) - gamma(rho+1/2, a/H)],
    // a = x^2 / (2 s2), which assumes aperiodic tau.
    ConvolutionOracle z_tau_oracle(const IncrementLaw& law_s, const IncrementLaw& law_z,
                                   const std::vector<std::int64_t>& x, std::int64_t n_trunc, double rho,
                                   std::optional<std::int64_t> horizon = std::nullopt);
}
