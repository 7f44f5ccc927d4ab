#include "lindrec/renewal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lindrec
{
    namespace
    {
        template <class P>
        BasicRenewalSeq<P> renewal_impl(const std::vector<P>& tau_pmf, std::int64_t K)
        {
            if (K < 0)
            {
                throw std::invalid_argument("renewal_sequence: K must be >= 0");
            }
            P mass(0);
            for (std::size_t n = 1; n < tau_pmf.size(); ++n)
            {
                if (tau_pmf[n] < 0)
                {
                    throw std::invalid_argument("renewal_sequence: negative pmf entry at n = " + std::to_string(n));
                }
                if (static_cast<std::int64_t>(n) <= K)
                {
                    mass += tau_pmf[n];
                }
            }
            if constexpr (std::is_same_v<P, Rational>)
            {
                if (mass > 1)
                {
                    throw std::invalid_argument("renewal_sequence: pmf mass exceeds 1");
                }
            }
            else
            {
                if (mass > 1.0 + 1e-12)
                {
                    throw std::invalid_argument("renewal_sequence: pmf mass exceeds 1");
                }
            }
            BasicRenewalSeq<P> seq;
            seq.u.assign(static_cast<std::size_t>(K) + 1, P(0));
            seq.u[0] = P(1);
            const std::int64_t top = std::min<std::int64_t>(K, static_cast<std::int64_t>(tau_pmf.size()) - 1);
            for (std::int64_t k = 1; k <= K; ++k)
            {
                P s(0);
                for (std::int64_t n = 1; n <= std::min(k, top); ++n)
                {
                    const P& p = tau_pmf[static_cast<std::size_t>(n)];
                    if (p != 0)
                    {
                        s += p * seq.u[static_cast<std::size_t>(k - n)];
                    }
                }
                if constexpr (!std::is_same_v<P, Rational>)
                {
                    s = std::min(s, 1.0);
                }
                seq.u[static_cast<std::size_t>(k)] = s;
            }
            return seq;
        }

        double r_squared(const std::vector<double>& y, const std::vector<double>& fitted)
        {
            double mean = 0;
            for (double v : y)
            {
                mean += v;
            }
            mean /= static_cast<double>(y.size());
            double ss_tot = 0;
            double ss_res = 0;
            for (std::size_t i = 0; i < y.size(); ++i)
            {
                ss_tot += (y[i] - mean) * (y[i] - mean);
                ss_res += (y[i] - fitted[i]) * (y[i] - fitted[i]);
            }
            return ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
        }

        // y = a + c t
        std::pair<double, double> ols(const std::vector<double>& t, const std::vector<double>& y)
        {
            const double m = static_cast<double>(t.size());
            double st = 0, sy = 0;
            for (std::size_t i = 0; i < t.size(); ++i)
            {
                st += t[i];
                sy += y[i];
            }
            const double mt = st / m, my = sy / m;
            double stt = 0, sty = 0;
            for (std::size_t i = 0; i < t.size(); ++i)
            {
                stt += (t[i] - mt) * (t[i] - mt);
                sty += (t[i] - mt) * (y[i] - my);
            }
            const double c = stt > 0 ? sty / stt : 0.0;
            return {my - c * mt, c};
        }

        void check_range(const std::vector<double>& G, std::int64_t K_lo, std::int64_t K_hi)
        {
            if (K_lo < 1 || K_hi <= K_lo || K_hi >= static_cast<std::int64_t>(G.size()))
            {
                throw std::invalid_argument("growth fit: need 1 <= K_lo < K_hi < G.size()");
            }
        }
    }

    RenewalSeq renewal_sequence(const std::vector<double>& tau_pmf, std::int64_t K)
    {
        return renewal_impl(tau_pmf, K);
    }

    ExactRenewalSeq renewal_sequence(const std::vector<Rational>& tau_pmf, std::int64_t K)
    {
        return renewal_impl(tau_pmf, K);
    }

    std::vector<Rational> renewal_identity_coefficients(const ExactRenewalSeq& u, const std::vector<Rational>& tau_pmf)
    {
        const std::size_t K = u.u.size();
        std::vector<Rational> out(K, Rational(0));
        for (std::size_t k = 0; k < K; ++k)
        {
            Rational c = u.u[k];
            for (std::size_t n = 1; n <= k && n < tau_pmf.size(); ++n)
            {
                c -= tau_pmf[n] * u.u[k - n];
            }
            out[k] = c;
        }
        return out;
    }

    std::vector<double> green_partial_sums(const RenewalSeq& u1, const RenewalSeq& u2, std::int64_t K)
    {
        if (K < 0 || static_cast<std::int64_t>(u1.u.size()) <= K || static_cast<std::int64_t>(u2.u.size()) <= K)
        {
            throw std::invalid_argument("green_partial_sums: both sequences need length > K");
        }
        std::vector<double> G(static_cast<std::size_t>(K) + 1);
        long double acc = 0.0L;
        for (std::int64_t k = 0; k <= K; ++k)
        {
            acc += static_cast<long double>(u1.u[static_cast<std::size_t>(k)]) * u2.u[static_cast<std::size_t>(k)];
            G[static_cast<std::size_t>(k)] = static_cast<double>(acc);
        }
        return G;
    }

    const char* to_string(GrowthModel m) noexcept
    {
        switch (m)
        {
        case GrowthModel::Bounded:
            return "bounded";
        case GrowthModel::Logarithmic:
            return "logarithmic";
        case GrowthModel::Power:
            return "power";
        }
        return "?";
    }

    GrowthFit fit_log_growth(const std::vector<double>& G, std::int64_t K_lo, std::int64_t K_hi)
    {
        check_range(G, K_lo, K_hi);
        std::vector<double> t, y;
        for (std::int64_t K = K_lo; K <= K_hi; ++K)
        {
            t.push_back(std::log(static_cast<double>(K)));
            y.push_back(G[static_cast<std::size_t>(K)]);
        }
        const auto [a, c] = ols(t, y);
        std::vector<double> f(t.size());
        for (std::size_t i = 0; i < t.size(); ++i)
        {
            f[i] = a + c * t[i];
        }
        return GrowthFit{GrowthModel::Logarithmic, c, a, r_squared(y, f)};
    }

    GrowthVerdict fit_growth_models(const std::vector<double>& G, std::int64_t K_lo, std::int64_t K_hi)
    {
        check_range(G, K_lo, K_hi);
        GrowthVerdict v;
        v.logarithmic = fit_log_growth(G, K_lo, K_hi);

        std::vector<double> t, y;
        for (std::int64_t K = K_lo; K <= K_hi; ++K)
        {
            t.push_back(1.0 / static_cast<double>(K));
            y.push_back(G[static_cast<std::size_t>(K)]);
        }
        {
            const auto [a, b] = ols(t, y);
            std::vector<double> f(t.size());
            for (std::size_t i = 0; i < t.size(); ++i)
            {
                f[i] = a + b * t[i];
            }
            v.bounded = GrowthFit{GrowthModel::Bounded, 0.0, a, r_squared(y, f)};
        }
        {
            std::vector<double> lt, ly;
            bool positive = true;
            for (std::int64_t K = K_lo; K <= K_hi; ++K)
            {
                const double g = G[static_cast<std::size_t>(K)];
                positive = positive && g > 0.0;
                lt.push_back(std::log(static_cast<double>(K)));
                ly.push_back(positive ? std::log(g) : 0.0);
            }
            if (positive)
            {
                const auto [a, c] = ols(lt, ly);
                std::vector<double> f(lt.size());
                for (std::size_t i = 0; i < lt.size(); ++i)
                {
                    f[i] = std::exp(a + c * lt[i]);
                }
                v.power = GrowthFit{GrowthModel::Power, c, a, r_squared(y, f)};
            }
            else
            {
                v.power = GrowthFit{GrowthModel::Power, 0.0, 0.0, 0.0};
            }
        }
        v.best = GrowthModel::Bounded;
        double best = v.bounded.r2;
        if (v.logarithmic.r2 > best)
        {
            best = v.logarithmic.r2;
            v.best = GrowthModel::Logarithmic;
        }
        if (v.power.r2 > best)
        {
            best = v.power.r2;
            v.best = GrowthModel::Power;
        }
        v.accepted = best >= kGrowthR2;
        return v;
    }

    RatioTrajectory garsia_lamperti_ratio(const RenewalSeq& u, double rho, const SlowlyVarying& ell,
                                          std::int64_t k_min, bool skip_zeros)
    {
        if (!(rho > 0.0 && rho < 1.0))
        {
            throw std::invalid_argument("garsia_lamperti_ratio: rho must lie in (0, 1)");
        }
        RatioTrajectory out;
        out.k_min = std::max<std::int64_t>(k_min, 1);
        double inf = std::numeric_limits<double>::infinity();
        for (std::int64_t k = out.k_min; k < static_cast<std::int64_t>(u.u.size()); ++k)
        {
            const double uk = u.u[static_cast<std::size_t>(k)];
            const double kd = static_cast<double>(k);
            const double r = uk / std::exp((rho - 1.0) * std::log(kd) + ell.log_value(kd));
            out.ratio.push_back(r);
            if (!(skip_zeros && uk == 0.0))
            {
                inf = std::min(inf, r);
            }
            out.running_inf.push_back(inf);
        }
        return out;
    }

    double garsia_lamperti_constant(double rho)
    {
        return std::exp(std::lgamma(rho) + std::lgamma(1.0 - rho)) * std::sin(std::numbers::pi * rho) / std::numbers::pi;
    }
}
