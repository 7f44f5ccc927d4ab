#include "lindrec/subordinate.hpp"

#include "lindrec/parallel.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lindrec
{
    namespace
    {
        // 16 +-1 steps per entry (bit set = up): net displacement and the
        // maximum over the 16 prefix sums.
        struct StepTable
        {
            std::array<std::int8_t, 65536> displacement{};
            std::array<std::int8_t, 65536> max_prefix{};

            StepTable()
            {
                for (std::uint32_t w = 0; w < 65536; ++w)
                {
                    int s = 0;
                    int best = std::numeric_limits<int>::min();
                    for (int i = 0; i < 16; ++i)
                    {
                        s += (w >> i) & 1U ? 1 : -1;
                        best = std::max(best, s);
                    }
                    displacement[w] = static_cast<std::int8_t>(s);
                    max_prefix[w] = static_cast<std::int8_t>(best);
                }
            }
        };

        const StepTable& step_table()
        {
            static const StepTable table;
            return table;
        }

        // Number of +-1 steps of a simple symmetric walk until it first
        // exceeds 0, or limit + 1 if that takes more than `limit` steps.
        std::int64_t simple_first_passage(Rng& rng, std::int64_t limit)
        {
            const StepTable& t = step_table();
            std::int64_t s = 0;
            std::int64_t steps = 0;
            for (;;)
            {
                std::uint64_t word = rng.next();
                for (int chunk = 0; chunk < 4; ++chunk, word >>= 16)
                {
                    const auto w = static_cast<std::uint32_t>(word & 0xFFFFU);
                    if (steps + 16 <= limit && s + t.max_prefix[w] <= 0)
                    {
                        s += t.displacement[w];
                        steps += 16;
                        continue;
                    }
                    for (int i = 0; i < 16; ++i)
                    {
                        if (steps == limit)
                        {
                            return limit + 1;
                        }
                        s += (w >> i) & 1U ? 1 : -1;
                        ++steps;
                        if (s > 0)
                        {
                            return steps;
                        }
                    }
                }
            }
        }

        std::int64_t binomial_half(std::int64_t n, Rng& rng)
        {
            std::int64_t ones = 0;
            std::int64_t left = n;
            while (left >= 64)
            {
                ones += std::popcount(rng.next());
                left -= 64;
            }
            if (left > 0)
            {
                ones += std::popcount(rng.next() & ((std::uint64_t{1} << left) - 1));
            }
            return ones;
        }
    }

    ZTauSampler::ZTauSampler(IncrementLaw law_s, IncrementLaw law_z, std::int64_t horizon)
        : law_s_(std::move(law_s)), law_z_(std::move(law_z)), horizon_(horizon)
    {
        if (horizon_ < 1)
        {
            throw std::invalid_argument("sample_z_tau: horizon must be >= 1");
        }
        if (classify_drift(law_s_).kind == DriftKind::NegativeDrift)
        {
            throw std::invalid_argument("sample_z_tau: lawS has negative drift, so tau is defective");
        }
        if (!law_z_.is_finite() || *law_z_.exact_mean() != 0)
        {
            throw std::invalid_argument("sample_z_tau: lawZ must have finite range and mean 0");
        }
        if (law_s_.is_finite())
        {
            const auto atoms = law_s_.atoms();
            const auto& p = law_s_.exact_probs();
            if (atoms.size() == 2 && atoms[0].value == -atoms[1].value && p[0] == p[1])
            {
                lazy_step_ = atoms[1].value;
                lazy_move_prob_ = 1.0;
            }
            else if (atoms.size() == 3 && atoms[1].value == 0 && atoms[0].value == -atoms[2].value && p[0] == p[2])
            {
                lazy_step_ = atoms[2].value;
                lazy_move_prob_ = to_double(p[0] + p[2]);
            }
        }
        const auto zatoms = law_z_.atoms();
        if (zatoms.size() == 2 && zatoms[0].value == -zatoms[1].value)
        {
            coin_step_ = zatoms[1].value;
        }
    }

    std::int64_t ZTauSampler::sample_tau(Rng& rng) const
    {
        if (lazy_step_ != 0)
        {
            const std::int64_t moves = simple_first_passage(rng, horizon_);
            if (moves > horizon_)
            {
                return horizon_ + 1;
            }
            if (lazy_move_prob_ >= 1.0)
            {
                return moves;
            }
            std::negative_binomial_distribution<std::int64_t> idle(moves, lazy_move_prob_);
            const std::int64_t tau = moves + idle(rng);
            return tau > horizon_ ? horizon_ + 1 : tau;
        }
        std::int64_t s = 0;
        for (std::int64_t n = 1; n <= horizon_; ++n)
        {
            s += law_s_.sample(rng);
            if (s > 0)
            {
                return n;
            }
        }
        return horizon_ + 1;
    }

    std::int64_t ZTauSampler::sample_z(std::int64_t n, Rng& rng) const
    {
        if (coin_step_ != 0)
        {
            return coin_step_ * (2 * binomial_half(n, rng) - n);
        }
        std::int64_t z = 0;
        for (std::int64_t i = 0; i < n; ++i)
        {
            z += law_z_.sample(rng);
        }
        return z;
    }

    ZTauSample ZTauSampler::operator()(Rng& rng_s, Rng& rng_z) const
    {
        ZTauSample out;
        out.tau = sample_tau(rng_s);
        if (out.tau > horizon_)
        {
            out.censored = true;
            return out;
        }
        out.z = sample_z(out.tau, rng_z);
        return out;
    }

    ZTauSample sample_z_tau(const IncrementLaw& law_s, const IncrementLaw& law_z, std::int64_t horizon, Rng& rng_s,
                            Rng& rng_z)
    {
        return ZTauSampler(law_s, law_z, horizon)(rng_s, rng_z);
    }

    // ---------------------------------------------------------------------

    double tail_constant(double rho, double sigma2)
    {
        if (!(rho > 0.0 && rho < 1.0))
        {
            throw std::invalid_argument("tail_constant: rho must lie in (0, 1)");
        }
        if (!(sigma2 > 0.0))
        {
            throw std::invalid_argument("tail_constant: sigma2 must be positive");
        }
        using boost::math::tgamma;
        return rho * std::pow(2.0 * sigma2, rho) * tgamma(rho + 0.5) /
               (std::sqrt(std::numbers::pi) * tgamma(rho) * tgamma(1.0 - rho));
    }

    double predicted_tail(double x, double rho, double sigma2, const SlowlyVarying& ell)
    {
        const double ax = std::abs(x);
        return tail_constant(rho, sigma2) * std::exp(-(2.0 * rho + 1.0) * std::log(ax) - ell.log_value(ax * ax));
    }

    // ---------------------------------------------------------------------

    std::optional<std::size_t> TailEstimate::find(std::int64_t value) const
    {
        auto it = std::lower_bound(x.begin(), x.end(), value);
        if (it == x.end() || *it != value)
        {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - x.begin());
    }

    TailEstimate tail_from_counts(const std::map<std::int64_t, std::int64_t>& counts, std::int64_t n,
                                  std::int64_t censored, std::int64_t x_min, std::int64_t x_max)
    {
        if (n <= 0)
        {
            throw std::invalid_argument("tail_from_counts: n must be positive");
        }
        TailEstimate est;
        est.n = n;
        est.censored = censored;
        est.censored_fraction = static_cast<double>(censored) / static_cast<double>(n);
        for (std::int64_t v = x_min; v <= x_max; ++v)
        {
            auto it = counts.find(v);
            const double c = it == counts.end() ? 0.0 : static_cast<double>(it->second);
            const double p = c / static_cast<double>(n);
            est.x.push_back(v);
            est.p_hat.push_back(p);
            est.stderr_.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(n)));
        }
        return est;
    }

    TailEstimate tail_from_values(const std::vector<std::int64_t>& x, const std::vector<double>& p)
    {
        if (x.size() != p.size())
        {
            throw std::invalid_argument("tail_from_values: size mismatch");
        }
        TailEstimate est;
        std::vector<std::size_t> order(x.size());
        for (std::size_t i = 0; i < order.size(); ++i)
        {
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
        for (auto i : order)
        {
            est.x.push_back(x[i]);
            est.p_hat.push_back(p[i]);
            est.stderr_.push_back(0.0);
        }
        return est;
    }

    namespace
    {
        // max_y P(Z_n = y); nonincreasing in n, so any n' <= n gives an upper bound.
        double max_point_mass(const IncrementLaw& law_z, std::int64_t n)
        {
            const auto atoms = law_z.atoms();
            if (atoms.size() == 2 && atoms[0].value == -atoms[1].value && atoms[0].prob == atoms[1].prob)
            {
                const double k = std::floor(static_cast<double>(n) / 2.0);
                const double nn = static_cast<double>(n);
                return std::exp(std::lgamma(nn + 1.0) - std::lgamma(k + 1.0) - std::lgamma(nn - k + 1.0) -
                                nn * std::numbers::ln2);
            }
            const std::int64_t m = std::min<std::int64_t>(n, 20000);
            const std::int64_t lo = *law_z.min_support();
            const std::int64_t hi = *law_z.max_support();
            std::vector<double> row{1.0};
            std::int64_t offset = 0; // row[i] is P(Z = i + offset)
            for (std::int64_t k = 0; k < m; ++k)
            {
                std::vector<double> next(row.size() + static_cast<std::size_t>(hi - lo), 0.0);
                for (std::size_t i = 0; i < row.size(); ++i)
                {
                    if (row[i] == 0.0)
                    {
                        continue;
                    }
                    for (const auto& a : atoms)
                    {
                        next[i + static_cast<std::size_t>(a.value - lo)] += row[i] * a.prob;
                    }
                }
                row = std::move(next);
                offset += lo;
            }
            return *std::max_element(row.begin(), row.end());
        }
    }

    TailEstimate estimate_tail(const IncrementLaw& law_s, const IncrementLaw& law_z, std::int64_t replicas,
                               std::int64_t horizon, std::uint64_t master_seed, std::int64_t x_min, std::int64_t x_max,
                               bool fold, unsigned threads)
    {
        if (replicas <= 0 || x_max < x_min)
        {
            throw std::invalid_argument("estimate_tail: need replicas > 0 and x_min <= x_max");
        }
        const ZTauSampler sampler(law_s, law_z, horizon);
        const BlockPlan plan{replicas, 1 << 14};
        const std::size_t width = static_cast<std::size_t>(x_max - x_min + 1);
        std::vector<std::vector<std::int64_t>> block_counts(static_cast<std::size_t>(plan.blocks()));
        std::vector<std::int64_t> block_censored(static_cast<std::size_t>(plan.blocks()), 0);
        parallel_for(plan.blocks(), threads, [&](std::int64_t b) {
            std::vector<std::int64_t> counts(width, 0);
            std::int64_t cens = 0;
            for (std::int64_t r = plan.begin(b); r < plan.end(b); ++r)
            {
                Rng rs(derive_seed(master_seed, stream::primary, static_cast<std::uint64_t>(r)));
                Rng rz(derive_seed(master_seed, stream::secondary, static_cast<std::uint64_t>(r)));
                const ZTauSample s = sampler(rs, rz);
                if (s.censored)
                {
                    ++cens;
                    continue;
                }
                const std::int64_t v = fold ? std::abs(s.z) : s.z;
                if (v >= x_min && v <= x_max)
                {
                    ++counts[static_cast<std::size_t>(v - x_min)];
                }
            }
            block_counts[static_cast<std::size_t>(b)] = std::move(counts);
            block_censored[static_cast<std::size_t>(b)] = cens;
        });
        std::map<std::int64_t, std::int64_t> counts;
        std::int64_t censored = 0;
        for (std::size_t b = 0; b < block_counts.size(); ++b)
        {
            for (std::size_t i = 0; i < width; ++i)
            {
                if (block_counts[b][i] != 0)
                {
                    counts[x_min + static_cast<std::int64_t>(i)] += block_counts[b][i];
                }
            }
            censored += block_censored[b];
        }
        TailEstimate est = tail_from_counts(counts, replicas, censored, x_min, x_max);
        if (censored == 0)
        {
            est.censoring_bias_bound = 0.0;
        }
        else
        {
            // upper confidence value for P(tau > H), times the largest point mass of Z_H
            const double c = static_cast<double>(censored);
            const double p_cens = (c + 3.0 * std::sqrt(c)) / static_cast<double>(replicas);
            est.censoring_bias_bound = (fold ? 2.0 : 1.0) * p_cens * max_point_mass(law_z, horizon);
        }
        return est;
    }

    SlopeFit tail_index_fit(const TailEstimate& est, std::int64_t x_lo, std::int64_t x_hi)
    {
        SlopeFit fit;
        std::vector<double> lx;
        std::vector<double> ly;
        std::vector<double> w;
        bool weighted = false;
        for (std::size_t i = 0; i < est.x.size(); ++i)
        {
            if (est.x[i] < x_lo || est.x[i] > x_hi || est.x[i] <= 0 || !(est.p_hat[i] > 0.0))
            {
                continue;
            }
            const double rel = est.stderr_[i] / est.p_hat[i];
            if (!(rel < 0.2))
            {
                continue;
            }
            lx.push_back(std::log(static_cast<double>(est.x[i])));
            ly.push_back(std::log(est.p_hat[i]));
            if (rel > 0.0)
            {
                weighted = true;
                w.push_back(1.0 / (rel * rel));
            }
            else
            {
                w.push_back(1.0);
            }
        }
        fit.points = lx.size();
        if (fit.points < 10)
        {
            fit.reason = "fewer than 10 points with relative standard error < 20%";
            return fit;
        }
        if (!weighted)
        {
            std::fill(w.begin(), w.end(), 1.0);
        }
        double sw = 0, sx = 0, sy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i)
        {
            sw += w[i];
            sx += w[i] * lx[i];
            sy += w[i] * ly[i];
        }
        const double mx = sx / sw;
        const double my = sy / sw;
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lx.size(); ++i)
        {
            sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
            sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
        }
        fit.slope = sxy / sxx;
        fit.intercept = my - fit.slope * mx;
        if (weighted)
        {
            fit.stderr_ = std::sqrt(1.0 / sxx);
        }
        else
        {
            double rss = 0;
            for (std::size_t i = 0; i < lx.size(); ++i)
            {
                const double r = ly[i] - fit.intercept - fit.slope * lx[i];
                rss += r * r;
            }
            fit.stderr_ = std::sqrt(rss / static_cast<double>(lx.size() - 2) / sxx);
        }
        fit.ci_low = fit.slope - 1.96 * fit.stderr_;
        fit.ci_high = fit.slope + 1.96 * fit.stderr_;
        fit.conclusive = true;
        fit.reason = weighted ? "weighted least squares" : "ordinary least squares on exact values";
        return fit;
    }

    // ---------------------------------------------------------------------

    SlowlyVarying conjugate_sv(const SlowlyVarying& ell, double alpha)
    {
        if (!(alpha > 0.0))
        {
            throw std::invalid_argument("conjugate_sv: alpha must be positive");
        }
        const double c = std::pow(ell.c, -1.0 / alpha) * std::pow(alpha, ell.eta / alpha);
        return SlowlyVarying{c, -ell.eta / alpha};
    }

    const char* to_string(EtaRegime r) noexcept
    {
        switch (r)
        {
        case EtaRegime::RecurrentFiniteMoment:
            return "RecurrentFiniteMoment";
        case EtaRegime::RecurrentInfiniteMoment:
            return "RecurrentInfiniteMoment";
        case EtaRegime::Transient:
            return "Transient";
        }
        return "?";
    }

    EtaRegime eta_regime(double eta) noexcept
    {
        if (eta < -2.0)
        {
            return EtaRegime::RecurrentFiniteMoment;
        }
        if (eta <= 2.0)
        {
            return EtaRegime::RecurrentInfiniteMoment;
        }
        return EtaRegime::Transient;
    }

    // ---------------------------------------------------------------------

    PlateauCheck second_moment_tail_check(const TailEstimate& est, std::int64_t y_lo, std::int64_t y_hi)
    {
        PlateauCheck out;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        double sum = 0.0;
        double min_p = std::numeric_limits<double>::infinity();
        std::size_t count = 0;
        for (std::size_t i = 0; i < est.x.size(); ++i)
        {
            if (est.x[i] < y_lo || est.x[i] > y_hi)
            {
                continue;
            }
            const double y = static_cast<double>(est.x[i]);
            const double v = y * y * est.p_hat[i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            sum += v;
            min_p = std::min(min_p, est.p_hat[i]);
            ++count;
        }
        if (count == 0)
        {
            out.conclusive = false;
            out.reason = "no points in range";
            return out;
        }
        out.plateau = sum / static_cast<double>(count);
        if (!(lo > 0.0))
        {
            out.stabilized = false;
            out.max_min_ratio = std::numeric_limits<double>::infinity();
            out.reason = "y^2 p_hat(y) vanishes somewhere in range";
            return out;
        }
        out.max_min_ratio = hi / lo;
        out.stabilized = out.max_min_ratio < kPlateauRatio;
        const double bias = est.censoring_bias_bound.value_or(est.censored_fraction);
        if (bias > 0.1 * (kPlateauRatio - 1.0) * min_p)
        {
            out.conclusive = false;
            out.reason = "censoring bias bound is too large relative to p_hat in range";
            return out;
        }
        out.reason = out.stabilized ? "flat within the ratio tolerance" : "not flat";
        return out;
    }

    // ---------------------------------------------------------------------

    EllFit fit_ell_from_tau(const std::vector<double>& tau_pmf, double rho, std::int64_t n_lo, std::int64_t n_hi)
    {
        if (!(rho > 0.0 && rho < 1.0))
        {
            throw std::invalid_argument("fit_ell_from_tau: rho must lie in (0, 1)");
        }
        n_hi = std::min<std::int64_t>(n_hi, static_cast<std::int64_t>(tau_pmf.size()) - 1);
        const double k = std::log(rho) - std::lgamma(rho) - std::lgamma(1.0 - rho);
        std::vector<double> u;
        std::vector<double> v;
        for (std::int64_t n = std::max<std::int64_t>(n_lo, 1); n <= n_hi; ++n)
        {
            const double p = tau_pmf[static_cast<std::size_t>(n)];
            if (!(p > 0.0))
            {
                continue;
            }
            const double nd = static_cast<double>(n);
            u.push_back(std::log(std::log(std::numbers::e + nd)));
            v.push_back(k - (rho + 1.0) * std::log(nd) - std::log(p));
        }
        if (u.size() < 2)
        {
            throw std::invalid_argument("fit_ell_from_tau: fewer than two positive pmf values in range");
        }
        const double m = static_cast<double>(u.size());
        double su = 0, sv = 0;
        for (std::size_t i = 0; i < u.size(); ++i)
        {
            su += u[i];
            sv += v[i];
        }
        const double mu = su / m;
        const double mv = sv / m;
        double suu = 0, suv = 0;
        for (std::size_t i = 0; i < u.size(); ++i)
        {
            suu += (u[i] - mu) * (u[i] - mu);
            suv += (u[i] - mu) * (v[i] - mv);
        }
        const double eta = suu > 0.0 ? suv / suu : 0.0;
        const double logc = mv - eta * mu;
        EllFit fit;
        fit.ell = SlowlyVarying{std::exp(logc), eta};
        fit.rho = rho;
        fit.n_lo = n_lo;
        fit.n_hi = n_hi;
        for (std::size_t i = 0; i < u.size(); ++i)
        {
            fit.max_rel_residual = std::max(fit.max_rel_residual, std::abs(std::expm1(v[i] - logc - eta * u[i])));
        }
        return fit;
    }

    ConvolutionOracle z_tau_oracle(const IncrementLaw& law_s, const IncrementLaw& law_z,
                                   const std::vector<std::int64_t>& x, std::int64_t n_trunc, double rho,
                                   std::optional<std::int64_t> horizon)
    {
        if (!law_z.is_finite() || !law_s.is_finite())
        {
            throw std::invalid_argument("z_tau_oracle: both laws must have finite support");
        }
        if (horizon && *horizon < n_trunc)
        {
            throw std::invalid_argument("z_tau_oracle: horizon must be >= n_trunc");
        }
        ConvolutionOracle out;
        out.x = x;
        out.n_trunc = n_trunc;
        out.horizon = horizon;
        out.rho = rho;
        out.sigma2 = law_z.variance();

        const auto tau = exact_ladder_pmf<double>(law_s, LadderKind::StrictAscending, n_trunc);
        if (!tau.complete)
        {
            throw std::length_error("z_tau_oracle: ladder DP exceeded its state budget");
        }
        out.tau_pmf = tau.pmf;
        out.tau_survival = tau.survival;

        const auto atoms = law_z.atoms();
        const std::int64_t lo = *law_z.min_support();
        const std::int64_t hi = *law_z.max_support();
        const std::int64_t reach = std::max(-lo, hi);
        const std::size_t width = static_cast<std::size_t>(2 * reach * n_trunc + 1);
        const std::int64_t center = reach * n_trunc; // index of Z = 0
        std::vector<double> row(width, 0.0);
        std::vector<double> next(width, 0.0);
        row[static_cast<std::size_t>(center)] = 1.0;
        out.truncated.assign(x.size(), 0.0);
        for (std::int64_t n = 1; n <= n_trunc; ++n)
        {
            const std::int64_t span_prev = reach * (n - 1);
            const std::int64_t span = reach * n;
            std::fill(next.begin() + (center - span), next.begin() + (center + span + 1), 0.0);
            for (std::int64_t i = center - span_prev; i <= center + span_prev; ++i)
            {
                const double m = row[static_cast<std::size_t>(i)];
                if (m == 0.0)
                {
                    continue;
                }
                for (const auto& a : atoms)
                {
                    next[static_cast<std::size_t>(i + a.value)] += m * a.prob;
                }
            }
            std::swap(row, next);
            const double pt = tau.pmf[static_cast<std::size_t>(n)];
            if (pt != 0.0)
            {
                for (std::size_t j = 0; j < x.size(); ++j)
                {
                    const std::int64_t idx = center + x[j];
                    if (idx >= 0 && idx < static_cast<std::int64_t>(width))
                    {
                        out.truncated[j] += pt * row[static_cast<std::size_t>(idx)];
                    }
                }
            }
        }
        out.remainder_bound = out.tau_survival * *std::max_element(row.begin(), row.end());

        // A from the last half of the oracle range
        double acc = 0.0;
        std::int64_t cnt = 0;
        for (std::int64_t n = n_trunc / 2; n <= n_trunc; ++n)
        {
            const double p = tau.pmf[static_cast<std::size_t>(n)];
            if (p > 0.0)
            {
                acc += std::pow(static_cast<double>(n), rho + 1.0) * p;
                ++cnt;
            }
        }
        out.tail_amplitude = cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;

        out.asymptotic.assign(x.size(), 0.0);
        out.total.assign(x.size(), 0.0);
        const double shape = rho + 0.5;
        for (std::size_t j = 0; j < x.size(); ++j)
        {
            const double xd = static_cast<double>(x[j]);
            const double a = xd * xd / (2.0 * out.sigma2);
            double piece = 0.0;
            if (a > 0.0)
            {
                const double g_hi = boost::math::tgamma_lower(shape, a / static_cast<double>(n_trunc));
                const double g_lo = horizon ? boost::math::tgamma_lower(shape, a / static_cast<double>(*horizon)) : 0.0;
                piece = out.tail_amplitude / std::sqrt(2.0 * std::numbers::pi * out.sigma2) * std::pow(a, -shape) *
                        (g_hi - g_lo);
            }
            else
            {
                // x = 0: integral of A n^-(rho+3/2) (2 pi s2)^-1/2
                const double nN = static_cast<double>(n_trunc);
                const double upper = horizon ? std::pow(static_cast<double>(*horizon), -shape) : 0.0;
                piece = out.tail_amplitude / std::sqrt(2.0 * std::numbers::pi * out.sigma2) *
                        (std::pow(nN, -shape) - upper) / shape;
            }
            out.asymptotic[j] = piece;
            out.total[j] = out.truncated[j] + piece;
        }
        return out;
    }
}
