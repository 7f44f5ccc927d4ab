#include "lindrec/increments.hpp"

#include "lindrec/detail/discrete_sampler.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lindrec
{
    // ---------------------------------------------------------------------
    // alpha, beta, rho
    // ---------------------------------------------------------------------

    bool in_A(double alpha, double beta) noexcept
    {
        if (!std::isfinite(alpha) || !std::isfinite(beta))
        {
            return false;
        }
        if (alpha > 0.0 && alpha < 1.0)
        {
            return std::abs(beta) < 1.0;
        }
        if (alpha > 1.0 && alpha < 2.0)
        {
            return std::abs(beta) <= 1.0;
        }
        if (alpha == 1.0 || alpha == 2.0)
        {
            return beta == 0.0;
        }
        return false;
    }

    double rho_from(double alpha, double beta)
    {
        if (!in_A(alpha, beta))
        {
            std::ostringstream os;
            os << "rho_from: (alpha=" << alpha << ", beta=" << beta << ") is not admissible";
            throw std::invalid_argument(os.str());
        }
        if (alpha == 1.0 || alpha == 2.0)
        {
            return 0.5;
        }
        const double pi = std::numbers::pi;
        return 0.5 + std::atan(beta * std::tan(pi * alpha / 2.0)) / (pi * alpha);
    }

    double rho_from(const StableParams& params) { return rho_from(params.alpha, params.beta); }

    StableParams StableParams::make(double alpha, double beta)
    {
        return StableParams{alpha, beta, rho_from(alpha, beta)};
    }

    // ---------------------------------------------------------------------
    // Slowly varying functions
    // ---------------------------------------------------------------------

    SlowlyVarying SlowlyVarying::log_power(double c, double eta)
    {
        if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(eta))
        {
            throw std::invalid_argument("SlowlyVarying: scale must be positive and finite");
        }
        return SlowlyVarying{c, eta};
    }

    double SlowlyVarying::log_value(double x) const
    {
        const double lx = x > 1e15 ? std::log(x) + std::log1p(std::numbers::e / x) : std::log(std::numbers::e + x);
        return std::log(c) + eta * std::log(lx);
    }

    double SlowlyVarying::operator()(double x) const { return std::exp(log_value(x)); }

    // ---------------------------------------------------------------------
    // Power-log sums
    // ---------------------------------------------------------------------

    namespace
    {
        double log_factor(double k, double g)
        {
            return g == 0.0 ? 1.0 : std::pow(std::log(std::numbers::e + k), g);
        }

        double power_log_term(double k, double s, double g) { return std::pow(k, -s) * log_factor(k, g); }

        // Integral of x^-s log(e+x)^g over [m, inf).
        double power_log_integral(double s, double g, double m)
        {
            if (g == 0.0)
            {
                return std::pow(m, 1.0 - s) / (s - 1.0);
            }
            boost::math::quadrature::exp_sinh<double> integrator;
            const double log_m = std::log(m);
            auto f = [&](double u) {
                // log(e + m e^u) without overflow
                const double lx = log_m + u + std::log1p(std::numbers::e * std::exp(-u) / m);
                return std::exp((1.0 - s) * u + g * std::log(lx));
            };
            return std::pow(m, 1.0 - s) * integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
        }
    }

    double power_log_tail_sum(double s, double g, std::int64_t k0)
    {
        if (!(s > 1.0))
        {
            throw std::invalid_argument("power_log_tail_sum: exponent must exceed 1");
        }
        if (k0 < 1)
        {
            throw std::invalid_argument("power_log_tail_sum: start must be >= 1");
        }
        constexpr std::int64_t kDirect = 20000;
        const std::int64_t m = std::max<std::int64_t>(k0, kDirect);
        long double direct = 0.0L;
        for (std::int64_t k = m - 1; k >= k0; --k)
        {
            direct += power_log_term(static_cast<double>(k), s, g);
        }
        // Euler-Maclaurin from m: integral + f(m)/2 - f'(m)/12.
        const double md = static_cast<double>(m);
        const double fm = power_log_term(md, s, g);
        const double dlog = -s / md + (g == 0.0 ? 0.0 : g / ((std::numbers::e + md) * std::log(std::numbers::e + md)));
        const double dfm = fm * dlog;
        const double tail = power_log_integral(s, g, md) + fm / 2.0 - dfm / 12.0;
        return static_cast<double>(direct) + tail;
    }

    // ---------------------------------------------------------------------
    // IncrementLaw data
    // ---------------------------------------------------------------------

    struct IncrementLaw::Data
    {
        LawKind kind = LawKind::FiniteSupport;

        // FiniteSupport
        std::vector<Atom> atoms;
        std::vector<Rational> exact;
        std::optional<Rational> exact_mean;

        // StableLattice
        StableLatticeParams stable;
        double tail_mass_side_unit = 0.0; // sum_{k>=3} k^-(1+a) L(k)
        double tail_moment_side_unit = std::numeric_limits<double>::infinity(); // sum k^-a L(k)
        std::int64_t table_radius = 0;
        double upper_beyond_table = 0.0;
        double lower_beyond_table = 0.0;

        // Cached
        std::optional<double> mean;
        double variance = 0.0;
        std::int64_t period = 0;
        bool symmetric = false;

        // Sampler; for StableLattice the last two entries are the tails beyond the table.
        detail::DiscreteSampler sampler;
        std::vector<std::int64_t> sample_values;
    };

    namespace
    {
        constexpr std::int64_t kUpperTailMarker = std::numeric_limits<std::int64_t>::max();
        constexpr std::int64_t kLowerTailMarker = std::numeric_limits<std::int64_t>::min();
        constexpr std::int64_t kStableTableRadius = 1 << 16;
        constexpr double kInt64Headroom = 4.611686018427387904e18; // 2^62

        std::int64_t gcd_of_differences(const std::vector<std::int64_t>& values)
        {
            std::int64_t g = 0;
            for (std::size_t i = 1; i < values.size(); ++i)
            {
                g = std::gcd(g, values[i] - values[0]);
            }
            return g < 0 ? -g : g;
        }

        void finalize_finite(IncrementLaw::Data& d)
        {
            Rational mean = 0;
            Rational second = 0;
            std::vector<double> probs;
            std::vector<std::int64_t> values;
            for (std::size_t i = 0; i < d.atoms.size(); ++i)
            {
                mean += d.exact[i] * d.atoms[i].value;
                second += d.exact[i] * d.atoms[i].value * d.atoms[i].value;
                probs.push_back(d.atoms[i].prob);
                values.push_back(d.atoms[i].value);
            }
            d.exact_mean = mean;
            d.mean = to_double(mean);
            d.variance = to_double(second - mean * mean);
            d.period = gcd_of_differences(values);
            d.symmetric = true;
            std::map<std::int64_t, Rational> table;
            for (std::size_t i = 0; i < d.atoms.size(); ++i)
            {
                table[d.atoms[i].value] = d.exact[i];
            }
            for (const auto& [v, p] : table)
            {
                auto it = table.find(-v);
                if (it == table.end() || it->second != p)
                {
                    d.symmetric = false;
                    break;
                }
            }
            d.sampler = detail::DiscreteSampler(probs);
            d.sample_values = std::move(values);
        }

        double stable_tail_pmf(const IncrementLaw::Data& d, std::int64_t k)
        {
            const auto& sp = d.stable;
            const double c = k > 0 ? sp.c_plus : sp.c_minus;
            if (c == 0.0)
            {
                return 0.0;
            }
            const double ak = std::abs(static_cast<double>(k));
            return sp.kappa * c * power_log_term(ak, 1.0 + sp.stable.alpha, sp.log_power);
        }

        // Draws k >= start with P(k) proportional to k^-(1+a) L(k), by rejection
        // from a discretized Pareto proposal with index a' = a - delta, where
        // delta makes k^-delta L(k) nonincreasing on [start, inf).
        std::int64_t sample_power_tail(Rng& rng, double alpha, double g, std::int64_t start)
        {
            const double K = static_cast<double>(start);
            const double delta = g > 0.0 ? g / std::log(std::numbers::e + K) : 0.0;
            const double a = alpha - delta;
            if (!(a > 0.0))
            {
                throw std::domain_error("stable tail sampler: log correction too strong for the table radius");
            }
            auto log_envelope_ratio = [&](double k) {
                // log of k^-(1+alpha) L(k) / (k^-a - (k+1)^-a)
                const double log_target = -(1.0 + alpha) * std::log(k) + (g == 0.0 ? 0.0 : g * std::log(std::log(std::numbers::e + k)));
                const double log_cell = -a * std::log(k) + std::log(-std::expm1(-a * std::log1p(1.0 / k)));
                return log_target - log_cell;
            };
            const double log_bound = (1.0 + a) * std::log1p(1.0 / K) - delta * std::log(K) +
                                     (g == 0.0 ? 0.0 : g * std::log(std::log(std::numbers::e + K))) - std::log(a);
            for (;;)
            {
                const double u = rng.uniform_open0();
                const double x = K * std::exp(-std::log(u) / a);
                if (!(x < kInt64Headroom))
                {
                    throw std::overflow_error("stable tail sampler: draw exceeds the int64 headroom (2^62)");
                }
                const double k = std::floor(x);
                const double log_accept = log_envelope_ratio(k) - log_bound;
                if (std::log(rng.uniform_open0()) <= log_accept)
                {
                    return static_cast<std::int64_t>(k);
                }
            }
        }
    }

    IncrementLaw IncrementLaw::finite_support(std::vector<std::pair<std::int64_t, Rational>> entries)
    {
        if (entries.empty())
        {
            throw std::invalid_argument("finite_support: at least one atom is required");
        }
        std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        Rational total = 0;
        for (std::size_t i = 0; i < entries.size(); ++i)
        {
            if (entries[i].second <= 0)
            {
                throw std::invalid_argument("finite_support: weight of atom " + std::to_string(entries[i].first) +
                                            " must be positive");
            }
            if (i > 0 && entries[i].first == entries[i - 1].first)
            {
                throw std::invalid_argument("finite_support: duplicate atom " + std::to_string(entries[i].first));
            }
            total += entries[i].second;
        }
        auto d = std::make_shared<Data>();
        d->kind = LawKind::FiniteSupport;
        for (auto& [v, w] : entries)
        {
            Rational p = w / total;
            d->atoms.push_back(Atom{v, to_double(p)});
            d->exact.push_back(std::move(p));
        }
        finalize_finite(*d);
        return IncrementLaw(std::move(d));
    }

    IncrementLaw IncrementLaw::finite_support(const std::vector<std::pair<std::int64_t, double>>& entries)
    {
        std::vector<std::pair<std::int64_t, Rational>> exact;
        exact.reserve(entries.size());
        for (const auto& [v, w] : entries)
        {
            if (!std::isfinite(w))
            {
                throw std::invalid_argument("finite_support: weight must be finite");
            }
            // Shortest round-trip decimal, so 0.2 becomes 1/5 rather than its binary expansion.
            char buf[64];
            const auto res = std::to_chars(buf, buf + sizeof buf, w);
            exact.emplace_back(v, parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf))));
        }
        return finite_support(std::move(exact));
    }

    IncrementLaw IncrementLaw::point_mass(std::int64_t value)
    {
        return finite_support(std::vector<std::pair<std::int64_t, Rational>>{{value, Rational(1)}});
    }

    IncrementLaw IncrementLaw::stable_lattice(double alpha, double beta, double scale, double log_power)
    {
        if (!in_A(alpha, beta))
        {
            std::ostringstream os;
            os << "stable_lattice: (alpha=" << alpha << ", beta=" << beta << ") is not admissible";
            throw std::invalid_argument(os.str());
        }
        if (!(scale > 0.0) || !std::isfinite(scale))
        {
            throw std::invalid_argument("stable_lattice: scale must be positive");
        }
        if (!std::isfinite(log_power))
        {
            throw std::invalid_argument("stable_lattice: log_power must be finite");
        }
        if (scale > 2.0)
        {
            std::ostringstream os;
            os << "stable_lattice: infeasible centering, scale=" << scale
               << " exceeds 2 and would force a negative central mass";
            throw std::invalid_argument(os.str());
        }

        auto d = std::make_shared<Data>();
        d->kind = LawKind::StableLattice;
        auto& sp = d->stable;
        sp.stable = StableParams::make(alpha, beta);
        sp.scale = scale;
        sp.log_power = log_power;
        sp.c_plus = (1.0 + beta) / 2.0;
        sp.c_minus = (1.0 - beta) / 2.0;

        d->tail_mass_side_unit = power_log_tail_sum(1.0 + alpha, log_power, kStableTailStart);
        const bool centered = alpha > 1.0;
        double moment_net = 0.0;
        if (centered)
        {
            d->tail_moment_side_unit = power_log_tail_sum(alpha, log_power, kStableTailStart);
            moment_net = std::abs(beta) * d->tail_moment_side_unit;
        }
        sp.kappa = scale / (2.0 * (d->tail_mass_side_unit + moment_net));

        const double tail_mass = sp.kappa * d->tail_mass_side_unit; // c+ + c- = 1
        const double central_mass = 1.0 - tail_mass;
        const double tail_mean = centered ? sp.kappa * (sp.c_plus - sp.c_minus) * d->tail_moment_side_unit : 0.0;
        // a + b j on j = -2..2: 5a = central_mass, 10b = -tail_mean.
        const double a = central_mass / 5.0;
        const double b = -tail_mean / 10.0;
        sp.central.resize(5);
        for (int j = -2; j <= 2; ++j)
        {
            double q = a + b * j;
            if (q < 0.0)
            {
                if (q > -1e-15)
                {
                    q = 0.0;
                }
                else
                {
                    throw std::invalid_argument("stable_lattice: infeasible centering (negative central mass)");
                }
            }
            sp.central[static_cast<std::size_t>(j + 2)] = q;
        }

        if (centered)
        {
            double mean = 0.0;
            for (int j = -2; j <= 2; ++j)
            {
                mean += j * sp.central[static_cast<std::size_t>(j + 2)];
            }
            d->mean = mean + tail_mean;
        }
        else if (beta == 0.0)
        {
            d->mean = std::nullopt; // E|Y| infinite for alpha <= 1
        }
        d->variance = std::numeric_limits<double>::infinity();
        d->period = 1;
        d->symmetric = beta == 0.0;

        // Sampling table over -R..R plus the two tails beyond.
        const std::int64_t R = kStableTableRadius;
        d->table_radius = R;
        std::vector<double> probs;
        probs.reserve(static_cast<std::size_t>(2 * R + 3));
        d->sample_values.reserve(static_cast<std::size_t>(2 * R + 3));
        for (std::int64_t k = -R; k <= R; ++k)
        {
            const double p = std::abs(k) <= 2 ? sp.central[static_cast<std::size_t>(k + 2)] : stable_tail_pmf(*d, k);
            probs.push_back(p);
            d->sample_values.push_back(k);
        }
        const double beyond = sp.kappa * power_log_tail_sum(1.0 + alpha, log_power, R + 1);
        d->upper_beyond_table = sp.c_plus * beyond;
        d->lower_beyond_table = sp.c_minus * beyond;
        probs.push_back(d->upper_beyond_table);
        d->sample_values.push_back(kUpperTailMarker);
        probs.push_back(d->lower_beyond_table);
        d->sample_values.push_back(kLowerTailMarker);
        d->sampler = detail::DiscreteSampler(probs);
        return IncrementLaw(std::move(d));
    }

    IncrementLaw make_finite_support(const std::vector<std::pair<std::int64_t, double>>& entries)
    {
        return IncrementLaw::finite_support(entries);
    }

    IncrementLaw make_stable_lattice(double alpha, double beta, double scale, double log_power)
    {
        return IncrementLaw::stable_lattice(alpha, beta, scale, log_power);
    }

    // ---------------------------------------------------------------------
    // Queries
    // ---------------------------------------------------------------------

    LawKind IncrementLaw::kind() const noexcept { return data_->kind; }

    std::span<const Atom> IncrementLaw::atoms() const noexcept { return data_->atoms; }

    const std::vector<Rational>& IncrementLaw::exact_probs() const noexcept { return data_->exact; }

    const StableLatticeParams* IncrementLaw::stable() const noexcept
    {
        return data_->kind == LawKind::StableLattice ? &data_->stable : nullptr;
    }

    double IncrementLaw::pmf(std::int64_t k) const
    {
        if (data_->kind == LawKind::FiniteSupport)
        {
            const auto& atoms = data_->atoms;
            auto it = std::lower_bound(atoms.begin(), atoms.end(), k, [](const Atom& a, std::int64_t v) { return a.value < v; });
            return it != atoms.end() && it->value == k ? it->prob : 0.0;
        }
        if (k >= -2 && k <= 2)
        {
            return data_->stable.central[static_cast<std::size_t>(k + 2)];
        }
        return stable_tail_pmf(*data_, k);
    }

    double IncrementLaw::upper_tail(std::int64_t n) const
    {
        if (data_->kind == LawKind::FiniteSupport)
        {
            double s = 0.0;
            for (const auto& a : data_->atoms)
            {
                if (a.value > n)
                {
                    s += a.prob;
                }
            }
            return s;
        }
        const auto& sp = data_->stable;
        double s = 0.0;
        for (std::int64_t k = std::max<std::int64_t>(n + 1, -2); k <= 2; ++k)
        {
            s += sp.central[static_cast<std::size_t>(k + 2)];
        }
        const std::int64_t start = std::max<std::int64_t>(n + 1, kStableTailStart);
        s += sp.kappa * sp.c_plus * power_log_tail_sum(1.0 + sp.stable.alpha, sp.log_power, start);
        if (n < -kStableTailStart)
        {
            // part of the lower tail lies above n
            s += lower_tail(kStableTailStart - 1) - lower_tail(-n - 1);
        }
        return s;
    }

    double IncrementLaw::lower_tail(std::int64_t n) const
    {
        if (data_->kind == LawKind::FiniteSupport)
        {
            double s = 0.0;
            for (const auto& a : data_->atoms)
            {
                if (a.value < -n)
                {
                    s += a.prob;
                }
            }
            return s;
        }
        const auto& sp = data_->stable;
        double s = 0.0;
        for (std::int64_t k = -2; k <= std::min<std::int64_t>(-n - 1, 2); ++k)
        {
            s += sp.central[static_cast<std::size_t>(k + 2)];
        }
        const std::int64_t start = std::max<std::int64_t>(n + 1, kStableTailStart);
        s += sp.kappa * sp.c_minus * power_log_tail_sum(1.0 + sp.stable.alpha, sp.log_power, start);
        if (n < -kStableTailStart)
        {
            s += upper_tail(kStableTailStart - 1) - upper_tail(-n - 1);
        }
        return s;
    }

    std::optional<double> IncrementLaw::mean() const noexcept { return data_->mean; }

    std::optional<Rational> IncrementLaw::exact_mean() const { return data_->exact_mean; }

    double IncrementLaw::variance() const noexcept { return data_->variance; }

    std::int64_t IncrementLaw::period() const noexcept { return data_->period; }

    std::optional<std::int64_t> IncrementLaw::min_support() const noexcept
    {
        if (data_->kind == LawKind::FiniteSupport)
        {
            return data_->atoms.front().value;
        }
        if (data_->stable.c_minus > 0.0)
        {
            return std::nullopt;
        }
        for (int j = -2; j <= 2; ++j)
        {
            if (data_->stable.central[static_cast<std::size_t>(j + 2)] > 0.0)
            {
                return j;
            }
        }
        return kStableTailStart;
    }

    std::optional<std::int64_t> IncrementLaw::max_support() const noexcept
    {
        if (data_->kind == LawKind::FiniteSupport)
        {
            return data_->atoms.back().value;
        }
        if (data_->stable.c_plus > 0.0)
        {
            return std::nullopt;
        }
        for (int j = 2; j >= -2; --j)
        {
            if (data_->stable.central[static_cast<std::size_t>(j + 2)] > 0.0)
            {
                return j;
            }
        }
        return -kStableTailStart;
    }

    bool IncrementLaw::is_symmetric() const noexcept { return data_->symmetric; }

    IncrementLaw IncrementLaw::negated() const
    {
        if (data_->kind == LawKind::StableLattice)
        {
            const auto& sp = data_->stable;
            return stable_lattice(sp.stable.alpha, -sp.stable.beta, sp.scale, sp.log_power);
        }
        std::vector<std::pair<std::int64_t, Rational>> entries;
        for (std::size_t i = 0; i < data_->atoms.size(); ++i)
        {
            entries.emplace_back(-data_->atoms[i].value, data_->exact[i]);
        }
        return finite_support(std::move(entries));
    }

    IncrementLaw IncrementLaw::shifted(std::int64_t shift) const
    {
        if (data_->kind != LawKind::FiniteSupport)
        {
            throw std::invalid_argument("shifted: only finite-support laws can be shifted");
        }
        std::vector<std::pair<std::int64_t, Rational>> entries;
        for (std::size_t i = 0; i < data_->atoms.size(); ++i)
        {
            entries.emplace_back(data_->atoms[i].value + shift, data_->exact[i]);
        }
        return finite_support(std::move(entries));
    }

    std::int64_t IncrementLaw::sample(Rng& rng) const
    {
        const std::int64_t v = data_->sample_values[data_->sampler.draw(rng)];
        if (data_->kind == LawKind::FiniteSupport || (v != kUpperTailMarker && v != kLowerTailMarker))
        {
            return v;
        }
        const auto& sp = data_->stable;
        const std::int64_t k = sample_power_tail(rng, sp.stable.alpha, sp.log_power, data_->table_radius + 1);
        return v == kUpperTailMarker ? k : -k;
    }

    double IncrementLaw::truncated_variance(std::int64_t y) const
    {
        if (y < 1)
        {
            return 0.0;
        }
        long double s = 0.0L;
        if (data_->kind == LawKind::FiniteSupport)
        {
            for (const auto& a : data_->atoms)
            {
                if (a.value <= y && a.value >= -y)
                {
                    s += static_cast<long double>(a.value) * a.value * a.prob;
                }
            }
            return static_cast<double>(s);
        }
        for (std::int64_t k = y; k >= 1; --k)
        {
            s += static_cast<long double>(k) * k * (pmf(k) + pmf(-k));
        }
        return static_cast<double>(s);
    }

    std::optional<SlowlyVarying> IncrementLaw::truncated_variance_sv() const
    {
        const auto* sp = stable();
        if (sp == nullptr || sp->stable.alpha != 2.0 || !(sp->log_power > -1.0))
        {
            return std::nullopt;
        }
        // sum_{|k|<=y} k^2 p(k) ~ kappa log(y)^(g+1) / (g+1)
        const double g1 = sp->log_power + 1.0;
        return SlowlyVarying::log_power(2.0 * g1 / sp->kappa, -g1);
    }

    std::string IncrementLaw::describe() const
    {
        std::ostringstream os;
        if (data_->kind == LawKind::FiniteSupport)
        {
            os << "finite{ ";
            for (std::size_t i = 0; i < data_->atoms.size(); ++i)
            {
                os << (i ? ", " : "") << data_->atoms[i].value << ":" << to_fraction_string(data_->exact[i]);
            }
            os << " }";
            return os.str();
        }
        const auto& sp = data_->stable;
        os.precision(17);
        os << "stable{ alpha=" << sp.stable.alpha << ", beta=" << sp.stable.beta << ", scale=" << sp.scale;
        if (sp.log_power != 0.0)
        {
            os << ", log_power=" << sp.log_power;
        }
        os << " }";
        return os.str();
    }
}
