#include "lindrec/runner.hpp"

#include "lindrec/experiments.hpp"
#include "lindrec/parallel.hpp"
#include "lindrec/renewal.hpp"
#include "lindrec/subordinate.hpp"
#include "lindrec/walk.hpp"

#include <boost/version.hpp>
#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lindrec
{
    using nlohmann::json;

    namespace
    {
        std::string num(double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        std::string hex(std::uint64_t v)
        {
            char buf[20];
            std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
            return buf;
        }

        IncrementLaw finite(std::vector<std::pair<std::int64_t, Rational>> e)
        {
            return IncrementLaw::finite_support(std::move(e));
        }

        IncrementLaw simple_symmetric()
        {
            return finite({{-1, Rational(1, 2)}, {1, Rational(1, 2)}});
        }

        IncrementLaw lazy_symmetric()
        {
            return finite({{-1, Rational(3, 10)}, {0, Rational(2, 5)}, {1, Rational(3, 10)}});
        }

        VectorLaw example_positive_joint()
        {
            return VectorLaw::joint(std::vector<std::pair<Vec, Rational>>{{{-1, 1}, Rational(1, 4)},
                                                                         {{-1, 2}, Rational(1, 4)},
                                                                         {{1, -1}, Rational(1, 4)},
                                                                         {{2, -1}, Rational(1, 4)}});
        }

        // Fills the laws each experiment reads when the config leaves them out.
        ExperimentConfig resolve_defaults(ExperimentConfig cfg)
        {
            switch (cfg.kind)
            {
            case ExperimentKind::Simulate:
            case ExperimentKind::Ladder:
            case ExperimentKind::MaxDist:
                if (!cfg.law)
                {
                    cfg.law = simple_symmetric();
                }
                break;
            case ExperimentKind::Subordinate:
                if (!cfg.law_s)
                {
                    cfg.law_s = lazy_symmetric();
                }
                if (!cfg.law_z)
                {
                    cfg.law_z = simple_symmetric();
                }
                break;
            case ExperimentKind::Renewal:
                if (!cfg.law1)
                {
                    cfg.law1 = lazy_symmetric();
                }
                if (!cfg.law2)
                {
                    cfg.law2 = finite({{-1, Rational(1, 4)}, {0, Rational(1, 2)}, {1, Rational(1, 4)}});
                }
                break;
            case ExperimentKind::Backward:
            case ExperimentKind::Classify:
            case ExperimentKind::Essential:
                if (!cfg.law && !(cfg.law1 && cfg.law2))
                {
                    cfg.law = example_positive_joint();
                }
                break;
            }
            return cfg;
        }

        const IncrementLaw& scalar_law(const ExperimentConfig& cfg)
        {
            if (!std::holds_alternative<IncrementLaw>(*cfg.law))
            {
                throw ConfigError(0, std::string(to_string(cfg.kind)) + ": law must be one-dimensional");
            }
            return std::get<IncrementLaw>(*cfg.law);
        }

        const IncrementLaw& finite_scalar_law(const ExperimentConfig& cfg)
        {
            const IncrementLaw& l = scalar_law(cfg);
            if (!l.is_finite())
            {
                throw ConfigError(0, std::string(to_string(cfg.kind)) + ": exact oracles need a finite law");
            }
            return l;
        }

        VectorLaw vector_law(const ExperimentConfig& cfg)
        {
            if (cfg.law)
            {
                if (std::holds_alternative<VectorLaw>(*cfg.law))
                {
                    return std::get<VectorLaw>(*cfg.law);
                }
                if (!(cfg.law1 && cfg.law2))
                {
                    throw ConfigError(0, std::string(to_string(cfg.kind)) +
                                             ": law must be joint{...} or product{...}, or give law1 and law2");
                }
            }
            return VectorLaw::product({*cfg.law1, *cfg.law2});
        }

        std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows)
        {
            std::string out;
            for (std::size_t i = 0; i < header.size(); ++i)
            {
                out += (i ? "," : "") + header[i];
            }
            out += '\n';
            for (const auto& r : rows)
            {
                for (std::size_t i = 0; i < r.size(); ++i)
                {
                    out += (i ? "," : "") + r[i];
                }
                out += '\n';
            }
            return out;
        }

        std::string dump(const json& j)
        {
            return j.dump(2) + "\n";
        }

        // -----------------------------------------------------------------

        std::string run_simulate(const ExperimentConfig& cfg, RunResult& res)
        {
            const IncrementLaw& law = scalar_law(cfg);
            std::vector<WalkPath> paths(static_cast<std::size_t>(cfg.replicas));
            parallel_for(cfg.replicas, cfg.threads, [&](std::int64_t r) {
                Rng rng(derive_seed(*cfg.seed, stream::primary, static_cast<std::uint64_t>(r)));
                paths[static_cast<std::size_t>(r)] = simulate_path(law, cfg.horizon, rng);
            });
            std::int64_t returns = 0;
            if (cfg.format == OutputFormat::Csv)
            {
                std::vector<std::vector<std::string>> rows;
                for (std::int64_t r = 0; r < cfg.replicas; ++r)
                {
                    const auto& p = paths[static_cast<std::size_t>(r)];
                    std::int64_t w = 0;
                    for (std::int64_t n = 1; n <= p.length(); ++n)
                    {
                        const auto y = p.increments[static_cast<std::size_t>(n - 1)];
                        w = lindley_step(w, y);
                        returns += w == 0;
                        rows.push_back({std::to_string(r), std::to_string(n), std::to_string(y),
                                        std::to_string(p.sums[static_cast<std::size_t>(n)]), std::to_string(w)});
                    }
                }
                res.summary = "simulated " + std::to_string(cfg.replicas) + " paths, " + std::to_string(returns) +
                              " returns of W to 0";
                return csv({"replica", "n", "y", "s", "w"}, rows);
            }
            json j;
            j["law"] = law.describe();
            j["paths"] = json::array();
            for (std::int64_t r = 0; r < cfg.replicas; ++r)
            {
                const auto& p = paths[static_cast<std::size_t>(r)];
                std::vector<std::int64_t> w(p.increments.size());
                std::int64_t cur = 0;
                for (std::size_t i = 0; i < p.increments.size(); ++i)
                {
                    cur = lindley_step(cur, p.increments[i]);
                    w[i] = cur;
                    returns += cur == 0;
                }
                j["paths"].push_back({{"replica", r}, {"seed", p.seed}, {"y", p.increments}, {"w", w}});
            }
            res.summary = "simulated " + std::to_string(cfg.replicas) + " paths, " + std::to_string(returns) +
                          " returns of W to 0";
            return dump(j);
        }

        std::string run_ladder(const ExperimentConfig& cfg, RunResult& res)
        {
            const IncrementLaw& law = finite_scalar_law(cfg);
            std::vector<std::string> p, exact;
            std::string survival;
            std::int64_t reached = 0;
            bool complete = false;
            if (cfg.rational)
            {
                const auto lp = exact_ladder_pmf<Rational>(law, cfg.ladder, cfg.horizon);
                for (const auto& q : lp.pmf)
                {
                    p.push_back(num(to_double(q)));
                    exact.push_back(to_fraction_string(q));
                }
                survival = to_fraction_string(lp.survival);
                reached = lp.n_reached;
                complete = lp.complete;
            }
            else
            {
                const auto lp = exact_ladder_pmf<double>(law, cfg.ladder, cfg.horizon);
                for (double q : lp.pmf)
                {
                    p.push_back(num(q));
                }
                survival = num(lp.survival);
                reached = lp.n_reached;
                complete = lp.complete;
            }
            res.summary = std::string(cfg.ladder == LadderKind::StrictAscending ? "strict" : "weak") +
                          " ladder pmf up to n = " + std::to_string(reached) + ", P(tau > n) = " + survival;
            if (cfg.format == OutputFormat::Csv)
            {
                std::vector<std::vector<std::string>> rows;
                for (std::size_t n = 1; n < p.size(); ++n)
                {
                    std::vector<std::string> row = {std::to_string(n), p[n]};
                    if (cfg.rational)
                    {
                        row.push_back(exact[n]);
                    }
                    rows.push_back(std::move(row));
                }
                return cfg.rational ? csv({"n", "pmf", "exact"}, rows) : csv({"n", "pmf"}, rows);
            }
            json j;
            j["law"] = law.describe();
            j["kind"] = cfg.ladder == LadderKind::StrictAscending ? "strict" : "weak";
            j["n_reached"] = reached;
            j["complete"] = complete;
            j["survival"] = survival;
            j["pmf"] = p;
            if (cfg.rational)
            {
                j["exact"] = exact;
            }
            return dump(j);
        }

        std::string run_maxdist(const ExperimentConfig& cfg, RunResult& res)
        {
            const IncrementLaw& law = finite_scalar_law(cfg);
            const VectorLaw one = VectorLaw::product({law});
            std::vector<std::vector<std::string>> cols(3);
            const std::int64_t n = cfg.horizon;
            auto fill = [&](auto tag) {
                using P = decltype(tag);
                const auto mx = exact_max_pmf<P>(law, n);
                const auto mneg = exact_max_pmf<P>(law.negated(), n);
                const auto wl = exact_lindley_pmf<P>(one, Vec{0}, n);
                std::size_t top = std::max(mx.pmf.size(), mneg.pmf.size());
                for (const auto& [w, q] : wl)
                {
                    top = std::max(top, static_cast<std::size_t>(w[0]) + 1);
                }
                auto str = [](const P& q) {
                    if constexpr (std::is_same_v<P, Rational>)
                    {
                        return to_fraction_string(q);
                    }
                    else
                    {
                        return num(q);
                    }
                };
                for (std::size_t m = 0; m < top; ++m)
                {
                    cols[0].push_back(str(m < mx.pmf.size() ? mx.pmf[m] : P(0)));
                    cols[1].push_back(str(m < mneg.pmf.size() ? mneg.pmf[m] : P(0)));
                    const auto it = wl.find(Vec{static_cast<std::int64_t>(m)});
                    cols[2].push_back(str(it == wl.end() ? P(0) : it->second));
                }
            };
            if (cfg.rational)
            {
                fill(Rational(0));
            }
            else
            {
                fill(0.0);
            }
            bool dual = cols[1] == cols[2];
            res.summary = "M_n law of -S " + std::string(dual ? "matches" : "differs from") + " the law of W_n at n = " +
                          std::to_string(n);
            if (cfg.format == OutputFormat::Csv)
            {
                std::vector<std::vector<std::string>> rows;
                for (std::size_t m = 0; m < cols[0].size(); ++m)
                {
                    rows.push_back({std::to_string(m), cols[0][m], cols[1][m], cols[2][m]});
                }
                return csv({"m", "p_max", "p_max_negated", "p_lindley"}, rows);
            }
            json j;
            j["law"] = law.describe();
            j["n"] = n;
            j["p_max"] = cols[0];
            j["p_max_negated"] = cols[1];
            j["p_lindley"] = cols[2];
            return dump(j);
        }

        std::string run_subordinate(const ExperimentConfig& cfg, RunResult& res)
        {
            const IncrementLaw& ls = *cfg.law_s;
            const IncrementLaw& lz = *cfg.law_z;
            const TailEstimate est = estimate_tail(ls, lz, cfg.replicas, cfg.horizon, *cfg.seed, cfg.x_min, cfg.x_max,
                                                   cfg.fold, cfg.threads);
            const CoordinateFacts facts = coordinate_facts(ls, CoordinateRole::Lindley);
            std::optional<ConvolutionOracle> oracle;
            std::optional<EllFit> ell;
            if (cfg.oracle_n > 0 && ls.is_finite() && facts.rho)
            {
                std::vector<std::int64_t> xs;
                for (std::int64_t x = cfg.x_min; x <= cfg.x_max; ++x)
                {
                    xs.push_back(x);
                }
                oracle = z_tau_oracle(ls, lz, xs, cfg.oracle_n, *facts.rho, cfg.horizon);
                ell = fit_ell_from_tau(oracle->tau_pmf, *facts.rho, std::max<std::int64_t>(cfg.oracle_n / 20, 10),
                                       cfg.oracle_n);
            }
            const double fold_factor = cfg.fold ? 2.0 : 1.0;
            const SlopeFit fit = tail_index_fit(est, std::max<std::int64_t>(cfg.x_min, 1), cfg.x_max);
            res.summary = "tail fit slope " + num(fit.slope) + (fit.conclusive ? "" : " (inconclusive: " + fit.reason + ")");
            std::vector<std::vector<std::string>> rows;
            json jr = json::array();
            for (std::size_t i = 0; i < est.x.size(); ++i)
            {
                const auto x = est.x[i];
                std::vector<std::string> row = {std::to_string(x), num(est.p_hat[i]), num(est.stderr_[i])};
                json o = {{"x", x}, {"p_hat", est.p_hat[i]}, {"stderr", est.stderr_[i]}};
                if (oracle)
                {
                    const double f = x == 0 ? 1.0 : fold_factor;
                    const auto k = static_cast<std::size_t>(x - cfg.x_min);
                    const double pred = x == 0 ? 0.0
                                               : f * predicted_tail(static_cast<double>(x), *facts.rho, lz.variance(),
                                                                    ell->ell);
                    row.push_back(num(f * oracle->total[k]));
                    row.push_back(num(pred));
                    o["oracle"] = f * oracle->total[k];
                    o["predicted"] = pred;
                }
                rows.push_back(std::move(row));
                jr.push_back(std::move(o));
            }
            if (cfg.format == OutputFormat::Csv)
            {
                return oracle ? csv({"x", "p_hat", "stderr", "oracle", "predicted"}, rows)
                              : csv({"x", "p_hat", "stderr"}, rows);
            }
            json j;
            j["law_s"] = ls.describe();
            j["law_z"] = lz.describe();
            j["replicas"] = est.n;
            j["censored"] = est.censored;
            j["censored_fraction"] = est.censored_fraction;
            j["censoring_bias_bound"] = est.censoring_bias_bound ? json(*est.censoring_bias_bound) : json(nullptr);
            j["fold"] = cfg.fold;
            j["slope"] = {{"value", fit.slope}, {"stderr", fit.stderr_}, {"ci", {fit.ci_low, fit.ci_high}},
                          {"points", fit.points}, {"conclusive", fit.conclusive}, {"reason", fit.reason}};
            if (ell)
            {
                j["ell_fit"] = {{"c", ell->ell.c}, {"eta", ell->ell.eta}, {"rho", ell->rho}};
                j["oracle_n"] = oracle->n_trunc;
                j["oracle_remainder_bound"] = oracle->remainder_bound;
            }
            j["rows"] = jr;
            if (!fit.conclusive)
            {
                res.status = RunStatus::Inconclusive;
            }
            return dump(j);
        }

        std::string run_renewal(const ExperimentConfig& cfg, RunResult& res)
        {
            const std::int64_t K = cfg.horizon;
            std::array<RenewalSeq, 2> u;
            std::array<const IncrementLaw*, 2> laws = {&*cfg.law1, &*cfg.law2};
            for (std::size_t i = 0; i < 2; ++i)
            {
                if (!laws[i]->is_finite())
                {
                    throw ConfigError(0, "renewal: law1 and law2 must be finite{...}");
                }
                const auto pmf = exact_ladder_pmf<double>(*laws[i], LadderKind::StrictAscending, K);
                u[i] = renewal_sequence(pmf.pmf, K);
                u[i].source = laws[i]->describe();
            }
            const auto G = green_partial_sums(u[0], u[1], K);
            std::optional<GrowthVerdict> gv;
            if (K > 200)
            {
                gv = fit_growth_models(G, 100, K);
                res.summary = "Green partial sums: best fit " + std::string(to_string(gv->best)) + ", log slope " +
                              num(gv->logarithmic.slope) + ", R^2 " + num(gv->logarithmic.r2);
            }
            else
            {
                res.summary = "G_K = " + num(G.back()) + " at K = " + std::to_string(K);
            }
            if (cfg.format == OutputFormat::Csv)
            {
                std::vector<std::vector<std::string>> rows;
                for (std::int64_t k = 0; k <= K; ++k)
                {
                    const auto i = static_cast<std::size_t>(k);
                    rows.push_back({std::to_string(k), num(u[0].u[i]), num(u[1].u[i]), num(u[0].u[i] * u[1].u[i]),
                                    num(G[i])});
                }
                return csv({"k", "u1", "u2", "product", "partial_sum"}, rows);
            }
            json j;
            j["law1"] = u[0].source;
            j["law2"] = u[1].source;
            j["K"] = K;
            j["u1"] = u[0].u;
            j["u2"] = u[1].u;
            j["partial_sum"] = G;
            if (gv)
            {
                auto fitj = [](const GrowthFit& f) {
                    return json{{"model", to_string(f.model)}, {"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
                };
                j["growth"] = {{"bounded", fitj(gv->bounded)}, {"logarithmic", fitj(gv->logarithmic)},
                               {"power", fitj(gv->power)}, {"best", to_string(gv->best)}, {"accepted", gv->accepted}};
            }
            return dump(j);
        }

        std::string run_backward(const ExperimentConfig& cfg, RunResult& res)
        {
            const VectorLaw law = vector_law(cfg);
            const std::size_t d = law.dim();
            const std::vector<Vec> starts = {Vec(d, 0), Vec(d, cfg.start_level)};
            std::vector<BackwardResult> runs(static_cast<std::size_t>(cfg.replicas));
            parallel_for(cfg.replicas, cfg.threads, [&](std::int64_t r) {
                Rng rng(derive_seed(*cfg.seed, stream::primary, static_cast<std::uint64_t>(r)));
                runs[static_cast<std::size_t>(r)] = backward_iterate(law, starts, cfg.backward_steps, rng);
            });
            std::int64_t coalesced = 0;
            for (const auto& r : runs)
            {
                coalesced += !r.censored;
            }
            std::optional<BackwardComparison> cmp;
            if (cfg.forward_n > 0)
            {
                cmp = compare_backward_forward(law, cfg.replicas, cfg.backward_steps, cfg.start_level, cfg.forward_n,
                                               cfg.bound, *cfg.seed, cfg.threads);
            }
            res.summary = "coalesced in " + std::to_string(coalesced) + " of " + std::to_string(cfg.replicas) + " runs";
            if (cmp)
            {
                res.summary += ", total variation to forward law " + num(cmp->total_variation);
            }
            if (cfg.format == OutputFormat::Csv)
            {
                std::vector<std::string> header = {"run", "coalesced_at"};
                for (std::size_t i = 0; i < d; ++i)
                {
                    header.push_back("u" + std::to_string(i + 1));
                }
                std::vector<std::vector<std::string>> rows;
                for (std::int64_t r = 0; r < cfg.replicas; ++r)
                {
                    const auto& b = runs[static_cast<std::size_t>(r)];
                    std::vector<std::string> row = {std::to_string(r), b.censored ? "" : std::to_string(*b.coalesced_at)};
                    for (std::size_t i = 0; i < d; ++i)
                    {
                        row.push_back(b.censored ? "" : std::to_string(b.value[i]));
                    }
                    rows.push_back(std::move(row));
                }
                return csv(header, rows);
            }
            json j;
            j["law"] = law.describe();
            j["runs"] = cfg.replicas;
            j["coalesced"] = coalesced;
            j["max_steps"] = cfg.backward_steps;
            j["start_level"] = cfg.start_level;
            json values = json::array();
            for (const auto& b : runs)
            {
                values.push_back(b.censored ? json(nullptr) : json{{"at", *b.coalesced_at}, {"value", b.value}});
            }
            j["values"] = values;
            if (cmp)
            {
                j["forward"] = {{"n", cmp->forward_n}, {"bound", cmp->bound}, {"overflow", cmp->forward_overflow},
                                {"total_variation", cmp->total_variation}, {"outside_bound", cmp->outside_bound}};
            }
            return dump(j);
        }

        json facts_json(const CoordinateFacts& f)
        {
            return {{"role", to_string(f.role)},
                    {"drift", to_string(f.drift.kind)},
                    {"drift_reason", f.drift.reason},
                    {"rho", f.rho ? json(*f.rho) : json(nullptr)},
                    {"finite_variance", f.finite_variance},
                    {"centered", f.centered},
                    {"symmetric", f.symmetric},
                    {"finite_range", f.finite_range},
                    {"degenerate", f.degenerate}};
        }

        std::string run_classify(const ExperimentConfig& cfg, RunResult& res)
        {
            const VectorLaw law = vector_law(cfg);
            if (law.dim() != 2)
            {
                throw ConfigError(0, "classify: law must be two-dimensional");
            }
            EvidenceOptions opts;
            opts.replicas = cfg.replicas;
            opts.horizon = cfg.horizon;
            opts.seed = *cfg.seed;
            opts.recurrence_growth = cfg.recurrence_growth;
            opts.transience_growth = cfg.transience_growth;
            opts.backward_runs = cfg.backward_runs;
            opts.backward_steps = cfg.backward_steps;
            opts.green_K = cfg.green_K;
            opts.threads = cfg.threads;
            const Verdict v = classify_2d(law, cfg.roles, opts);

            res.summary = std::string("class ") + to_string(v.predicted) +
                          (v.criterion ? std::string(" by ") + to_string(*v.criterion) : "") + ", evidence " +
                          to_string(v.consistency);
            if (v.predicted == PredictedClass::OutsideTheory || v.consistency == Consistency::Inconclusive)
            {
                res.status = RunStatus::Inconclusive;
            }

            json j;
            j["law"] = law.describe();
            j["roles"] = {to_string(cfg.roles[0]), to_string(cfg.roles[1])};
            j["independent"] = v.independent;
            j["class"] = to_string(v.predicted);
            j["criterion"] = v.criterion ? json(to_string(*v.criterion)) : json(nullptr);
            json fired = json::array();
            for (auto c : v.fired)
            {
                fired.push_back(to_string(c));
            }
            j["fired"] = fired;
            j["reasons"] = v.reasons;
            j["coordinates"] = {facts_json(v.facts[0]), facts_json(v.facts[1])};
            const Evidence& e = v.evidence;
            json ev;
            ev["replicas"] = e.replicas;
            ev["horizon"] = e.horizon;
            ev["returns_h"] = e.returns_h;
            ev["returns_2h"] = e.returns_2h;
            ev["growth"] = e.growth ? json(*e.growth) : json(nullptr);
            ev["backward_runs"] = e.backward_runs;
            ev["coalesced"] = e.coalesced;
            ev["coalescence_rate"] = e.coalescence_rate ? json(*e.coalescence_rate) : json(nullptr);
            if (e.green)
            {
                ev["green"] = {{"K", e.green_K},
                               {"best", to_string(e.green->best)},
                               {"accepted", e.green->accepted},
                               {"log_slope", e.green->logarithmic.slope},
                               {"log_r2", e.green->logarithmic.r2},
                               {"bounded_r2", e.green->bounded.r2},
                               {"power_r2", e.green->power.r2}};
            }
            ev["notes"] = e.notes;
            j["evidence"] = ev;
            j["consistency"] = to_string(v.consistency);

            if (cfg.format == OutputFormat::Csv)
            {
                std::vector<std::vector<std::string>> rows = {
                    {"class", to_string(v.predicted)},
                    {"criterion", v.criterion ? to_string(*v.criterion) : ""},
                    {"consistency", to_string(v.consistency)},
                    {"returns_h", std::to_string(e.returns_h)},
                    {"returns_2h", std::to_string(e.returns_2h)},
                    {"growth", e.growth ? num(*e.growth) : ""},
                    {"coalescence_rate", e.coalescence_rate ? num(*e.coalescence_rate) : ""},
                };
                for (auto c : v.fired)
                {
                    rows.push_back({"fired", to_string(c)});
                }
                return csv({"field", "value"}, rows);
            }
            return dump(j);
        }

        std::string run_essential(const ExperimentConfig& cfg, RunResult& res)
        {
            const VectorLaw law = vector_law(cfg);
            if (!law.is_finite())
            {
                throw ConfigError(0, "essential: law must have finite support");
            }
            const EssentialClassReport rep = essential_class(law, cfg.bound);
            res.summary = std::string("origin ") + (rep.origin_revisitable ? "revisitable" : "not revisitable") +
                          (rep.definitive ? " (proved)" : " (not proved)") + ": " + rep.reason;
            if (!rep.definitive)
            {
                res.status = RunStatus::Inconclusive;
            }
            if (cfg.format == OutputFormat::Csv)
            {
                std::vector<std::string> header;
                for (std::size_t i = 0; i < law.dim(); ++i)
                {
                    header.push_back("w" + std::to_string(i + 1));
                }
                header.push_back("boundary");
                std::vector<std::vector<std::string>> rows;
                for (const auto& s : rep.explored)
                {
                    std::vector<std::string> row;
                    for (auto x : s)
                    {
                        row.push_back(std::to_string(x));
                    }
                    row.push_back(std::binary_search(rep.boundary.begin(), rep.boundary.end(), s) ? "1" : "0");
                    rows.push_back(std::move(row));
                }
                return csv(header, rows);
            }
            json j;
            j["law"] = law.describe();
            j["bound"] = cfg.bound;
            j["origin_revisitable"] = rep.origin_revisitable;
            j["definitive"] = rep.definitive;
            j["reason"] = rep.reason;
            j["explored"] = rep.explored.size();
            j["boundary"] = rep.boundary.size();
            j["witness"] = rep.witness;
            return dump(j);
        }
    }

    void write_atomic(const std::string& path, const std::string& bytes)
    {
        const std::string partial = path + ".partial";
        {
            std::ofstream out(partial, std::ios::binary | std::ios::trunc);
            if (!out)
            {
                throw std::runtime_error("cannot write '" + partial + "'");
            }
            out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            if (!out)
            {
                throw std::runtime_error("write failed for '" + partial + "'");
            }
        }
        std::filesystem::rename(partial, path);
    }

    std::string render_experiment(const ExperimentConfig& cfg_in, RunResult& res)
    {
        if (!cfg_in.seed)
        {
            throw ConfigError(0, "missing seed: set 'seed = <u64>' or pass --seed");
        }
        const ExperimentConfig cfg = resolve_defaults(cfg_in);
        switch (cfg.kind)
        {
        case ExperimentKind::Simulate:
            return run_simulate(cfg, res);
        case ExperimentKind::Ladder:
            return run_ladder(cfg, res);
        case ExperimentKind::MaxDist:
            return run_maxdist(cfg, res);
        case ExperimentKind::Subordinate:
            return run_subordinate(cfg, res);
        case ExperimentKind::Renewal:
            return run_renewal(cfg, res);
        case ExperimentKind::Backward:
            return run_backward(cfg, res);
        case ExperimentKind::Classify:
            return run_classify(cfg, res);
        case ExperimentKind::Essential:
            return run_essential(cfg, res);
        }
        throw std::logic_error("unhandled experiment kind");
    }

    RunResult run_experiment(const ExperimentConfig& cfg_in)
    {
        RunResult res;
        const std::string body = render_experiment(cfg_in, res);
        const ExperimentConfig cfg = resolve_defaults(cfg_in);

        std::filesystem::create_directories(cfg.out);
        const std::string name =
            std::string(to_string(cfg.kind)) + (cfg.format == OutputFormat::Json ? ".json" : ".csv");
        write_atomic((std::filesystem::path(cfg.out) / name).string(), body);
        res.files.push_back({name, body.size(), fnv1a64(body)});

        json m;
        m["tool"] = "lindrec";
        m["version"] = kVersion;
        m["libraries"] = {{"boost", BOOST_LIB_VERSION},
                          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
        m["experiment"] = to_string(cfg.kind);
        m["seed"] = *cfg.seed;
        m["config_hash"] = hex(cfg.hash());
        json c = json::object();
        for (const auto& [k, v] : cfg.canonical())
        {
            c[k] = v;
        }
        m["config"] = c;
        json files = json::array();
        for (const auto& f : res.files)
        {
            files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a", hex(f.fnv1a)}});
        }
        m["outputs"] = files;
        m["status"] = res.status == RunStatus::Ok ? "ok" : "inconclusive";
        m["summary"] = res.summary;
        const std::string manifest = dump(m);
        write_atomic((std::filesystem::path(cfg.out) / "manifest.json").string(), manifest);
        res.files.push_back({"manifest.json", manifest.size(), fnv1a64(manifest)});
        return res;
    }
}
