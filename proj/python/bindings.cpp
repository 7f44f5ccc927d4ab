#include "lindrec/config.hpp"
#include "lindrec/experiments.hpp"
#include "lindrec/runner.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace lindrec;

namespace
{
    LadderKind ladder_kind(const std::string& s)
    {
        if (s == "strict")
        {
            return LadderKind::StrictAscending;
        }
        if (s == "weak")
        {
            return LadderKind::WeakAscending;
        }
        throw py::value_error("kind must be 'strict' or 'weak'");
    }

    CoordinateRole role(const std::string& s)
    {
        if (s == "lindley")
        {
            return CoordinateRole::Lindley;
        }
        if (s == "walk")
        {
            return CoordinateRole::Walk;
        }
        throw py::value_error("role must be 'lindley' or 'walk'");
    }

    VectorLaw as_vector_law(const py::object& law)
    {
        if (py::isinstance<VectorLaw>(law))
        {
            return law.cast<VectorLaw>();
        }
        return VectorLaw::product({law.cast<IncrementLaw>()});
    }
}

PYBIND11_MODULE(_lindrec, m)
{
    m.doc() = "Lindley processes, ladder epochs and recurrence classification";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<SlowlyVarying>(m, "SlowlyVarying")
        .def(py::init([](double c, double eta) { return SlowlyVarying::log_power(c, eta); }), py::arg("c") = 1.0,
             py::arg("eta") = 0.0)
        .def_readonly("c", &SlowlyVarying::c)
        .def_readonly("eta", &SlowlyVarying::eta)
        .def("__call__", &SlowlyVarying::operator());

    py::class_<IncrementLaw>(m, "IncrementLaw")
        .def_static("finite", [](const std::map<std::int64_t, double>& w) {
            return make_finite_support({w.begin(), w.end()});
        })
        .def_static("stable", &make_stable_lattice, py::arg("alpha"), py::arg("beta"), py::arg("scale") = 1.0,
                    py::arg("log_power") = 0.0)
        .def_static("point_mass", &IncrementLaw::point_mass)
        .def("pmf", &IncrementLaw::pmf)
        .def("upper_tail", &IncrementLaw::upper_tail)
        .def("lower_tail", &IncrementLaw::lower_tail)
        .def_property_readonly("mean", &IncrementLaw::mean)
        .def_property_readonly("variance", &IncrementLaw::variance)
        .def_property_readonly("symmetric", &IncrementLaw::is_symmetric)
        .def("negated", &IncrementLaw::negated)
        .def("sample", [](const IncrementLaw& law, std::int64_t n, std::uint64_t seed) {
            Rng rng(seed);
            std::vector<std::int64_t> out(static_cast<std::size_t>(n));
            for (auto& y : out)
            {
                y = law.sample(rng);
            }
            return out;
        }, py::arg("n"), py::arg("seed"))
        .def("__repr__", &IncrementLaw::describe);

    py::class_<VectorLaw>(m, "VectorLaw")
        .def_static("product", &VectorLaw::product)
        .def_static("joint", [](const std::vector<std::pair<Vec, double>>& e) { return VectorLaw::joint(e); })
        .def_property_readonly("dim", &VectorLaw::dim)
        .def_property_readonly("independent", &VectorLaw::independent)
        .def("marginal", &VectorLaw::marginal)
        .def("__repr__", &VectorLaw::describe);

    m.def("rho", py::overload_cast<double, double>(&rho_from), py::arg("alpha"), py::arg("beta"));

    m.def("lindley_path", [](const py::object& law, std::int64_t n, std::uint64_t seed) {
        const auto v = as_vector_law(law);
        Rng rng(seed);
        Vec w(v.dim(), 0), y(v.dim());
        std::vector<Vec> out{w};
        for (std::int64_t k = 0; k < n; ++k)
        {
            v.sample(rng, y);
            w = lindley_step(w, y);
            out.push_back(w);
        }
        return out;
    }, py::arg("law"), py::arg("n"), py::arg("seed"));

    m.def("walk_sums", [](const IncrementLaw& law, std::int64_t n, std::uint64_t seed) {
        Rng rng(seed);
        return simulate_path(law, n, rng).sums;
    }, py::arg("law"), py::arg("n"), py::arg("seed"));

    m.def("ladder_pmf", [](const IncrementLaw& law, std::int64_t n, const std::string& kind) {
        const auto r = exact_ladder_pmf<double>(law, ladder_kind(kind), n);
        return py::make_tuple(r.pmf, r.survival);
    }, py::arg("law"), py::arg("n"), py::arg("kind") = "strict",
       "(pmf, survival) with pmf[k] = P(tau = k) for k <= n.");

    m.def("ladder_pmf_exact", [](const IncrementLaw& law, std::int64_t n, const std::string& kind) {
        const auto r = exact_ladder_pmf<Rational>(law, ladder_kind(kind), n);
        std::vector<std::string> out;
        for (const auto& p : r.pmf)
        {
            out.push_back(to_fraction_string(p));
        }
        return py::make_tuple(out, to_fraction_string(r.survival));
    }, py::arg("law"), py::arg("n"), py::arg("kind") = "strict",
       "As ladder_pmf, with exact fractions as strings.");

    m.def("max_pmf", [](const IncrementLaw& law, std::int64_t n) { return exact_max_pmf<double>(law, n).pmf; },
          py::arg("law"), py::arg("n"));

    m.def("renewal_sequence", [](const std::vector<double>& tau, std::int64_t K) {
        return renewal_sequence(tau, K).u;
    }, py::arg("tau_pmf"), py::arg("K"));

    m.def("green_partial_sums", [](const std::vector<double>& u1, const std::vector<double>& u2, std::int64_t K) {
        return green_partial_sums(RenewalSeq{u1, "u1"}, RenewalSeq{u2, "u2"}, K);
    }, py::arg("u1"), py::arg("u2"), py::arg("K"));

    m.def("tail_constant", &tail_constant, py::arg("rho"), py::arg("sigma2") = 1.0);
    m.def("eta_regime", [](double eta) { return std::string(to_string(eta_regime(eta))); });
    m.def("conjugate_sv", &conjugate_sv, py::arg("ell"), py::arg("alpha"));

    m.def("chung_fuchs_log_example", [](double eta, double eps) {
        const auto t = pitman_chung_fuchs_log_example(eta, eps);
        py::dict d;
        d["convergent"] = t.convergent;
        d["value"] = t.value;
        d["reason"] = t.reason;
        return d;
    }, py::arg("eta"), py::arg("epsilon") = 0.5);

    m.def("classify", [](const py::object& law, const std::vector<std::string>& roles, bool evidence,
                         std::uint64_t seed) {
        if (roles.size() != 2)
        {
            throw py::value_error("classify needs two roles");
        }
        EvidenceOptions o;
        o.enabled = evidence;
        o.seed = seed;
        const auto v = classify_2d(law.cast<VectorLaw>(), {role(roles[0]), role(roles[1])}, o);
        py::dict d;
        d["class"] = std::string(to_string(v.predicted));
        d["criterion"] = v.criterion ? py::cast(std::string(to_string(*v.criterion))) : py::none();
        std::vector<std::string> fired;
        for (auto c : v.fired)
        {
            fired.emplace_back(to_string(c));
        }
        d["fired"] = fired;
        d["reasons"] = v.reasons;
        d["consistency"] = std::string(to_string(v.consistency));
        return d;
    }, py::arg("law"), py::arg("roles") = std::vector<std::string>{"lindley", "lindley"}, py::arg("evidence") = false,
       py::arg("seed") = 0);

    m.def("render", [](const std::string& config_text) {
        auto cfg = parse_config(config_text);
        RunResult r;
        const auto bytes = render_experiment(cfg, r);
        return py::make_tuple(py::bytes(bytes), r.summary);
    }, py::arg("config"), "Runs a config in memory and returns (output bytes, summary).");
}
