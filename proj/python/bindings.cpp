// bindings.cpp — pybind11 module usc_photonstat._core

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <limits>

#include "usc/correlations_static.hpp"
#include "usc/errors.hpp"
#include "usc/lindblad_dynamics.hpp"
#include "usc/scenario.hpp"

namespace py = pybind11;
using namespace usc;

namespace {

double or_nan(const std::optional<double>& v) { return v.value_or(std::numeric_limits<double>::quiet_NaN()); }

PositiveFrequencyOperator oplus_for(const DressedBasis& basis, const std::string& kind, int order) {
    return positive_frequency(build_emission_operator(basis.params, parse_emission_kind(kind)), basis, order);
}

LindbladOptions make_options(int n_levels, const std::string& drive_mode, const std::string& spectral_weight,
                             const std::string& qubit_bath, double resonance_cut) {
    LindbladOptions o;
    o.n_levels = n_levels;
    o.drive_mode = parse_drive_mode(drive_mode);
    o.spectral_weight = parse_spectral_weight(spectral_weight);
    o.qubit_bath = parse_qubit_bath(qubit_bath);
    o.resonance_cut = resonance_cut;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Photon statistics of a qubit ultrastrongly coupled to a resonator";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<LabelAmbiguityError>(m, "LabelAmbiguityError", numerical.ptr());
    py::register_exception<NoCrossingError>(m, "NoCrossingError", numerical.ptr());
    py::register_exception<DegenerateKernelError>(m, "DegenerateKernelError", numerical.ptr());
    py::register_exception<IntegrationError>(m, "IntegrationError", numerical.ptr());

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init([](double omega_c, double delta, double epsilon, double lambda_, bool diamagnetic, int n_max,
                         double kappa, double gamma, double drive_amplitude, double drive_frequency) {
                 SystemParams p{omega_c, delta, epsilon, lambda_, diamagnetic, n_max,
                                kappa,   gamma, drive_amplitude, drive_frequency};
                 p.validate();
                 return p;
             }),
             py::arg("omega_c") = 1.0, py::arg("delta") = 1.0, py::arg("epsilon") = 0.0, py::arg("lam") = 0.0,
             py::arg("diamagnetic") = false, py::arg("n_max") = 20, py::arg("kappa") = 0.0, py::arg("gamma") = 0.0,
             py::arg("drive_amplitude") = 0.0, py::arg("drive_frequency") = 0.0)
        .def_readwrite("omega_c", &SystemParams::omega_c)
        .def_readwrite("delta", &SystemParams::delta)
        .def_readwrite("epsilon", &SystemParams::epsilon)
        .def_readwrite("lam", &SystemParams::lambda)
        .def_readwrite("diamagnetic", &SystemParams::diamagnetic)
        .def_readwrite("n_max", &SystemParams::n_max)
        .def_readwrite("kappa", &SystemParams::kappa)
        .def_readwrite("gamma", &SystemParams::gamma)
        .def_readwrite("drive_amplitude", &SystemParams::drive_amplitude)
        .def_readwrite("drive_frequency", &SystemParams::drive_frequency)
        .def_property_readonly("omega_a", &SystemParams::omega_a)
        .def_property_readonly("dim", &SystemParams::dim)
        .def("validate", &SystemParams::validate);

    m.def("hamiltonian", [](const SystemParams& p) { return build_hamiltonian(p).entries(); }, py::arg("params"));
    m.def("parity_operator", [](int n_max) { return parity_operator(n_max).entries(); }, py::arg("n_max"));

    py::class_<DressedBasis>(m, "DressedBasis")
        .def_readonly("params", &DressedBasis::params)
        .def_readonly("energies", &DressedBasis::energies)
        .def_readonly("states", &DressedBasis::states)
        .def_property_readonly("labels",
                               [](const DressedBasis& b) {
                                   std::vector<std::optional<std::string>> out;
                                   for (const auto& l : b.labels) out.push_back(l ? std::optional(l->str()) : std::nullopt);
                                   return out;
                               })
        .def_readonly("parities", &DressedBasis::parities)
        .def("index_of", [](const DressedBasis& b, const std::string& l) { return b.index_of(JcLabel::parse(l)); })
        .def("energy_of", [](const DressedBasis& b, const std::string& l) { return b.energy_of(JcLabel::parse(l)); })
        .def("__len__", &DressedBasis::dim);

    m.def("diagonalize", [](const SystemParams& p, int n_tracked) { return diagonalize_labeled(p, n_tracked); },
          py::arg("params"), py::arg("n_tracked") = 9, "Labeled dressed basis");
    m.def(
        "sweep_labeled",
        [](const SystemParams& p, const std::string& axis, const std::vector<double>& grid, int n_tracked) {
            LabelingOptions o;
            o.n_tracked = n_tracked;
            if (axis != "lambda" && axis != "epsilon") throw InvalidArgument("axis must be 'lambda' or 'epsilon'");
            return sweep_labeled(p, axis == "lambda" ? SweepAxis::lambda : SweepAxis::epsilon, grid, o);
        },
        py::arg("params"), py::arg("axis"), py::arg("grid"), py::arg("n_tracked") = 9);
    m.def(
        "find_crossing",
        [](const SystemParams& p, const std::string& a, const std::string& b, double lo, double hi, double tol) {
            return find_crossing(p, JcLabel::parse(a), JcLabel::parse(b), lo, hi, {}, tol);
        },
        py::arg("params"), py::arg("label_a") = "2-", py::arg("label_b") = "1+", py::arg("lo") = 0.05,
        py::arg("hi") = 0.95, py::arg("tol") = 1e-4);

    m.def(
        "positive_frequency",
        [](const DressedBasis& b, const std::string& kind, int order) { return oplus_for(b, kind, order).matrix; },
        py::arg("basis"), py::arg("kind") = "sigma_x", py::arg("order") = 0);
    m.def(
        "g2_zero_eigenstate",
        [](const DressedBasis& b, const std::string& kind, int order, const std::string& initial) {
            return g2_zero_eigenstate(oplus_for(b, kind, order), b, JcLabel::parse(initial)).g2;
        },
        py::arg("basis"), py::arg("kind") = "sigma_x", py::arg("order") = 0, py::arg("initial") = "2-",
        "Zero-delay g2 from a dressed eigenstate; None when dark");
    m.def(
        "g2_zero_superposition",
        [](const DressedBasis& b, std::complex<double> alpha, const std::string& kind, int order,
           const std::string& initial) {
            return g2_zero_superposition(oplus_for(b, kind, order), b, alpha, JcLabel::parse(initial));
        },
        py::arg("basis"), py::arg("alpha"), py::arg("kind") = "sigma_x", py::arg("order") = 0,
        py::arg("initial") = "2-");
    m.def(
        "sweep_g2_zero",
        [](const SystemParams& p, const std::vector<double>& grid, const std::vector<std::pair<std::string, int>>& ops,
           const std::string& initial, unsigned threads) {
            std::vector<OperatorRequest> req;
            for (const auto& [kind, order] : ops) req.push_back({parse_emission_kind(kind), order});
            const auto t = sweep_g2_zero(p, grid, req, JcLabel::parse(initial), {}, threads);
            Eigen::MatrixXd out(t.x.size(), req.size());
            for (std::size_t r = 0; r < t.x.size(); ++r) {
                for (std::size_t c = 0; c < req.size(); ++c) out(r, c) = or_nan(t.values[r][c]);
            }
            return out;
        },
        py::arg("params"), py::arg("grid"),
        py::arg("operators") = std::vector<std::pair<std::string, int>>{{"sigma_x", 0}, {"sigma_x", 1}, {"sigma_x", 2}},
        py::arg("initial") = "2-", py::arg("threads") = 1, "Rows follow the grid; NaN marks a dark state");

    m.def(
        "sweep_g2_drive",
        [](const SystemParams& p, const std::vector<double>& eps, int n_levels, const std::string& drive_mode,
           const std::string& weight, const std::string& qubit_bath, double resonance_cut, unsigned threads) {
            const auto opts = make_options(n_levels, drive_mode, weight, qubit_bath, resonance_cut);
            const auto rows = sweep_g2_drive(p, eps, opts, {}, threads);
            py::dict d;
            std::vector<double> e, g, pop, wd;
            for (const auto& r : rows) {
                e.push_back(r.epsilon);
                g.push_back(or_nan(r.g2_zero));
                pop.push_back(r.pop_1plus);
                wd.push_back(r.omega_d);
            }
            d["epsilon"] = e;
            d["g2_zero"] = g;
            d["pop_1plus"] = pop;
            d["omega_d"] = wd;
            return d;
        },
        py::arg("params"), py::arg("epsilon_grid"), py::arg("n_levels") = 12, py::arg("drive_mode") = "dressed_rwa",
        py::arg("spectral_weight") = "ohmic", py::arg("qubit_bath") = "i_theta", py::arg("resonance_cut") = 0.05,
        py::arg("threads") = 1);

    m.def(
        "driven_g2_tau",
        [](const SystemParams& p, const std::vector<double>& tau, bool averaged, int n_levels,
           const std::string& weight, double bandwidth) {
            const auto opts = make_options(n_levels, "dressed_rwa", weight, "i_theta", 0.05);
            const auto pt = solve_driven_point(diagonalize_labeled(p), p, opts);
            const auto s = averaged ? g2_tau_averaged(pt.generator, pt.steady, pt.emission, tau, bandwidth)
                                    : g2_tau(pt.generator, pt.steady, pt.emission, tau);
            py::dict d;
            d["tau"] = s.tau_grid;
            d["g2"] = s.values;
            d["defined"] = s.defined;
            d["normalization"] = s.normalization;
            d["g2_zero"] = or_nan(g2_zero_steady(pt.steady.matrix, pt.emission));
            d["steady_state"] = pt.steady.matrix;
            d["drive_frequency"] = pt.params.drive_frequency;
            return d;
        },
        py::arg("params"), py::arg("tau"), py::arg("averaged") = true, py::arg("n_levels") = 12,
        py::arg("spectral_weight") = "ohmic", py::arg("bandwidth") = 1e-2);

    m.def("scenarios", [] {
        std::vector<std::string> out;
        for (auto s : all_scenarios()) out.emplace_back(to_string(s));
        return out;
    });
    m.def(
        "run_scenario",
        [](const std::string& name, const std::filesystem::path& out, unsigned threads) {
            auto c = scenario_defaults(parse_scenario(name));
            c.output_dir = out;
            return run_scenario(c, threads).files;
        },
        py::arg("name"), py::arg("out"), py::arg("threads") = 1, "Run a named scenario with its defaults");
    m.def(
        "run_config",
        [](const std::filesystem::path& config, unsigned threads) {
            return run_scenario(load_config(config), threads).files;
        },
        py::arg("config"), py::arg("threads") = 1);
}
