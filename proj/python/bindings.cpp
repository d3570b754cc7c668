#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <optional>

#include "reebfol/brownian.hpp"
#include "reebfol/contact.hpp"
#include "reebfol/instances.hpp"
#include "reebfol/io.hpp"
#include "reebfol/logdiffusion.hpp"
#include "reebfol/obstruction.hpp"
#include "reebfol/parallel.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace reebfol;

namespace {

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

std::string superharmonic(const InstanceDescriptor& d, double margin) {
    const auto s = check_superharmonic(d.chart, d.tau, margin);
    return json{{"verdict", to_string(s.verdict)}, {"checked", s.checked}, {"failed", s.failed},
                {"inconclusive", s.inconclusive}, {"worst_laplacian", s.worst_laplacian}, {"worst_se", s.worst_se}}
        .dump();
}

std::string contact(const InstanceDescriptor& d, std::optional<double> eps) {
    json j;
    if (!eps) {
        const auto e = auto_epsilon(d.chart, d.tau);
        j["auto_eps"] = e ? json(*e) : json(nullptr);
        eps = e.value_or(1e-2);
    }
    const auto vol = contact_volume(d.chart, d.tau, build_beta(d.chart, d.tau), *eps);
    const auto tr = check_reeb_transverse(d.chart, d.tau, *eps);
    j["eps"] = *eps;
    j["positive"] = vol.positive;
    j["min_direct"] = vol.min_direct;
    j["transverse"] = to_string(tr.verdict);
    j["min_dalpha_sigma"] = tr.min_dalpha_sigma;
    return j.dump();
}

std::string lp(const std::string& complex_json) {
    const auto c = complex_from_json(json::parse(complex_json));
    const auto o = solve_beta_lp(c);
    json j = outcome_to_json(o);
    j["verified"] = verify_certificate(o, c);
    return j.dump();
}

std::string contraction(const InstanceDescriptor& d, double T, double dt, std::size_t paths, std::uint64_t seed) {
    const auto [k, dr] = estimate_contraction_and_drift(d.chart, d.tau, {{T, dt, paths, seed, StartSpec::uniform()}, 20, 0.2});
    return json{{"kappa", k.estimate}, {"kappa_se", k.se}, {"drift", dr.estimate}, {"drift_se", dr.se},
                {"n_truncated", k.n_truncated}}
        .dump();
}

InstanceDescriptor diffused(const InstanceDescriptor& d, double T, double dt, std::size_t paths, std::uint64_t seed,
                            double R, double S) {
    InstanceDescriptor out = d;
    out.tau = log_diffuse(d.chart, d.tau, {T, dt, paths, CutoffSpec(R, S), seed}).field;
    return out;
}

}  // namespace

PYBIND11_MODULE(_reebfol, m) {
    m.doc() = "Numerical checks for Reeb flows transverse to foliations";

    py::register_exception<InstanceError>(m, "InstanceError", PyExc_KeyError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

    py::class_<InstanceDescriptor>(m, "Instance")
        .def_readonly("name", &InstanceDescriptor::name)
        .def_readonly("description", &InstanceDescriptor::description)
        .def_readonly("resolution", &InstanceDescriptor::resolution)
        .def_property_readonly("shape",
                               [](const InstanceDescriptor& d) {
                                   return py::make_tuple(d.chart.nz(), d.chart.ny(), d.chart.nx());
                               })
        .def_property_readonly("log_f", [](const InstanceDescriptor& d) { return array(d.tau.log_values()); })
        .def_property_readonly("has_complex", [](const InstanceDescriptor& d) { return d.complex.has_value(); })
        .def("to_json", [](const InstanceDescriptor& d) { return dump(instance_to_json(d)); })
        .def_static("from_json", [](const std::string& s) { return instance_from_json(json::parse(s)); })
        .def("complex_json",
             [](const InstanceDescriptor& d, int levels) {
                 if (d.complex) return complex_to_json(*d.complex).dump();
                 if (levels == 0) return complex_to_json(grid_complex(d.chart)).dump();
                 return complex_to_json(extract_complex(d.chart, d.tau, 0, levels)).dump();
             },
             "levels"_a = 3, "Dedicated complex, else level-set extraction (levels = 0: bare grid).")
        .def("__repr__", [](const InstanceDescriptor& d) { return "<Instance " + d.name + ">"; });

    m.def("instance_names", &instance_names);
    m.def("make_instance", &make_instance, "name"_a, "resolution"_a = 0);
    m.def("set_threads", &set_threads, "n"_a);

    m.def("_superharmonic", &superharmonic, "instance"_a, "margin"_a = 0.0);
    m.def("_contact", &contact, "instance"_a, "eps"_a = std::nullopt);
    m.def("_lp", &lp, "complex_json"_a);
    m.def("_contraction", &contraction, "instance"_a, "T"_a, "dt"_a, "paths"_a, "seed"_a,
          py::call_guard<py::gil_scoped_release>());
    m.def("log_diffuse", &diffused, "instance"_a, "T"_a, "dt"_a, "paths"_a, "seed"_a,
          "R"_a = std::numeric_limits<double>::infinity(), "S"_a = 2.0, py::call_guard<py::gil_scoped_release>(),
          "Instance with the log-diffused measure (and its derivative channels).");
}
