#include <pybind11/complex.h>

#include <iostream>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gravac/acceptance.hpp"
#include "gravac/inversion.hpp"
#include "gravac/scenario.hpp"
#include "gravac/ucp.hpp"

namespace py = pybind11;
using namespace gravac;

namespace {

py::dict eval_to_dict(const MediumEval& e) {
    py::dict d;
    d["rho"] = e.rho;
    d["c"] = e.c;
    d["kappa"] = e.kappa;
    d["grad_rho"] = e.grad_rho;
    d["grad_c"] = e.grad_c;
    d["hess_rho"] = e.hess_rho;
    d["hess_c"] = e.hess_c;
    return d;
}

}  // namespace

PYBIND11_MODULE(_gravac, m) {
    m.doc() = "acoustic-gravitational forward modeling and inversion";

    py::register_exception<Error>(m, "GravacError");

    py::enum_<Side>(m, "Side").value("minus", Side::Minus).value("plus", Side::Plus);

    py::class_<Medium>(m, "Medium")
        .def("eval",
             [](const Medium& mm, const Vec3& x, std::optional<Side> side) {
                 return eval_to_dict(mm.eval(x, side));
             },
             py::arg("x"), py::arg("side") = std::nullopt)
        .def_property_readonly("domain_radius", &Medium::domain_radius)
        .def_property_readonly("n_interfaces",
                               [](const Medium& mm) { return mm.interfaces().size(); });

    m.def("homogeneous_medium", &homogeneous_medium, py::arg("rho"), py::arg("c"),
          py::arg("domain_radius") = 2.0);
    m.def("layered_ball", &layered_ball, py::arg("radii"), py::arg("rho"), py::arg("c"),
          py::arg("rho_outside") = 1.0, py::arg("c_outside") = 1.0,
          py::arg("domain_radius") = 2.0);
    m.def("halfspace_medium", &halfspace_medium, py::arg("rho_minus"), py::arg("c_minus"),
          py::arg("rho_plus"), py::arg("c_plus"), py::arg("normal") = Vec3(0, 0, 1),
          py::arg("offset") = 0.0, py::arg("domain_radius") = 4.0);

    py::class_<GravityField, std::shared_ptr<GravityField>>(m, "GravityField")
        .def("phi", &GravityField::phi)
        .def("grad", &GravityField::grad)
        .def("hess", &GravityField::hess)
        .def_property_readonly("k0", &GravityField::k0);

    m.def("solve_phi_radial", &solve_phi_radial, py::arg("medium"), py::arg("k0") = 1.0);
    m.def(
        "solve_phi_grid",
        [](const Medium& mm, int n, double extent, double k0) {
            GridSpec spec;
            spec.n = n;
            spec.extent = extent;
            return solve_phi_grid(mm, spec, k0);
        },
        py::arg("medium"), py::arg("n") = 64, py::arg("extent") = 2.0, py::arg("k0") = 1.0);
    m.def("selfgrav_symbol_b0", &selfgrav_symbol_b0, py::arg("xi"), py::arg("k0") = 1.0);

    m.def(
        "trace_ray",
        [](const Medium& mm, const Vec3& x, const Vec3& dir, double tau, double max_s) {
            TraceOptions opt;
            opt.max_s = max_s;
            RayPath path = trace(mm, nullptr, make_onshell(mm, x, dir, tau), opt);
            py::list pts;
            for (const auto& seg : path.segments)
                for (const auto& s : seg.samples) {
                    py::dict d;
                    d["s"] = s.s;
                    d["t"] = s.p.t;
                    d["x"] = s.p.x;
                    d["xi"] = s.p.xi;
                    pts.append(d);
                }
            py::list evs;
            for (const auto& ev : path.events) {
                py::dict d;
                d["interface"] = ev.interface_id;
                d["kind"] = ev.kind == EventKind::Reflection     ? "reflection"
                            : ev.kind == EventKind::Transmission ? "transmission"
                            : ev.kind == EventKind::Glancing     ? "glancing"
                            : ev.kind == EventKind::Brewster     ? "brewster"
                                                                 : "exit";
                d["t"] = ev.incident.t;
                d["x"] = ev.incident.x;
                evs.append(d);
            }
            py::dict out;
            out["points"] = pts;
            out["events"] = evs;
            out["travel_time"] = travel_time(path);
            return out;
        },
        py::arg("medium"), py::arg("x"), py::arg("dir"), py::arg("tau") = 1.0,
        py::arg("max_s") = 10.0);

    m.def("geodesic_distance", &geodesic_distance, py::arg("medium"), py::arg("x"), py::arg("y"),
          py::arg("tau") = 1.0, py::arg("tol") = 1e-9);

    py::class_<InterfaceSides>(m, "InterfaceSides")
        .def(py::init([](double rm, double cm, double rp, double cp) {
                 return InterfaceSides{rm, cm, rp, cp};
             }),
             py::arg("rho_minus"), py::arg("c_minus"), py::arg("rho_plus"), py::arg("c_plus"))
        .def_readwrite("rho_m", &InterfaceSides::rho_m)
        .def_readwrite("c_m", &InterfaceSides::c_m)
        .def_readwrite("rho_p", &InterfaceSides::rho_p)
        .def_readwrite("c_p", &InterfaceSides::c_p);

    m.def("principal_R", &principal_R, py::arg("sides"), py::arg("tau"), py::arg("eta_norm"));
    m.def("principal_T", &principal_T, py::arg("sides"), py::arg("tau"), py::arg("eta_norm"));
    m.def("brewster_slowness", &brewster_slowness, py::arg("rho_minus"), py::arg("c_minus"),
          py::arg("rho_plus"), py::arg("c_plus"));
    m.def(
        "reflect_amp_minus1",
        [](const InterfaceSides& sd, double dnu_log_c, double dnu_log_sqrt_rho,
           const Vec3& grad_phi, double tau, const Eigen::Vector2d& eta) {
            InterfaceJets jets{dnu_log_c, dnu_log_sqrt_rho, grad_phi};
            return reflect_amp_minus1(sd, jets, tau, eta);
        },
        py::arg("sides"), py::arg("dnu_log_c_p"), py::arg("dnu_log_sqrt_rho_p"),
        py::arg("grad_phi"), py::arg("tau"), py::arg("eta"));
    m.def(
        "transfer_matrix_R",
        [](double rho_top, double c_top, std::vector<std::tuple<double, double, double>> layers,
           double rho_bot, double c_bot, double tau, double eta_norm) {
            LayerStack st;
            st.rho_top = rho_top;
            st.c_top = c_top;
            st.rho_bot = rho_bot;
            st.c_bot = c_bot;
            for (auto& [r, c, d] : layers) st.layers.push_back({r, c, d});
            return transfer_matrix_response(st, tau, eta_norm).R;
        },
        py::arg("rho_top"), py::arg("c_top"), py::arg("layers"), py::arg("rho_bot"),
        py::arg("c_bot"), py::arg("tau"), py::arg("eta_norm"));

    m.def(
        "recover_order0",
        [](const std::vector<std::pair<double, double>>& slowness_R, double rho_m, double c_m,
           double tau, bool least_squares) {
            std::vector<ReflectionSample> samples;
            for (const auto& [p, R] : slowness_R) {
                ReflectionSample s;
                s.tau = tau;
                s.eta = {p * tau, 0.0};
                s.order = 0;
                s.value = R;
                samples.push_back(s);
            }
            const auto r = recover_order0(samples, rho_m, c_m, least_squares);
            return py::make_tuple(r.rho_p, r.c_p);
        },
        py::arg("slowness_R"), py::arg("rho_minus"), py::arg("c_minus"), py::arg("tau") = 1.0,
        py::arg("least_squares") = false);

    m.def(
        "carleman_ratio",
        [](double a, double b, double beta, int order) {
            auto u = RadialTestFunction::bump(a, b);
            CarlemanConfig cfg;
            cfg.beta = beta;
            if (order == 2) {
                auto lap = [](const Vec3&) { return Mat3(Mat3::Identity()); };
                return carleman_sides_2nd(u, lap, cfg).ratio();
            }
            return carleman_sides_4th(u, cfg).ratio();
        },
        py::arg("a"), py::arg("b"), py::arg("beta"), py::arg("order") = 2);

    m.def("cli_run", &cli_run, py::arg("args"));
    m.def("run_acceptance", []() { return run_acceptance(std::cout); });
}
