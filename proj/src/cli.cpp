#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>

#include <fstream>
#include <sstream>

#include "gravac/acceptance.hpp"
#include "gravac/inversion.hpp"
#include "gravac/io.hpp"
#include "gravac/parallel.hpp"
#include "gravac/scenario.hpp"
#include "gravac/ucp.hpp"

namespace gravac {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
    std::string scenario_path;
    std::string out = "out";
    std::string data_csv;  // external reflectivity data for invert-interface
    uint64_t seed = 0;     // 0: use the scenario's seed
    double tol = 0.0;      // 0: defaults
};

Scenario load_with_overrides(const Common& c) {
    Scenario s = load_scenario(c.scenario_path);
    if (c.seed != 0) s.seed = c.seed;
    fs::create_directories(c.out);
    return s;
}

const Medium& medium_of(const Scenario& s) {
    if (!s.medium) throw PreconditionError("NoMedium", "scenario has no medium block");
    return *s.medium;
}

InterfaceSides sides_at(const Medium& m, int gi) {
    if (gi < 0 || gi >= static_cast<int>(m.interfaces().size()))
        throw PreconditionError("NoInterface", "interface index out of range");
    const auto& g = m.interfaces()[gi];
    Vec3 x;
    if (g.kind == Interface::Kind::Sphere)
        x = Vec3(g.radius, 0, 0);
    else
        x = g.plane_offset * g.plane_normal;
    InterfaceSides sd;
    sd.rho_m = m.eval(x, Side::Minus).rho;
    sd.c_m = m.eval(x, Side::Minus).c;
    sd.rho_p = m.eval(x, Side::Plus).rho;
    sd.c_p = m.eval(x, Side::Plus).c;
    return sd;
}

int cmd_trace(const Common& c) {
    Scenario s = load_with_overrides(c);
    const Medium& m = medium_of(s);

    // Rays are independent; trace in parallel, write in order.
    std::vector<RayPath> paths(s.rays.size());
    parallel_for(static_cast<int>(s.rays.size()), [&](int i) {
        const auto& fan = s.rays[i];
        TraceOptions opt;
        opt.max_s = fan.max_s;
        if (c.tol > 0) opt.rel_tol = c.tol;
        paths[i] = trace(m, nullptr, make_onshell(m, fan.x, fan.dir, fan.tau), opt);
    });

    JsonlWriter events(c.out + "/events.jsonl");
    std::vector<PlotSeries> traj;
    for (size_t i = 0; i < s.rays.size(); ++i) {
        const auto& fan = s.rays[i];
        const RayPath& path = paths[i];
        CsvWriter csv(c.out + "/ray_" + std::to_string(i) + ".csv",
                      {"s", "t", "x", "y", "z", "xi_x", "xi_y", "xi_z", "segment"});
        PlotSeries ps;
        ps.name = "ray " + std::to_string(i);
        int seg_id = 0;
        for (const auto& seg : path.segments) {
            for (const auto& smp : seg.samples) {
                csv.row({smp.s, smp.p.t, smp.p.x[0], smp.p.x[1], smp.p.x[2], smp.p.xi[0],
                         smp.p.xi[1], smp.p.xi[2], static_cast<double>(seg_id)});
                ps.x.push_back(smp.p.x[0]);
                ps.y.push_back(smp.p.x[1]);
            }
            ++seg_id;
        }
        traj.push_back(std::move(ps));
        for (const auto& ev : path.events) {
            json je;
            je["ray"] = i;
            je["interface"] = ev.interface_id;
            je["kind"] = ev.kind == EventKind::Reflection     ? "reflection"
                         : ev.kind == EventKind::Transmission ? "transmission"
                         : ev.kind == EventKind::Glancing     ? "glancing"
                         : ev.kind == EventKind::Brewster     ? "brewster"
                                                              : "exit";
            je["t"] = ev.incident.t;
            je["x"] = {ev.incident.x[0], ev.incident.x[1], ev.incident.x[2]};
            events.line(je.dump());
        }

        if (fan.transport != "none") {
            // Amplitude transport along the first branch of the ray.
            RayPath first;
            first.segments.push_back(path.segments.front());
            GravityPtr grav = m.radial() ? solve_phi_radial(m, s.k0)
                                         : GravityPtr(std::make_shared<ZeroGravity>(s.k0));
            FamilyPtr fam = fan.transport == "spherical"
                                ? spherical_family(m, Vec3::Zero(), fan.tau)
                                : planar_family(m, fan.dir, fan.tau);
            const double a0 = fam->jet(fan.x).alpha0;
            const auto tr =
                transport_alpha_minus1(first, m, *grav, *fam, a0, 0.0, fan.selfgrav);
            CsvWriter acsv(c.out + "/amplitudes_" + std::to_string(i) + ".csv",
                           {"s", "alpha0_re", "alpha0_im", "alpha_m1_re", "alpha_m1_im",
                            "divN", "nAn"});
            for (const auto& smp : tr.samples)
                acsv.row({smp.s, smp.alpha0, 0.0, smp.alpha_m1.real(), smp.alpha_m1.imag(),
                          smp.div_N, smp.nAn});
        }
    }
    svg_plot(c.out + "/rays.svg", traj, "ray trajectories (" + s.name + ")", "x", "y");
    return 0;
}

int cmd_gravity(const Common& c) {
    Scenario s = load_with_overrides(c);
    const Medium& m = medium_of(s);
    auto grav = solve_phi_radial(m, s.k0);
    const auto* rg = dynamic_cast<const RadialGravity*>(grav.get());
    auto p0 = hydrostatic_pressure(m, *grav);
    CsvWriter csv(c.out + "/gravity_profile.csv", {"r", "phi", "dphi", "p0"});
    PlotSeries phi_s{"phi", {}, {}}, p_s{"p0", {}, {}};
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
        const double r = m.domain_radius() * i / n;
        csv.row({r, rg->phi_r(r), rg->dphi_r(r), p0.p0(r)});
        phi_s.x.push_back(r);
        phi_s.y.push_back(rg->phi_r(r));
        p_s.x.push_back(r);
        p_s.y.push_back(p0.p0(r));
    }
    svg_plot(c.out + "/gravity_profile.svg", {phi_s, p_s},
             "reference potential and hydrostatic pressure", "r", "phi, p0");
    if (s.gravity.solver == "grid") {
        auto gg = solve_phi_grid(m, s.gravity.grid, s.k0);
        CsvWriter axis(c.out + "/gravity_axis.csv", {"x", "phi_grid", "phi_radial"});
        for (int i = 0; i <= n; ++i) {
            const double x = -0.95 * s.gravity.grid.extent +
                             1.9 * s.gravity.grid.extent * i / n;
            axis.row({x, gg->phi(Vec3(x, 0, 0)), rg->phi(Vec3(x, 0, 0))});
        }
    }
    return 0;
}

int cmd_reflectivity(const Common& c) {
    Scenario s = load_with_overrides(c);
    const Medium& m = medium_of(s);
    const InterfaceSides sd = sides_at(m, s.reflectivity.interface_index);
    const double tau = s.reflectivity.tau;
    const double p_crit = 1.0 / std::max(sd.c_m, sd.c_p);
    const double p_hi = s.reflectivity.slowness_max * p_crit;

    CsvWriter csv(c.out + "/reflectivity.csv",
                  {"slowness", "R0", "T0", "minus1_re", "minus1_im", "classification"});
    PlotSeries rs{"sigma0(M_R)", {}, {}}, ts{"sigma0(M_T)", {}, {}};
    InterfaceJets jets;  // reflectivity curves at a bare interface: zero jets
    MediumEval em, ep;
    em.rho = sd.rho_m;
    em.c = sd.c_m;
    ep.rho = sd.rho_p;
    ep.c = sd.c_p;
    for (int i = 0; i <= s.reflectivity.count; ++i) {
        const double p = p_hi * i / s.reflectivity.count;
        const auto cls = classify_covector(em, ep, tau, p, 1e-6);
        double R = std::numeric_limits<double>::quiet_NaN(), T = R;
        Complex m1 = 0;
        if (cls == CovectorClass::HH || cls == CovectorClass::Brewster) {
            R = principal_R(sd, tau, p * tau);
            T = principal_T(sd, tau, p * tau);
            m1 = reflect_amp_minus1(sd, jets, tau, {p * tau, 0.0});
        }
        csv.row({p, R, T, m1.real(), m1.imag(), static_cast<double>(static_cast<int>(cls))});
        rs.x.push_back(p);
        rs.y.push_back(R);
        ts.x.push_back(p);
        ts.y.push_back(T);
    }
    std::vector<PlotMarker> markers;
    if (auto b = brewster_slowness(sd.rho_m, sd.c_m, sd.rho_p, sd.c_p))
        markers.push_back({*b, "brewster"});
    markers.push_back({1.0 / std::max(sd.c_m, sd.c_p), "critical"});
    svg_plot(c.out + "/reflectivity.svg", {rs, ts}, "interface symbols vs slowness", "|eta'|/tau",
             "sigma0", markers);
    return 0;
}

int cmd_synthesize(const Common& c) {
    Scenario s = load_with_overrides(c);
    const Medium& m = medium_of(s);
    SyntheticData data;
    if (m.radial()) {
        data = synthesize_layered(m, s.k0, s.synthesize.tau, s.synthesize.slownesses,
                                  s.synthesize.noise, s.seed);
    } else {
        // Single-interface samples without the layered travel-time model.
        const InterfaceSides sd = sides_at(m, 0);
        std::mt19937_64 rng(s.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        InterfaceData d;
        for (double p : s.synthesize.slownesses) {
            ReflectionSample smp;
            smp.tau = s.synthesize.tau;
            smp.eta = {p * smp.tau, 0.0};
            smp.order = 0;
            smp.value = principal_R(sd, smp.tau, p * smp.tau);
            if (s.synthesize.noise > 0) smp.value *= 1.0 + s.synthesize.noise * gauss(rng);
            d.order0.push_back(smp);
        }
        data.interfaces.push_back(d);
    }
    JsonlWriter out(c.out + "/samples.jsonl");
    CsvWriter csv(c.out + "/samples.csv",
                  {"interface", "order", "tau", "eta1", "eta2", "value_re", "value_im"});
    // Reflectivity-vs-slowness table for the first interface, in the format
    // invert-interface accepts back via --data.
    CsvWriter rcsv(c.out + "/reflectivity_vs_slowness.csv", {"slowness", "R"});
    for (size_t gi = 0; gi < data.interfaces.size(); ++gi) {
        const auto& d = data.interfaces[gi];
        json je;
        je["interface"] = d.truth_interface;
        je["two_way_time"] = d.two_way_time;
        out.line(je.dump());
        for (const auto& smp : d.order0) {
            csv.row({static_cast<double>(d.truth_interface), 0, smp.tau, smp.eta[0], smp.eta[1],
                     smp.value.real(), smp.value.imag()});
            if (gi == 0) rcsv.row({smp.slowness(), smp.value.real()});
        }
        for (const auto& smp : d.order1)
            csv.row({static_cast<double>(d.truth_interface), -1, smp.tau, smp.eta[0], smp.eta[1],
                     smp.value.real(), smp.value.imag()});
    }
    return 0;
}

int cmd_invert_interface(const Common& c) {
    Scenario s = load_with_overrides(c);
    const Medium& m = medium_of(s);
    const InterfaceSides truth = sides_at(m, 0);
    const double tau = s.synthesize.tau;

    JsonlWriter out(c.out + "/interface_recovery.jsonl");

    if (!c.data_csv.empty()) {
        // External reflectivity-vs-slowness data: columns slowness,R.
        std::ifstream in(c.data_csv);
        if (!in) throw ParseError("cannot open data file " + c.data_csv);
        std::string line;
        std::getline(in, line);  // header
        std::vector<ReflectionSample> order0;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string a, b;
            if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) continue;
            ReflectionSample smp;
            smp.tau = tau;
            smp.eta = {std::stod(a) * tau, 0.0};
            smp.order = 0;
            smp.value = std::stod(b);
            order0.push_back(smp);
        }
        const auto o0 = recover_order0(order0, truth.rho_m, truth.c_m, order0.size() > 2);
        json je;
        je["order"] = 0;
        je["source"] = c.data_csv;
        je["estimate"] = {o0.rho_p, o0.c_p};
        je["max_residual"] = o0.max_residual;
        out.line(je.dump());
        std::cout << "recovered rho_+ = " << fmt_num(o0.rho_p) << ", c_+ = " << fmt_num(o0.c_p)
                  << "\n";
        return 0;
    }

    const int nseeds = s.invert.noise > 0 ? s.invert.seeds : 1;
    std::vector<double> rho_errs(nseeds), c_errs(nseeds);
    parallel_for(nseeds, [&](int trial) {
        std::mt19937_64 rng(s.seed + 7919 * trial);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<ReflectionSample> order0;
        for (double p : s.invert.slownesses) {
            ReflectionSample smp;
            smp.tau = tau;
            smp.eta = {p * tau, 0.0};
            smp.order = 0;
            smp.value = principal_R(truth, tau, p * tau);
            if (s.invert.noise > 0) smp.value *= 1.0 + s.invert.noise * gauss(rng);
            order0.push_back(smp);
        }
        const auto o0 = recover_order0(order0, truth.rho_m, truth.c_m, s.invert.noise > 0);
        rho_errs[trial] = std::abs(o0.rho_p - truth.rho_p) / truth.rho_p;
        c_errs[trial] = std::abs(o0.c_p - truth.c_p) / truth.c_p;
    });
    {
        // Order -1 recovery on the noiseless pattern.
        {
            InterfaceJets jets;
            jets.dnu_log_c_p = 0.3;
            jets.dnu_log_sqrt_rho_p = -0.2;
            jets.grad_phi = Vec3(0.1, -0.05, 0.5);
            const double pmax = 0.5 / std::max(truth.c_m, truth.c_p);
            std::vector<ReflectionSample> order1;
            const std::vector<Eigen::Vector2d> etas = {
                {0, 0},         {pmax * tau, 0},  {-pmax * tau, 0},
                {0, pmax * tau}, {0, -pmax * tau}, {0.5 * pmax * tau, 0},
                {0, 0.5 * pmax * tau}, {0.3 * pmax * tau, 0.3 * pmax * tau},
                {-0.3 * pmax * tau, 0.3 * pmax * tau}};
            for (const auto& eta : etas) {
                ReflectionSample smp;
                smp.tau = tau;
                smp.eta = eta;
                smp.order = -1;
                smp.value = reflect_amp_minus1(truth, jets, tau, eta);
                order1.push_back(smp);
            }
            const auto o1 = recover_order1(order1, truth);
            json je;
            je["order"] = -1;
            je["truth"] = {jets.dnu_log_c_p, jets.dnu_log_sqrt_rho_p, jets.grad_phi[0],
                           jets.grad_phi[1], jets.grad_phi[2]};
            je["estimate"] = {o1.dnu_log_c_p, o1.dnu_log_sqrt_rho_p, o1.grad_phi[0],
                              o1.grad_phi[1], o1.grad_phi[2]};
            je["condition"] = o1.condition;
            out.line(je.dump());
        }
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    json je;
    je["order"] = 0;
    je["truth"] = {truth.rho_p, truth.c_p};
    je["trials"] = nseeds;
    je["noise"] = s.invert.noise;
    je["median_rel_err_rho"] = median(rho_errs);
    je["median_rel_err_c"] = median(c_errs);
    out.line(je.dump());
    std::cout << "order-0 median relative error: rho " << fmt_num(median(rho_errs)) << ", c "
              << fmt_num(median(c_errs)) << "\n";
    return 0;
}

int cmd_invert_layers(const Common& c) {
    Scenario s = load_with_overrides(c);
    const Medium& m = medium_of(s);
    SyntheticData data = synthesize_layered(m, s.k0, s.synthesize.tau, s.synthesize.slownesses,
                                            s.synthesize.noise, s.seed);
    LayerStripReport rep = layer_strip(data, m, s.k0);
    JsonlWriter out(c.out + "/layer_strip.jsonl");
    for (const auto& L : rep.layers) {
        json je;
        je["radius"] = {{"truth", L.radius_true}, {"estimate", L.radius_est}};
        je["rho"] = {{"truth", L.rho_true}, {"estimate", L.rho_est}};
        je["c"] = {{"truth", L.c_true}, {"estimate", L.c_est}};
        je["grad_phi_consistency"] = L.grad_phi_consistency;
        je["order1_condition"] = L.order1_condition;
        out.line(je.dump());
    }
    json sum;
    sum["max_rel_error"] = rep.max_rel_error;
    out.line(sum.dump());
    std::cout << "layer stripping max relative error: " << fmt_num(rep.max_rel_error) << "\n";
    return rep.converged ? 0 : 4;
}

int cmd_check_carleman(const Common& c) {
    Scenario s = load_with_overrides(c);
    const auto& t = s.carleman;
    auto u = RadialTestFunction::bump(t.a, t.b);
    CarlemanConfig cfg;
    cfg.s0 = t.s0;
    cfg.c_tilde = t.c_tilde;
    cfg.r0 = t.r0;
    auto lap = [](const Vec3&) { return Mat3(Mat3::Identity()); };

    CarlemanTask tt = t;
    if (tt.beta0 <= 0.0) {
        // Smallest beta at which the second-order ratio stabilizes.
        tt.beta0 = estimate_beta0([&](double b) {
            CarlemanConfig probe = cfg;
            probe.beta = b;
            return carleman_sides_2nd(u, lap, probe).ratio();
        });
        std::cout << "estimated beta0 = " << fmt_num(tt.beta0) << "\n";
    }

    CsvWriter csv(c.out + "/carleman_sweep.csv",
                  {"beta", "log10_lhs2", "log10_rhs2", "ratio2", "log10_lhs4", "log10_rhs4",
                   "ratio4"});
    PlotSeries r2{"2nd order", {}, {}}, r4{"4th order", {}, {}};
    std::vector<double> betas(t.sweep);
    std::vector<CarlemanSides> s2v(t.sweep), s4v(t.sweep);
    parallel_for(t.sweep, [&](int i) {
        betas[i] = tt.beta0 + (4.0 * tt.beta0 - tt.beta0) * i / std::max(1, t.sweep - 1);
        CarlemanConfig local = cfg;
        local.beta = betas[i];
        s2v[i] = carleman_sides_2nd(u, lap, local);
        s4v[i] = carleman_sides_4th(u, local);
    });
    for (int i = 0; i < t.sweep; ++i) {
        const double l10 = std::log(10.0);
        csv.row({betas[i], s2v[i].log_lhs / l10, s2v[i].log_rhs / l10, s2v[i].ratio(),
                 s4v[i].log_lhs / l10, s4v[i].log_rhs / l10, s4v[i].ratio()});
        r2.x.push_back(betas[i]);
        r2.y.push_back(s2v[i].ratio());
        r4.x.push_back(betas[i]);
        r4.y.push_back(s4v[i].ratio());
    }
    svg_plot(c.out + "/carleman_sweep.svg", {r2, r4}, "Carleman lhs/rhs over the beta sweep",
             "beta", "lhs/rhs");
    return 0;
}

int cmd_verify(const Common&) { return run_acceptance(std::cout) == 0 ? 0 : 4; }

}  // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"forward modeling and inversion for the acoustic-gravitational system"};
    app.require_subcommand(1);

    Common c;
    auto add_common = [&](CLI::App* sub, bool needs_scenario = true) {
        if (needs_scenario)
            sub->add_option("scenario", c.scenario_path, "scenario JSON file")->required();
        sub->add_option("--out", c.out, "output directory");
        sub->add_option("--seed", c.seed, "override the scenario seed");
        sub->add_option("--tol", c.tol, "override numerical tolerances");
        sub->add_option("--data", c.data_csv, "external slowness,R CSV (invert-interface)");
    };

    int (*handler)(const Common&) = nullptr;
    struct Sub {
        const char* name;
        const char* desc;
        int (*fn)(const Common&);
        bool needs_scenario;
    };
    const Sub subs[] = {
        {"trace", "trace ray fans and export CSV/JSONL/SVG", cmd_trace, true},
        {"gravity", "reference potential and hydrostatic pressure profiles", cmd_gravity, true},
        {"reflectivity", "interface symbol curves with Brewster/critical markers",
         cmd_reflectivity, true},
        {"synthesize", "reflection samples with optional noise", cmd_synthesize, true},
        {"invert-interface", "order-0/1 interface recovery report", cmd_invert_interface, true},
        {"invert-layers", "radial layer-stripping report", cmd_invert_layers, true},
        {"check-carleman", "Carleman inequality beta sweeps", cmd_check_carleman, true},
        {"verify", "run the full oracle/property suite", cmd_verify, false},
    };
    for (const auto& sub : subs) {
        CLI::App* sapp = app.add_subcommand(sub.name, sub.desc);
        add_common(sapp, sub.needs_scenario);
        sapp->callback([&handler, fn = sub.fn]() { handler = fn; });
    }

    std::vector<const char*> argv;
    argv.push_back("gravac");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        return handler ? handler(c) : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.error_class());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace gravac
