#include <doctest.h>

#include <cmath>

#include "gravac/amplitudes.hpp"
#include "gravac/rays.hpp"

using namespace gravac;

namespace {

Medium smooth_radial() {
    std::vector<Region> regs;
    regs.push_back({std::make_shared<RadialField>(radial_poly({1.2, 0.0, -0.25})),
                    std::make_shared<RadialField>(radial_poly({1.0, 0.0, 0.2})), "bulk"});
    Medium m(std::move(regs), {}, 2.0);
    m.set_radial(true);
    return m;
}

}  // namespace

TEST_CASE("constant speed gives straight rays and Euclidean travel time") {
    Medium m = homogeneous_medium(1.0, 1.0, 4.0);
    TraceOptions opt;
    opt.max_s = 3.0;
    opt.stop_at_domain = false;
    RayPath p = trace(m, nullptr, make_onshell(m, Vec3(-1, 0.2, 0), Vec3(1, 0, 0), 2.0), opt);
    CHECK((p.end().x - Vec3(2.0, 0.2, 0)).norm() <= 1e-9);
    CHECK(travel_time(p) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("Snell refraction at a plane interface") {
    Medium m = halfspace_medium(1.0, 1.0, 1.0, 2.0);
    const double tau = 1.0;

    SUBCASE("20 degree incidence refracts to 43.160 degrees") {
        const double a = 20.0 * M_PI / 180.0;
        const Vec3 dir(std::sin(a), 0, 1.0);  // toward the plus side (below)
        // Note: plus side is z < 0 for psi = z; send the ray downward.
        const Vec3 x0(0, 0, 0.5);
        RayPath p = trace(m, nullptr,
                          make_onshell(m, x0, Vec3(std::sin(a), 0, -std::cos(a)), tau), {});
        REQUIRE(p.events.size() >= 1);
        const auto& ev = p.events.front();
        REQUIRE(ev.transmitted.has_value());
        const Vec3 nt = ev.transmitted->xi.normalized();
        const double theta_t = std::asin(std::hypot(nt[0], nt[1]));
        CHECK(theta_t * 180.0 / M_PI == doctest::Approx(43.1601697).epsilon(1e-6));
        (void)dir;
    }
    SUBCASE("critical incidence is flagged, no transmitted branch") {
        const double a = 30.0 * M_PI / 180.0;  // asin(c-/c+) exactly
        RayPath p = trace(m, nullptr,
                          make_onshell(m, Vec3(0, 0, 0.5), Vec3(std::sin(a), 0, -std::cos(a)), tau),
                          {});
        REQUIRE(!p.events.empty());
        CHECK(p.events.front().kind == EventKind::Glancing);
    }
    SUBCASE("post-critical incidence reflects totally") {
        const double a = 40.0 * M_PI / 180.0;
        RayPath p = trace(m, nullptr,
                          make_onshell(m, Vec3(0, 0, 0.5), Vec3(std::sin(a), 0, -std::cos(a)), tau),
                          {});
        REQUIRE(!p.events.empty());
        CHECK(p.events.front().kind == EventKind::Reflection);
        CHECK_FALSE(p.events.front().transmitted.has_value());
    }
}

TEST_CASE("snell_refract normal and matched cases") {
    Medium m = halfspace_medium(1.0, 1.0, 3.0, 2.0);
    const auto frame = interface_frame(m, Vec3(0.2, -0.1, 0));
    PhasePoint inc;
    inc.tau = 1.0;

    SUBCASE("normal incidence") {
        inc.x = Vec3(0.2, -0.1, 0);
        inc.xi = Vec3(0, 0, -1.0);  // |xi| = tau / c_minus
        const auto sr = snell_refract(inc, frame);
        CHECK((sr.reflected.xi - Vec3(0, 0, 1.0)).norm() <= 1e-14);
        REQUIRE(sr.transmitted.has_value());
        CHECK(sr.transmitted->xi[2] == doctest::Approx(-0.5));  // tau / c_plus
    }
    SUBCASE("matched media transmit unchanged") {
        Medium mm = halfspace_medium(1.0, 1.3, 1.0, 1.3);
        const auto fr = interface_frame(mm, Vec3(0, 0, 0));
        PhasePoint i2;
        i2.tau = 1.3 * 0.9;  // any on-shell scale
        i2.x = Vec3(0, 0, 0);
        i2.xi = Vec3(0.3, 0.1, -0.8).normalized() * (i2.tau / 1.3);
        const auto sr = snell_refract(i2, fr);
        REQUIRE(sr.transmitted.has_value());
        CHECK((sr.transmitted->xi - i2.xi).norm() <= 1e-12);
    }
    SUBCASE("tangential incidence throws") {
        inc.x = Vec3(0.2, -0.1, 0);
        inc.xi = Vec3(1.0, 0, 1e-9);
        CHECK_THROWS_AS(snell_refract(inc, frame), PreconditionError);
    }
}

TEST_CASE("covector classification") {
    MediumEval minus, plus;
    minus.rho = 1.0;
    minus.c = 1.5;
    plus.rho = 2.0;
    plus.c = 1.0;
    SUBCASE("Brewster slowness from the closed form") {
        auto b = brewster_slowness(1.0, 1.5, 2.0, 1.0);
        REQUIRE(b.has_value());
        CHECK(*b == doctest::Approx(0.50917507721).epsilon(1e-9));
        CHECK(classify_covector(minus, plus, 1.0, *b) == CovectorClass::Brewster);
    }
    SUBCASE("equal densities have no Brewster direction") {
        CHECK_FALSE(brewster_slowness(1.0, 1.5, 1.0, 1.0).has_value());
    }
    SUBCASE("glancing on the minus side") {
        CHECK(classify_covector(minus, plus, 1.0, 1.0 / 1.5) == CovectorClass::GlancingMinus);
    }
    SUBCASE("post-critical") {
        CHECK(classify_covector(minus, plus, 1.0, 0.9) == CovectorClass::PostCriticalMinus);
    }
    SUBCASE("zero frequency rejected") {
        CHECK_THROWS_AS(classify_covector(minus, plus, 0.0, 0.1), PreconditionError);
    }
}

TEST_CASE("diametral travel time through c = 2 - r") {
    Medium m = radial_medium(radial_linear(1, 0), radial_linear(2, -1), 1.0, 1.4);
    TraceOptions opt;
    opt.max_s = 2.1;
    opt.stop_at_domain = false;
    RayPath p = trace(m, nullptr, make_onshell(m, Vec3(-1.0 + 1e-12, 0, 0), Vec3(1, 0, 0), 1.0),
                      opt);
    // Straight diametral chord: t = 2 int_0^1 dr/(2-r) = 2 ln 2, read off
    // at the far-side interface event.
    REQUIRE(!p.events.empty());
    const double t_at_exit = p.events.front().incident.t;
    CHECK(t_at_exit == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-4));

    SUBCASE("geodesic distance via shooting agrees") {
        const double d = geodesic_distance(m, Vec3(-0.999, 0, 0), Vec3(0.999, 0, 0), 1.0, 1e-8);
        const double exact = 2.0 * std::log(2.0 / 1.001);
        CHECK(d == doctest::Approx(exact).epsilon(1e-4));
    }
}

TEST_CASE("integrator self-consistency across tolerances") {
    Medium m = smooth_radial();
    const PhasePoint p0 = make_onshell(m, Vec3(-1.5, 0.4, 0.1), Vec3(1, -0.2, 0).normalized(), 1.0);
    TraceOptions t1, t2;
    t1.max_s = t2.max_s = 2.0;
    t1.stop_at_domain = t2.stop_at_domain = false;
    t1.rel_tol = 1e-8;
    t2.rel_tol = 1e-10;
    RayPath a = trace(m, nullptr, p0, t1);
    RayPath b = trace(m, nullptr, p0, t2);
    CHECK(std::abs(travel_time(a) - travel_time(b)) <= 1e-7);
    CHECK((a.end().x - b.end().x).norm() <= 1e-7);
}

TEST_CASE("on-shell residual and tangential conservation") {
    Medium m = layered_ball({1.0, 0.5}, {1.0, 2.0}, {1.0, 1.3}, 1.0, 1.0, 2.0);
    const double tau = 3.0;
    RayPath p = trace(m, nullptr,
                      make_onshell(m, Vec3(-1.8, 0.3, 0.0), Vec3(1, -0.1, 0).normalized(), tau),
                      {});
    for (const auto& seg : p.segments)
        for (const auto& s : seg.samples) {
            if (s.p.x.norm() > m.domain_radius()) continue;
            const auto e = m.eval_region(s.p.x, seg.region);
            CHECK(std::abs(tau * tau - e.c * e.c * s.p.xi.squaredNorm()) <= 1e-8 * tau * tau);
        }
    for (const auto& ev : p.events) {
        if (ev.kind == EventKind::Exit) continue;
        const Vec3 nu = m.interfaces()[ev.interface_id].normal(ev.incident.x);
        const Vec3 inc_tan = ev.incident.xi - ev.incident.xi.dot(nu) * nu;
        if (ev.transmitted) {
            const Vec3 t_tan = ev.transmitted->xi - ev.transmitted->xi.dot(nu) * nu;
            CHECK((inc_tan - t_tan).norm() <= 1e-12 * tau);
        }
        const Vec3 r_tan = ev.reflected->xi - ev.reflected->xi.dot(nu) * nu;
        CHECK((inc_tan - r_tan).norm() <= 1e-12 * tau);
    }
}

TEST_CASE("time reversal returns to the start") {
    Medium m = smooth_radial();
    const PhasePoint p0 = make_onshell(m, Vec3(-1.4, 0.5, -0.2), Vec3(1, -0.3, 0.1).normalized(),
                                       1.0);
    TraceOptions opt;
    opt.max_s = 1.7;
    opt.stop_at_domain = false;
    RayPath fwd = trace(m, nullptr, p0, opt);
    PhasePoint back = fwd.end();
    back.xi = -back.xi;
    RayPath rev = trace(m, nullptr, back, opt);
    CHECK((rev.end().x - p0.x).norm() <= 1e-7);
    CHECK((rev.end().xi + p0.xi).norm() <= 1e-7);
}

TEST_CASE("paraxial propagator against a traced bundle") {
    Medium m = smooth_radial();
    const PhasePoint p0 = make_onshell(m, Vec3(-1.3, 0.2, 0.0), Vec3(1, 0.1, 0.05).normalized(),
                                       1.0);
    TraceOptions opt;
    opt.max_s = 1.5;
    opt.stop_at_domain = false;
    RayPath p = trace(m, nullptr, p0, opt);
    const auto tr = transport_alpha0(p, m, 1.0, 0.0);
    // Jacobian-route spreading exp(int divN) versus the 4-ray bundle.
    double i_divn = 0.0;
    for (size_t i = 1; i < tr.samples.size(); ++i)
        i_divn += 0.5 * (tr.samples[i].div_N + tr.samples[i - 1].div_N) *
                  (tr.samples[i].s - tr.samples[i - 1].s);
    const double spread_jac = std::exp(i_divn);
    const double spread_fd = bundle_spreading_fd(m, p0, 1.5, 1e-4, 0.0);
    CHECK(std::abs(spread_fd / spread_jac - 1.0) <= 0.01);
    // Determinant of the propagator stays positive along the way.
    for (const auto& s : p.segments.front().samples) CHECK(s.propagator.determinant() > 0.0);
}

TEST_CASE("event transfer matrices match finite differences of the traced map") {
    auto check_medium = [](const Medium& m, const Vec3& x0, const Vec3& dir) {
        const double tau = 1.0;
        const double s_eval = 1.2;
        TraceOptions opt;
        opt.max_s = s_eval;
        opt.stop_at_domain = false;
        const PhasePoint p0 = make_onshell(m, x0, dir, tau);
        RayPath base = trace(m, nullptr, p0, opt);
        REQUIRE(base.segments.size() == 2);
        const Mat6 J_analytic = base.segments[1].back().propagator *
                                base.events[0].transmitted_map *
                                base.segments[0].back().propagator;

        Mat6 J_fd;
        const double h = 1e-6;
        for (int col = 0; col < 6; ++col) {
            PhasePoint pp = p0, pm = p0;
            if (col < 3) {
                pp.x[col] += h;
                pm.x[col] -= h;
            } else {
                pp.xi[col - 3] += h;
                pm.xi[col - 3] -= h;
            }
            pp.tau = m.eval(pp.x).c * pp.xi.norm();
            pm.tau = m.eval(pm.x).c * pm.xi.norm();
            RayPath rp = trace(m, nullptr, pp, opt);
            RayPath rm = trace(m, nullptr, pm, opt);
            const PhasePoint qp = rp.at(s_eval), qm = rm.at(s_eval);
            for (int row = 0; row < 3; ++row) {
                J_fd(row, col) = (qp.x[row] - qm.x[row]) / (2 * h);
                J_fd(row + 3, col) = (qp.xi[row] - qm.xi[row]) / (2 * h);
            }
        }
        CHECK((J_analytic - J_fd).norm() / J_fd.norm() <= 5e-3);
    };
    SUBCASE("plane interface") {
        check_medium(halfspace_medium(1.0, 1.0, 1.2, 1.3), Vec3(0.1, -0.2, 0.8),
                     Vec3(0.25, 0.1, -1).normalized());
    }
    SUBCASE("sphere interface") {
        check_medium(layered_ball({1.0}, {1.1, } , {1.25}, 1.0, 1.0, 3.0), Vec3(-1.8, 0.3, 0.1),
                     Vec3(1, -0.12, 0).normalized());
    }
}

TEST_CASE("tangential start direction is rejected") {
    Medium m = layered_ball({1.0}, {2.0}, {1.5});
    CHECK_THROWS_AS(
        trace(m, nullptr, make_onshell(m, Vec3(1.0, 0, 0), Vec3(0, 1, 0), 1.0), {}),
        PreconditionError);
}

TEST_CASE("transmitted paraxial map with a far-side speed gradient") {
    // Plane interface; the transmitted region has radially varying speed,
    // so the event map's speed-gradient terms are exercised.
    std::vector<Region> regs;
    regs.push_back({std::make_shared<ConstantField>(1.0), std::make_shared<ConstantField>(1.1),
                    "top"});
    regs.push_back({std::make_shared<ConstantField>(1.0),
                    std::make_shared<RadialField>(radial_poly({1.3, 0.0, 0.12})), "bottom"});
    Medium m(std::move(regs), {plane_interface(Vec3(0, 0, 1), 0.0)}, 5.0);

    const double s_eval = 1.1;
    TraceOptions opt;
    opt.max_s = s_eval;
    opt.stop_at_domain = false;
    const PhasePoint p0 =
        make_onshell(m, Vec3(0.2, -0.1, 0.6), Vec3(0.3, 0.15, -1).normalized(), 1.0);
    RayPath base = trace(m, nullptr, p0, opt);
    REQUIRE(base.segments.size() == 2);
    const Mat6 J_analytic = base.segments[1].back().propagator *
                            base.events[0].transmitted_map *
                            base.segments[0].back().propagator;
    Mat6 J_fd;
    const double h = 1e-6;
    for (int col = 0; col < 6; ++col) {
        PhasePoint pp = p0, pm = p0;
        if (col < 3) {
            pp.x[col] += h;
            pm.x[col] -= h;
        } else {
            pp.xi[col - 3] += h;
            pm.xi[col - 3] -= h;
        }
        pp.tau = m.eval(pp.x).c * pp.xi.norm();
        pm.tau = m.eval(pm.x).c * pm.xi.norm();
        RayPath rp = trace(m, nullptr, pp, opt);
        RayPath rm = trace(m, nullptr, pm, opt);
        const PhasePoint qp = rp.at(s_eval), qm = rm.at(s_eval);
        for (int row = 0; row < 3; ++row) {
            J_fd(row, col) = (qp.x[row] - qm.x[row]) / (2 * h);
            J_fd(row + 3, col) = (qp.xi[row] - qm.xi[row]) / (2 * h);
        }
    }
    CHECK((J_analytic - J_fd).norm() / J_fd.norm() <= 5e-3);
}
