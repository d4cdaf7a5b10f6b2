#include <doctest.h>

#include <random>

#include "gravac/gravity.hpp"

using namespace gravac;

TEST_CASE("uniform ball matches the analytic Newtonian potential") {
    Medium ball = layered_ball({1.0}, {1.0}, {1.0});
    auto g = solve_phi_radial(ball, 1.0);
    const auto* rg = dynamic_cast<const RadialGravity*>(g.get());
    for (double r : {0.1, 0.4, 0.7, 0.999}) {
        CHECK(rg->phi_r(r) == doctest::Approx(r * r / 6.0 - 0.5).epsilon(1e-9));
        CHECK(rg->dphi_r(r) == doctest::Approx(r / 3.0).epsilon(1e-9));
    }
    for (double r : {1.001, 1.5, 1.9})
        CHECK(rg->phi_r(r) == doctest::Approx(-1.0 / (3.0 * r)).epsilon(1e-9));
    CHECK(g->grad(Vec3::Zero()).norm() == 0.0);
}

TEST_CASE("near-vacuum density gives a near-zero potential") {
    Medium ball = layered_ball({1.0}, {1e-14}, {1.0});
    auto g = solve_phi_radial(ball, 1.0);
    CHECK(std::abs(g->phi(Vec3(0.5, 0, 0))) <= 1e-13);
    CHECK(g->grad(Vec3(0.5, 0, 0)).norm() <= 1e-13);
}

TEST_CASE("two-shell density obeys superposition") {
    // (rho1 everywhere inside R1) + (rho2 added inside R2) equals the sum of
    // two uniform balls.
    const double rho1 = 0.8, rho2 = 1.4, R1 = 1.0, R2 = 0.5;
    Medium shells = layered_ball({R1, R2}, {rho1, rho1 + rho2}, {1.0, 1.0});
    Medium ball1 = layered_ball({R1}, {rho1}, {1.0});
    Medium ball2 = layered_ball({R2}, {rho2}, {1.0});
    auto g = solve_phi_radial(shells, 1.0);
    auto g1 = solve_phi_radial(ball1, 1.0);
    auto g2 = solve_phi_radial(ball2, 1.0);
    for (double r : {0.2, 0.5, 0.8, 1.2}) {
        const Vec3 x(r, 0, 0);
        CHECK(g->phi(x) == doctest::Approx(g1->phi(x) + g2->phi(x)).epsilon(1e-9));
    }
}

TEST_CASE("hydrostatic pressure of the uniform ball") {
    Medium ball = layered_ball({1.0}, {1.0}, {1.0});
    auto g = solve_phi_radial(ball, 1.0);
    auto hp = hydrostatic_pressure(ball, *g);
    for (double r : {0.0, 0.3, 0.6, 0.9})
        CHECK(hp.p0(r) == doctest::Approx((1.0 - r * r) / 6.0).epsilon(1e-8));
    CHECK(hp.p0(1.2) == 0.0);
    // dp0/dr = -rho dPhi/dr and monotone decreasing for rho >= 0.
    const auto* rg = dynamic_cast<const RadialGravity*>(g.get());
    for (double r : {0.2, 0.5, 0.8}) {
        CHECK(hp.dp0(r) == doctest::Approx(-rg->dphi_r(r)).epsilon(1e-10));
        CHECK(hp.p0(r + 0.05) < hp.p0(r));
    }
}

TEST_CASE("interface continuity and the second-derivative jump") {
    Medium ball = layered_ball({1.0, 0.5}, {1.0, 2.5}, {1.0, 1.0});
    auto g = solve_phi_radial(ball, 1.0);
    const auto* rg = dynamic_cast<const RadialGravity*>(g.get());
    const double eps = 1e-8;
    for (double R : {0.5, 1.0}) {
        CHECK(std::abs(rg->phi_r(R + eps) - rg->phi_r(R - eps)) <= 1e-7);
        CHECK(std::abs(rg->dphi_r(R + eps) - rg->dphi_r(R - eps)) <= 1e-7);
    }
    // [Phi''] = k0 [rho]; at r=0.5 the jump outer-minus-inner is 1.0 - 2.5.
    const double jump = rg->d2phi_r(0.5, Side::Minus) - rg->d2phi_r(0.5, Side::Plus);
    CHECK(jump == doctest::Approx(1.0 - 2.5).epsilon(1e-9));
}

TEST_CASE("grid solver basics") {
    Medium ball = layered_ball({1.0}, {1.0}, {1.0});
    GridSpec spec;
    spec.n = 32;
    spec.extent = 2.0;
    auto g = solve_phi_grid(ball, spec, 1.0);

    SUBCASE("point-symmetric density has zero gradient at the center") {
        CHECK(g->grad(Vec3::Zero()).norm() <= 1e-3);
    }
    SUBCASE("discrete Laplacian consistency off the interface") {
        double worst = 0;
        for (const Vec3& x : {Vec3(0.2, 0.1, 0.0), Vec3(0.5, -0.3, 0.2), Vec3(0.1, 0.2, 0.4)})
            worst = std::max(worst, std::abs(g->hess(x).trace() - 1.0));
        CHECK(worst <= 0.05);
        CHECK(std::abs(g->hess(Vec3(1.6, 0.2, 0.1)).trace()) <= 0.05);
    }
    SUBCASE("agrees with the radial solver") {
        auto rad = solve_phi_radial(ball, 1.0);
        double worst = 0;
        for (double x = -1.5; x <= 1.5; x += 0.25)
            worst = std::max(worst,
                             std::abs(g->phi(Vec3(x, 0.1, 0.0)) - rad->phi(Vec3(x, 0.1, 0.0))));
        CHECK(worst <= 2e-2);
    }
    SUBCASE("thin shells are rejected as too coarse") {
        Medium thin = layered_ball({1.0, 0.9}, {1.0, 2.0}, {1.0, 1.0});
        GridSpec coarse;
        coarse.n = 16;
        coarse.extent = 2.0;
        CHECK_THROWS_AS(solve_phi_grid(thin, coarse, 1.0), PreconditionError);
    }
}

TEST_CASE("self-gravitation principal symbol") {
    const Mat3 b = selfgrav_symbol_b0(Vec3(0, 0, 1), 1.0);
    Mat3 expect = Mat3::Zero();
    expect(2, 2) = -1.0;
    CHECK((b - expect).norm() <= 1e-15);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 10; ++k) {
        const Vec3 xi = Vec3(u(rng), u(rng), u(rng)).normalized() * (0.5 + std::abs(u(rng)));
        const double k0 = 1.0 + std::abs(u(rng));
        const Vec3 N = xi.normalized();
        CHECK(N.dot(selfgrav_symbol_b0(xi, k0) * N) == doctest::Approx(-k0).epsilon(1e-14));
        CHECK((selfgrav_symbol_b0(2.0 * xi, k0) - selfgrav_symbol_b0(xi, k0)).norm() <= 1e-14);
    }
    CHECK_THROWS_AS(selfgrav_symbol_b0(Vec3::Zero(), 1.0), PreconditionError);
}

TEST_CASE("off-center ball exercises the multipole box faces") {
    const Vec3 center(0.4, -0.2, 0.1);
    std::vector<Region> regs;
    regs.push_back({std::make_shared<ConstantField>(1e-14), std::make_shared<ConstantField>(1.0),
                    "out"});
    regs.push_back({std::make_shared<ConstantField>(1.0), std::make_shared<ConstantField>(1.0),
                    "ball"});
    Interface sph = sphere_interface(0.8, "off");
    sph.kind = Interface::Kind::LevelSet;
    sph.level = [center](const Vec3& x) { return (x - center).norm() - 0.8; };
    sph.level_grad = [center](const Vec3& x) { return Vec3((x - center).normalized()); };
    Medium m(std::move(regs), {sph}, 2.5);

    GridSpec spec;
    spec.n = 32;
    spec.extent = 2.2;
    spec.support_radius = 1.5;
    auto g = solve_phi_grid(m, spec, 1.0);
    auto exact = [&](const Vec3& x) {
        const double r = (x - center).norm();
        const double R = 0.8;
        return r <= R ? (r * r - 3.0 * R * R) / 6.0 : -R * R * R / (3.0 * r);
    };
    double worst = 0;
    for (const Vec3& q : {Vec3(0.4, -0.2, 0.1), Vec3(1.0, 0.3, -0.4), Vec3(-0.9, 0.5, 0.3)})
        worst = std::max(worst, std::abs(g->phi(q) - exact(q)));
    CHECK(worst <= 8e-3);
}
