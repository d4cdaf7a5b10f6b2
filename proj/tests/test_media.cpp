#include <doctest.h>

#include <random>

#include "gravac/media.hpp"

using namespace gravac;

namespace {

// Central finite differences of a field against its analytic derivatives.
void check_field_derivatives(const RegionField& f, const Vec3& x, double tol_g, double tol_h) {
    const double h = 1e-4;
    Vec3 g_fd;
    Mat3 h_fd;
    for (int a = 0; a < 3; ++a) {
        Vec3 e = Vec3::Zero();
        e[a] = 1;
        g_fd[a] = (f.value(x + h * e) - f.value(x - h * e)) / (2 * h);
        for (int b = 0; b < 3; ++b) {
            Vec3 eb = Vec3::Zero();
            eb[b] = 1;
            h_fd(a, b) = (f.value(x + h * e + h * eb) - f.value(x + h * e - h * eb) -
                          f.value(x - h * e + h * eb) + f.value(x - h * e - h * eb)) /
                         (4 * h * h);
        }
    }
    CHECK((f.gradient(x) - g_fd).norm() <= tol_g);
    CHECK((f.hessian(x) - h_fd).norm() <= tol_h);
}

}  // namespace

TEST_CASE("constant medium evaluates trivially") {
    Medium m = homogeneous_medium(1.0, 1.0);
    const auto e = eval_medium(m, Vec3(0.3, -0.2, 0.1));
    CHECK(e.rho == 1.0);
    CHECK(e.c == 1.0);
    CHECK(e.kappa == 1.0);
    CHECK(e.grad_rho.norm() == 0.0);
    CHECK(e.hess_c.norm() == 0.0);
}

TEST_CASE("one-sided limits across a sphere interface") {
    // rho = 1 inside, 2 outside.
    Medium m = layered_ball({1.0}, {1.0}, {1.0}, 2.0, 1.0);
    const Vec3 x(1.0, 0.0, 0.0);
    CHECK(eval_medium(m, x, Side::Minus).rho == doctest::Approx(2.0));
    CHECK(eval_medium(m, x, Side::Plus).rho == doctest::Approx(1.0));
    CHECK_THROWS_AS(eval_medium(m, x), PreconditionError);
    CHECK_THROWS_AS(eval_medium(m, Vec3(5, 0, 0)), PreconditionError);
}

TEST_CASE("radial profile c = 2 - r") {
    Medium m = radial_medium(radial_linear(1.0, 0.0), radial_linear(2.0, -1.0), 1.0);
    const Vec3 x(0.5, 0.0, 0.0);
    const auto e = eval_medium(m, x);
    CHECK(e.c == doctest::Approx(1.5));
    CHECK(e.grad_c.dot(Vec3(1, 0, 0)) == doctest::Approx(-1.0));
    CHECK(e.grad_c.norm() == doctest::Approx(1.0));
}

TEST_CASE("field derivatives match finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    PolynomialField poly({{2, 1, 0, 0.3}, {0, 0, 3, -0.2}, {1, 1, 1, 0.5}, {0, 2, 0, 1.0}});
    RadialField rad(radial_poly({1.0, 0.2, -0.3, 0.05}));
    RadialField spl(radial_spline({0.0, 0.3, 0.6, 0.9, 1.3}, {1.0, 1.1, 0.9, 1.2, 1.0}));
    CompactBumpField bump(0.8, Vec3(0.1, 0, 0), 0.5);
    for (int k = 0; k < 10; ++k) {
        const Vec3 x(u(rng), u(rng), u(rng));
        check_field_derivatives(poly, x, 1e-7, 1e-5);
        if (x.norm() > 0.05) {
            check_field_derivatives(rad, x, 1e-7, 1e-5);
            check_field_derivatives(bump, x, 1e-5, 1e-3);
        }
    }
    // Spline derivatives away from knots.
    check_field_derivatives(spl, Vec3(0.42, 0.2, 0.1), 1e-7, 1e-5);
}

TEST_CASE("kappa is assembled as rho c^2 on both sides") {
    Medium m = layered_ball({1.0, 0.6}, {1.3, 2.1}, {0.9, 1.4});
    for (const Vec3& x : {Vec3(1.0, 0, 0), Vec3(0.6, 0, 0)}) {
        for (Side s : {Side::Minus, Side::Plus}) {
            const auto e = eval_medium(m, x, s);
            CHECK(e.kappa == doctest::Approx(e.rho * e.c * e.c).epsilon(1e-14));
        }
    }
}

TEST_CASE("sides agree where the jump vanishes") {
    Medium m = layered_ball({1.0}, {1.0}, {1.0}, 1.0, 1.0);
    const Vec3 x(0, 1.0, 0);
    CHECK(eval_medium(m, x, Side::Minus).rho == eval_medium(m, x, Side::Plus).rho);
    CHECK(eval_medium(m, x, Side::Minus).c == eval_medium(m, x, Side::Plus).c);
}

TEST_CASE("interface frames") {
    SUBCASE("sphere") {
        Medium m = layered_ball({1.0}, {1.0}, {1.5});
        const auto f = interface_frame(m, Vec3(1, 0, 0));
        CHECK((f.nu - Vec3(1, 0, 0)).norm() <= 1e-14);
        CHECK(std::abs(f.t1.dot(f.nu)) <= 1e-14);
        CHECK((f.t1.cross(f.t2) - f.nu).norm() <= 1e-12);
        CHECK(f.plus.c == doctest::Approx(1.5));
        CHECK_THROWS_AS(interface_frame(m, Vec3(0.5, 0, 0)), PreconditionError);
    }
    SUBCASE("plane") {
        Medium m = halfspace_medium(1, 1, 2, 2);
        const auto f = interface_frame(m, Vec3(0.3, -0.2, 0.0));
        CHECK((f.nu - Vec3(0, 0, 1)).norm() <= 1e-14);
    }
    SUBCASE("ellipsoid level set checked against finite differences") {
        Interface ell;
        ell.kind = Interface::Kind::LevelSet;
        ell.level = [](const Vec3& x) {
            return x[0] * x[0] / 1.44 + x[1] * x[1] / 1.0 + x[2] * x[2] / 0.64 - 1.0;
        };
        ell.level_grad = [](const Vec3& x) {
            return Vec3(2 * x[0] / 1.44, 2 * x[1], 2 * x[2] / 0.64);
        };
        std::vector<Region> regs;
        regs.push_back({std::make_shared<ConstantField>(1.0),
                        std::make_shared<ConstantField>(1.0), "out"});
        regs.push_back({std::make_shared<ConstantField>(2.0),
                        std::make_shared<ConstantField>(1.0), "in"});
        Medium m(std::move(regs), {ell}, 3.0);
        const Vec3 x(1.2 * std::sqrt(0.5), 0.0, 0.8 * std::sqrt(0.5));
        const auto f = interface_frame(m, x);
        const double h = 1e-6;
        Vec3 g_fd;
        for (int a = 0; a < 3; ++a) {
            Vec3 e = Vec3::Zero();
            e[a] = 1;
            g_fd[a] = (ell.level(x + h * e) - ell.level(x - h * e)) / (2 * h);
        }
        CHECK((f.nu - g_fd.normalized()).norm() <= 1e-8);
    }
}

TEST_CASE("radial foliation checks") {
    SUBCASE("c = 2 - r satisfies Herglotz") {
        Medium m = radial_medium(radial_linear(1, 0), radial_linear(2, -1), 1.0);
        CHECK(check_foliation_radial(m).satisfied);
    }
    SUBCASE("c = 1/(2-r) satisfied on the unit ball") {
        Medium m = radial_medium(radial_linear(1, 0), radial_rational(1, 2, -1), 1.0);
        CHECK(check_foliation_radial(m).satisfied);
    }
    SUBCASE("c = 1/(2-r) violated beyond r = 1") {
        Medium m = radial_medium(radial_linear(1, 0), radial_rational(1, 2, -1), 1.5, 1.8);
        const auto rep = check_foliation_radial(m);
        CHECK_FALSE(rep.satisfied);
        CHECK(rep.violations.front().r > 1.0);
    }
    SUBCASE("constant speed ball satisfied") {
        Medium m = layered_ball({1.0}, {2.0}, {0.7});
        CHECK(check_foliation_radial(m).satisfied);
    }
    SUBCASE("inner layer faster than outer violates the jump condition") {
        Medium m = layered_ball({1.0, 0.5}, {1.0, 1.0}, {1.0, 1.8});
        CHECK_FALSE(check_foliation_radial(m).satisfied);
    }
    SUBCASE("non-radial medium is rejected") {
        Medium m = halfspace_medium(1, 1, 2, 2);
        CHECK_THROWS_AS(check_foliation_radial(m), PreconditionError);
    }
}
