#include <doctest.h>

#include <cmath>

#include "gravac/errors.hpp"
#include "gravac/ucp.hpp"

using namespace gravac;

TEST_CASE("radial bump derivatives against finite differences") {
    auto u = RadialTestFunction::bump(0.3, 0.8, {1.0, -0.2, 0.4});
    const double h = 1e-5;
    for (double r : {0.35, 0.5, 0.62, 0.78}) {
        CHECK(u.du(r) == doctest::Approx((u.u(r + h) - u.u(r - h)) / (2 * h)).epsilon(1e-7));
        CHECK(u.d2u(r) ==
              doctest::Approx((u.du(r + h) - u.du(r - h)) / (2 * h)).epsilon(1e-7));
        CHECK(u.d3u(r) ==
              doctest::Approx((u.d2u(r + h) - u.d2u(r - h)) / (2 * h)).epsilon(1e-7));
        CHECK(u.d4u(r) ==
              doctest::Approx((u.d3u(r + h) - u.d3u(r - h)) / (2 * h)).epsilon(1e-6));
    }
    CHECK(u.u(0.29) == 0.0);
    CHECK(u.u(0.81) == 0.0);
    CHECK_THROWS_AS(RadialTestFunction::bump(-0.1, 0.5), PreconditionError);
}

TEST_CASE("Carleman sides") {
    auto u = RadialTestFunction::bump(0.35, 0.75);
    auto lap = [](const Vec3&) { return Mat3(Mat3::Identity()); };
    CarlemanConfig cfg;
    cfg.beta = 6.0;

    SUBCASE("zero function integrates to zero on both sides") {
        auto z = u.scaled(0.0);
        const auto s = carleman_sides_2nd(z, lap, cfg);
        CHECK(std::exp(s.log_lhs) == 0.0);
        CHECK(std::exp(s.log_rhs) == 0.0);
    }
    SUBCASE("scaling u by 2 scales both sides by 4 exactly") {
        const auto a = carleman_sides_2nd(u, lap, cfg);
        const auto b = carleman_sides_2nd(u.scaled(2.0), lap, cfg);
        CHECK(b.log_lhs - a.log_lhs == doctest::Approx(std::log(4.0)).epsilon(1e-13));
        CHECK(b.log_rhs - a.log_rhs == doctest::Approx(std::log(4.0)).epsilon(1e-13));
        const auto a4 = carleman_sides_4th(u, cfg);
        const auto b4 = carleman_sides_4th(u.scaled(2.0), cfg);
        CHECK(b4.log_lhs - a4.log_lhs == doctest::Approx(std::log(4.0)).epsilon(1e-13));
    }
    SUBCASE("rotating anisotropic coefficients leaves the integral unchanged") {
        const Mat3 A0 = Vec3(1.0, 2.0, 3.0).asDiagonal();
        Eigen::AngleAxisd rot(0.7, Vec3(1, 1, 0.5).normalized());
        const Mat3 A1 = rot.toRotationMatrix() * A0 * rot.toRotationMatrix().transpose();
        const auto s0 = carleman_sides_2nd(u, [&](const Vec3&) { return A0; }, cfg);
        const auto s1 = carleman_sides_2nd(u, [&](const Vec3&) { return A1; }, cfg);
        CHECK(s0.log_rhs == doctest::Approx(s1.log_rhs).epsilon(1e-12));
    }
    SUBCASE("ratio decays over the beta sweep") {
        double prev = 1e300;
        for (double beta : {4.0, 6.0, 8.0, 12.0, 16.0}) {
            cfg.beta = beta;
            const double r = carleman_sides_2nd(u, lap, cfg).ratio();
            CHECK(r > 0.0);
            CHECK(r < prev);
            prev = r;
        }
    }
    SUBCASE("beta out of the double exponent range is detected") {
        cfg.beta = 700.0;
        CHECK_THROWS_AS(carleman_sides_2nd(u, lap, cfg), NumericalError);
    }
    SUBCASE("support outside B_r0 is rejected") {
        CarlemanConfig tight;
        tight.r0 = 0.6;
        CHECK_THROWS_AS(carleman_sides_2nd(u, lap, tight), PreconditionError);
    }
}

TEST_CASE("the weight r^-beta psi^2 decreases in r") {
    const double beta = 5.0;
    double prev = 1e308;
    for (double r = 0.1; r < 1.0; r += 0.02) {
        // log of psi_tilde = 2 r^-beta - beta ln r
        const double cur = 2.0 * std::pow(r, -beta) - beta * std::log(r);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("estimate_beta0 finds the stabilization point") {
    auto u = RadialTestFunction::bump(0.35, 0.75);
    auto lap = [](const Vec3&) { return Mat3(Mat3::Identity()); };
    auto ratio_of = [&](double beta) {
        CarlemanConfig cfg;
        cfg.beta = beta;
        return carleman_sides_2nd(u, lap, cfg).ratio();
    };
    const double b0 = estimate_beta0(ratio_of, 16.0);
    CHECK(b0 >= 1.0);
    CHECK(b0 <= 16.0);
}

TEST_CASE("unique-continuation demonstration") {
    const std::vector<double> betas{4, 8, 16, 32};

    SUBCASE("zero fields are trivially below the envelope") {
        auto z = RadialTestFunction::bump(0.3, 0.5).scaled(0.0);
        const auto rep = ucp_propagation_demo(z, z, 0.1, 0.8, betas);
        CHECK(rep.satisfies_system);
        CHECK(rep.sup_half_ball == 0.0);
        CHECK(rep.below_envelope);
        CHECK_FALSE(rep.violation_detected);
    }
    SUBCASE("annulus-supported pair stays below the decaying bound") {
        // Fields vanish on the half ball; all energy sits in the annulus.
        auto w1 = RadialTestFunction::bump(0.45, 0.78);
        auto w2 = RadialTestFunction::bump(0.5, 0.75, {1.0, 0.5});
        const auto rep = ucp_propagation_demo(w1, w2, 0.1, 0.8, betas);
        CHECK(rep.satisfies_system);
        CHECK(rep.sup_half_ball == 0.0);
        CHECK(rep.below_envelope);
        // The envelope itself decays like 1/beta^2.
        CHECK(rep.envelope.back().second < rep.envelope.front().second);
    }
    SUBCASE("a pair violating the system inside the half ball is flagged") {
        // Support pokes into B_{r_tilde/2}: near its inner edge the
        // biharmonic stays finite while the lower-order energy vanishes.
        auto w1 = RadialTestFunction::bump(0.2, 0.78);
        auto w2 = RadialTestFunction::bump(0.25, 0.7);
        const auto rep = ucp_propagation_demo(w1, w2, 0.1, 0.8, betas);
        CHECK(rep.violation_detected);
    }
}
