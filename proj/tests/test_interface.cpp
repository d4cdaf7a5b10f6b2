#include <doctest.h>

#include <random>

#include "gravac/amplitudes.hpp"
#include "gravac/interface_symbols.hpp"

using namespace gravac;

TEST_CASE("principal symbols at simple configurations") {
    SUBCASE("matched media") {
        InterfaceSides sd{1.3, 0.9, 1.3, 0.9};
        CHECK(principal_R(sd, 1.0, 0.3) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(principal_T(sd, 1.0, 0.3) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("normal incidence reduces to the impedance contrast") {
        InterfaceSides sd{1000, 1500, 2000, 3000};
        CHECK(principal_R(sd, 1.0, 0.0) == doctest::Approx(0.6).epsilon(1e-14));
    }
    SUBCASE("vertical slowness value") {
        // c = 1.5, |eta'|/tau = 0.5: xi_3/tau = sqrt(1/2.25 - 0.25) = 0.44096.
        CHECK(vertical_xi(1.5, 1.0, 0.5) == doctest::Approx(0.4409585518).epsilon(1e-9));
    }
    SUBCASE("post-critical and glancing rejected") {
        CHECK_THROWS_AS(vertical_xi(2.0, 1.0, 0.7), PreconditionError);
        CHECK_THROWS_AS(vertical_xi(2.0, 1.0, 0.5), PreconditionError);
    }
}

TEST_CASE("Brewster zero and boundedness of the reflection symbol") {
    InterfaceSides sd{1.0, 1.5, 2.0, 1.0};
    const double b = 0.5091750772173156;
    CHECK(std::abs(principal_R(sd, 2.0, b * 2.0)) <= 1e-10);
    // rho_+ xi_I3 = rho_- xi_T3 = 0.8607 tau there.
    CHECK(sd.rho_p * vertical_xi(sd.c_m, 1.0, b) == doctest::Approx(0.860663).epsilon(1e-6));
    for (int i = 0; i <= 50; ++i) {
        const double p = 0.95 * i / 50.0;  // both sides sub-critical up to 1/1.5
        if (p >= 1.0 / sd.c_m || p >= 1.0 / sd.c_p) continue;
        CHECK(std::abs(principal_R(sd, 1.0, p)) <= 1.0 + 1e-12);
        CHECK(principal_T(sd, 1.0, p) > 0.0);
    }
}

TEST_CASE("order-J transmission system") {
    InterfaceSides sd{1.0, 1.0, 2.0, 1.5};
    const double tau = 1.0, eta = 0.3;
    const Mat2c M = transmission_matrix(sd, tau, eta);

    SUBCASE("J = 0 with unit incident amplitude reproduces the principal symbols") {
        const Vec2c rhs = order_J_rhs(sd, tau, eta, 1.0);
        const Vec2c sol = solve_order_J(M, rhs);
        CHECK(std::abs(sol[0] - Complex(principal_R(sd, tau, eta))) <= 1e-14);
        CHECK(std::abs(sol[1] - Complex(principal_T(sd, tau, eta))) <= 1e-14);
    }
    SUBCASE("linearity in the right-hand side") {
        const Vec2c r1 = order_J_rhs(sd, tau, eta, 0.7, Complex(0.1, 0.2), Complex(0, -0.3));
        const Vec2c r2 = order_J_rhs(sd, tau, eta, -0.2, Complex(0.0, 0.1), Complex(0.4, 0));
        const Vec2c a = solve_order_J(M, r1), b2 = solve_order_J(M, r2);
        const Vec2c ab = solve_order_J(M, r1 + r2);
        CHECK((ab - (a + b2)).norm() <= 1e-13);
    }
    SUBCASE("homogeneous half-spaces give zero order -1 reflection") {
        InterfaceJets jets;  // all jets zero
        CHECK(std::abs(reflect_amp_minus1(sd, jets, tau, {eta, 0.0})) == 0.0);
    }
}

TEST_CASE("order -1 reflection value term by term") {
    InterfaceSides sd{1.0, 1.0, 2.0, 1.5};
    const double tau = 1.0;
    const Complex D = transmission_det(sd, tau, 0.0);
    const double aT0 = principal_T(sd, tau, 0.0);

    SUBCASE("density jet alone at normal incidence") {
        InterfaceJets jets;
        jets.dnu_log_sqrt_rho_p = 1.0;
        const Complex v = reflect_amp_minus1(sd, jets, tau, {0.0, 0.0});
        CHECK(std::abs(v - (-aT0 / D)) <= 1e-14);
    }
    SUBCASE("gravity term flips sign with g0 and scales with xi_hat^2") {
        InterfaceJets jets;
        jets.grad_phi = Vec3(0, 0, 0.7);
        const Complex v = reflect_amp_minus1(sd, jets, tau, {0.0, 0.0});
        const double xi_hat = vertical_xi(sd.c_p, tau, 0.0) / (tau / sd.c_p);  // = 1 at normal
        CHECK(std::abs(v - (-sd.rho_p * aT0 * 0.7 * xi_hat * xi_hat / D)) <= 1e-14);
        jets.grad_phi = Vec3(0, 0, -0.7);
        CHECK(std::abs(reflect_amp_minus1(sd, jets, tau, {0.0, 0.0}) + v) <= 1e-14);
    }
    SUBCASE("affine in each jet component") {
        const Eigen::Vector2d eta(0.25, -0.1);
        auto value = [&](double jc, double jr, double g3) {
            InterfaceJets j{jc, jr, Vec3(0.05, -0.02, g3)};
            return reflect_amp_minus1(sd, j, tau, eta);
        };
        const Complex base = value(0.1, 0.2, 0.3);
        const Complex dc = value(0.1 + 1.0, 0.2, 0.3) - base;
        const Complex dr = value(0.1, 0.2 + 1.0, 0.3) - base;
        const Complex dg = value(0.1, 0.2, 0.3 + 1.0) - base;
        // Coefficients do not depend on the base point (affine map).
        CHECK(std::abs(value(0.6, 0.2, 0.3) - (base + 0.5 * dc)) <= 1e-13);
        CHECK(std::abs(value(0.1, -0.8, 0.3) - (base - 1.0 * dr)) <= 1e-13);
        CHECK(std::abs(value(0.1, 0.2, 1.3) - (base + 1.0 * dg)) <= 1e-13);
    }
}

TEST_CASE("transfer-matrix oracle") {
    SUBCASE("zero-thickness layer collapses to the outer pair") {
        LayerStack st;
        st.rho_top = 1.0;
        st.c_top = 1.0;
        st.layers.push_back({5.0, 0.7, 0.0});
        st.rho_bot = 2.0;
        st.c_bot = 1.5;
        InterfaceSides outer{1.0, 1.0, 2.0, 1.5};
        const auto r = transfer_matrix_response(st, 1.0, 0.2);
        CHECK(std::abs(r.R - Complex(principal_R(outer, 1.0, 0.2))) <= 1e-13);
    }
    SUBCASE("quarter-wave layer interference maximum") {
        const double Z1 = 1.0, Z2 = 2.5;
        const double c2 = 1.2, tau = 2.0;
        const double d = 2.0 * M_PI / (tau / c2) / 4.0;  // quarter vertical wavelength
        LayerStack st;
        st.rho_top = Z1;
        st.c_top = 1.0;
        st.layers.push_back({Z2 / c2, c2, d});
        st.rho_bot = Z1;
        st.c_bot = 1.0;
        const auto r = transfer_matrix_response(st, tau, 0.0);
        const double expect = (Z2 * Z2 - Z1 * Z1) / (Z2 * Z2 + Z1 * Z1);
        CHECK(std::abs(r.R) == doctest::Approx(expect).epsilon(1e-12));
    }
    SUBCASE("lossless energy conservation over random stacks") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.5, 2.5);
        for (int k = 0; k < 100; ++k) {
            LayerStack st;
            st.rho_top = u(rng);
            st.c_top = u(rng);
            st.rho_bot = u(rng);
            st.c_bot = u(rng);
            const int nl = k % 3;
            double cmax = std::max(st.c_top, st.c_bot);
            for (int l = 0; l < nl; ++l) {
                st.layers.push_back({u(rng), u(rng), 0.3 * u(rng)});
                cmax = std::max(cmax, st.layers.back().c);
            }
            const double p = 0.8 / cmax;  // sub-critical everywhere: no evanescence
            const double tau = 1.0 + u(rng);
            const auto r = transfer_matrix_response(st, tau, p * tau);
            const double energy = std::norm(r.R) + r.flux_factor * std::norm(r.T);
            CHECK(std::abs(energy - 1.0) <= 1e-12);
        }
    }
    SUBCASE("transmission relation against the displacement-convention symbol") {
        std::mt19937_64 rng(19);
        std::uniform_real_distribution<double> u(0.5, 2.5);
        for (int k = 0; k < 50; ++k) {
            InterfaceSides sd{u(rng), u(rng), u(rng), u(rng)};
            const double p = 0.5 / std::max(sd.c_m, sd.c_p);
            const double tau = 1.0;
            LayerStack st;
            st.rho_top = sd.rho_m;
            st.c_top = sd.c_m;
            st.rho_bot = sd.rho_p;
            st.c_bot = sd.c_p;
            const auto resp = transfer_matrix_response(st, tau, p * tau);
            // sigma0(M_T) Z+ = (1 + sigma0(M_R)) Z- and oracle T = 1 + R.
            const double lhs = principal_T(sd, tau, p * tau) * sd.rho_p * sd.c_p;
            const double rhs = (1.0 + principal_R(sd, tau, p * tau)) * sd.rho_m * sd.c_m;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
            CHECK(std::abs(resp.T - (1.0 + resp.R)) <= 1e-12);
        }
    }
    SUBCASE("post-critical incidence rejected") {
        LayerStack st;
        st.c_top = 2.0;
        CHECK_THROWS_AS(transfer_matrix_response(st, 1.0, 0.6), PreconditionError);
    }
}

TEST_CASE("order -1 solve vanishes term by term for homogeneous half-spaces") {
    // Planar fronts in homogeneous half-spaces: every h_{-1} constituent is
    // zero, V_{-1} is zero, and the incident order -1 amplitude is zero by
    // the boundary normalization, so the 2x2 solve returns zero.
    Medium m = halfspace_medium(1.0, 1.0, 2.0, 1.5);
    ZeroGravity g;
    const double tau = 1.0;
    const Vec3 dir_inc = Vec3(0.3, 0.0, -1.0).normalized();
    auto fam = planar_family(m, dir_inc, tau);
    const Vec3 x_on(0.15, 0.0, 0.0);
    const CVec3 h_inc = h_minus1(m, g, x_on + Vec3(0, 0, 0.2), fam->jet(x_on + Vec3(0, 0, 0.2)));
    CHECK(h_inc.norm() <= 1e-14);

    InterfaceSides sd{1.0, 1.0, 2.0, 1.5};
    const double eta = (tau / 1.0) * dir_inc.head<2>().norm();
    const Mat2c M = transmission_matrix(sd, tau, eta);
    const Vec2c rhs = order_J_rhs(sd, tau, eta, /*alpha_I=*/0.0, /*h jump=*/0.0, /*V=*/0.0);
    const Vec2c sol = solve_order_J(M, rhs);
    CHECK(std::abs(sol[0]) == 0.0);
    CHECK(std::abs(sol[1]) == 0.0);
}
