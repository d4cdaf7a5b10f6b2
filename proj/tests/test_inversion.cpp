#include <doctest.h>

#include <random>

#include "gravac/inversion.hpp"

using namespace gravac;

namespace {

std::vector<ReflectionSample> order0_samples(const InterfaceSides& sd, double tau,
                                             const std::vector<double>& slownesses) {
    std::vector<ReflectionSample> out;
    for (double p : slownesses) {
        ReflectionSample s;
        s.tau = tau;
        s.eta = {p * tau, 0.0};
        s.order = 0;
        s.value = principal_R(sd, tau, p * tau);
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("order-0 recovery") {
    SUBCASE("two slownesses recover the pair") {
        InterfaceSides sd{1.0, 1.0, 2.0, 1.5};
        const auto r = recover_order0(order0_samples(sd, 1.0, {0.0, 0.4}), 1.0, 1.0);
        CHECK(r.rho_p == doctest::Approx(2.0).epsilon(1e-8));
        CHECK(r.c_p == doctest::Approx(1.5).epsilon(1e-8));
        CHECK(r.max_residual <= 1e-9);
    }
    SUBCASE("matched media recover the incidence-side parameters") {
        InterfaceSides sd{1.2, 0.9, 1.2, 0.9};
        const auto r = recover_order0(order0_samples(sd, 1.0, {0.0, 0.5}), 1.2, 0.9);
        CHECK(r.rho_p == doctest::Approx(1.2).epsilon(1e-7));
        CHECK(r.c_p == doctest::Approx(0.9).epsilon(1e-7));
    }
    SUBCASE("insufficient angles are rejected") {
        InterfaceSides sd{1.0, 1.0, 2.0, 1.5};
        CHECK_THROWS_AS(recover_order0(order0_samples(sd, 1.0, {0.0}), 1.0, 1.0),
                        PreconditionError);
        CHECK_THROWS_AS(recover_order0(order0_samples(sd, 1.0, {0.3, 0.3}), 1.0, 1.0),
                        PreconditionError);
    }
}

TEST_CASE("order-1 recovery") {
    InterfaceSides sd{1.0, 1.0, 2.0, 1.5};
    const double tau = 1.0;
    const double pmax = 0.5 / sd.c_p;
    const std::vector<Eigen::Vector2d> pattern = {
        {0, 0}, {pmax, 0}, {-pmax, 0}, {0, pmax}, {0, -pmax},
        {0.5 * pmax, 0}, {0, 0.5 * pmax}, {0.3 * pmax, 0.3 * pmax}, {-0.3 * pmax, 0.3 * pmax}};
    auto synth = [&](const InterfaceJets& jets) {
        std::vector<ReflectionSample> out;
        for (const auto& eta : pattern) {
            ReflectionSample s;
            s.tau = tau;
            s.eta = eta;
            s.order = -1;
            s.value = reflect_amp_minus1(sd, jets, tau, eta);
            out.push_back(s);
        }
        return out;
    };

    SUBCASE("round trip at a reference ground truth") {
        InterfaceJets jets{0.3, -0.2, Vec3(0, 0, 0.5)};
        const auto r = recover_order1(synth(jets), sd);
        CHECK(r.rank == 5);
        CHECK(r.condition < 100.0);
        CHECK(r.dnu_log_c_p == doctest::Approx(0.3).epsilon(1e-10));
        CHECK(r.dnu_log_sqrt_rho_p == doctest::Approx(-0.2).epsilon(1e-10));
        CHECK((r.grad_phi - Vec3(0, 0, 0.5)).norm() <= 1e-9);
    }
    SUBCASE("zero jets recover zero") {
        const auto r = recover_order1(synth(InterfaceJets{}), sd);
        CHECK(std::abs(r.dnu_log_c_p) <= 1e-12);
        CHECK(r.grad_phi.norm() <= 1e-12);
    }
    SUBCASE("sign-reversed pair isolates the tangential potential slope") {
        // The data difference between (eta1, 0) and (-eta1, 0) depends only
        // on d1 Phi, with twice the single-sample coefficient.
        InterfaceJets jets{0.3, -0.2, Vec3(0.4, 0.0, 0.1)};
        const Complex vp = reflect_amp_minus1(sd, jets, tau, {pmax, 0});
        const Complex vm = reflect_amp_minus1(sd, jets, tau, {-pmax, 0});
        InterfaceJets only_phi1{0.0, 0.0, Vec3(0.4, 0.0, 0.0)};
        const Complex wp = reflect_amp_minus1(sd, only_phi1, tau, {pmax, 0});
        const Complex wm = reflect_amp_minus1(sd, only_phi1, tau, {-pmax, 0});
        CHECK(std::abs((vp - vm) - (wp - wm)) <= 1e-14);
    }
    SUBCASE("one-slowness designs are rank deficient") {
        std::vector<ReflectionSample> bad;
        for (int k = 0; k < 6; ++k) {
            ReflectionSample s;
            s.tau = tau;
            s.eta = {pmax, 0.0};
            s.order = -1;
            s.value = 0.1;
            bad.push_back(s);
        }
        CHECK_THROWS_AS(recover_order1(bad, sd), NumericalError);
    }
}

TEST_CASE("ray transform") {
    std::vector<Region> regs;
    regs.push_back({std::make_shared<ConstantField>(1.0),
                    std::make_shared<RadialField>(radial_poly({1.0, 0.0, 0.15})), "bulk"});
    Medium m(std::move(regs), {}, 2.0);
    m.set_radial(true);

    std::vector<PhasePoint> starts;
    for (int k = 0; k < 8; ++k) {
        const double a = 2 * M_PI * k / 8.0;
        const Vec3 x0(1.5 * std::cos(a), 1.5 * std::sin(a), 0.1);
        starts.push_back(make_onshell(m, x0, (-x0 + Vec3(0.1, 0, 0)).normalized(), 1.0));
    }

    SUBCASE("zero field gives zero data") {
        const auto data =
            ray_transform_forward(m, [](const Vec3&) { return Mat3(Mat3::Zero()); }, starts);
        for (const auto& d : data) CHECK(std::abs(d.value) <= 1e-15);
    }
    SUBCASE("symmetrized differentials are invisible") {
        CompactBumpField b1(0.6, Vec3(0.1, 0, 0), 0.7), b2(-0.5, Vec3(0, 0.2, 0), 0.6),
            b3(0.4, Vec3(0, 0, 0.1), 0.65);
        VectorField v = [&](const Vec3& x) {
            return Vec3(b1.value(x), b2.value(x), b3.value(x));
        };
        const TensorField dv = symmetrized_differential(v, m);
        const auto data = ray_transform_forward(m, dv, starts);
        for (const auto& d : data) CHECK(std::abs(d.value) <= 1e-9);
    }
    SUBCASE("equal media pair produces an identically zero difference tensor") {
        ZeroGravity g;
        Medium unit = homogeneous_medium(1.0, 1.0, 2.0);
        auto fam = spherical_family(unit, Vec3::Zero(), 1.0);
        Medium mc = homogeneous_medium(1.4, 1.0, 2.0);
        MediaPair pair;
        pair.m = &mc;
        pair.m_tilde = &mc;
        pair.grav = &g;
        pair.grav_tilde = &g;
        const TensorField B = pair_difference_tensor(pair, fam, true);
        CHECK(B(Vec3(0.5, 0.2, -0.1)).norm() <= 1e-14);
        // Zero difference tensor means zero transform data.
        std::vector<PhasePoint> two = {
            make_onshell(mc, Vec3(-1.5, 0.1, 0), Vec3(1, 0, 0), 1.0),
            make_onshell(mc, Vec3(0.2, -1.5, 0.1), Vec3(0, 1, 0), 1.0)};
        for (const auto& d : ray_transform_forward(mc, B, two))
            CHECK(std::abs(d.value) <= 1e-13);
    }
}

TEST_CASE("Saint-Venant operator") {
    FdGrid grid;
    grid.n = 17;
    grid.extent = 1.0;

    SUBCASE("constant tensors are annihilated") {
        Mat3 C;
        C << 1, 2, 3, 2, 5, 6, 3, 6, 9;
        auto W = saint_venant_W(TensorGrid::sample(grid, [&](const Vec3&) { return C; }));
        const Tensor4 t = W.at(8, 8, 8);
        for (double a : t.a) CHECK(std::abs(a) <= 1e-12);
    }
    SUBCASE("hessians are annihilated and the contraction matches W") {
        PolynomialField f({{3, 1, 0, 1.0}, {1, 1, 1, -0.5}, {0, 2, 2, 0.3}});
        auto W = saint_venant_W(
            TensorGrid::sample(grid, [&](const Vec3& x) { return f.hessian(x); }));
        const Tensor4 t = W.at(8, 8, 8);
        for (double a : t.a) CHECK(std::abs(a) <= 1e-9);
        // Contraction shortcut equals the explicit trace of W.
        PolynomialField g2({{2, 2, 0, 1.0}, {0, 1, 3, 0.7}});
        auto Wg = saint_venant_W(TensorGrid::sample(grid, [&](const Vec3& x) {
            return Mat3(f.hessian(x) + g2.value(x) * Mat3::Identity());
        }));
        double direct = 0;
        const Tensor4 tg = Wg.at(8, 8, 8);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) direct += tg(i, i, j, j);
        CHECK(Wg.contraction(8, 8, 8) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("elliptic residual") {
    FdGrid grid;
    grid.n = 21;
    grid.extent = 0.9;
    const double k0 = 1.0;
    auto beta_plus = [](const Vec3& x) { return x[0] * x[0]; };
    auto g_coeff = [](const Vec3&) { return 2.0; };
    auto h_coeff = [](const Vec3&) { return Vec3(1, 0, 0); };

    SUBCASE("zero fields give zero residuals") {
        ScalarGrid zero = ScalarGrid::sample(grid, [](const Vec3&) { return 0.0; });
        const auto r = elliptic_residual(zero, zero, beta_plus, g_coeff, h_coeff, k0);
        for (int i = 5; i < grid.n - 5; ++i)
            CHECK(std::abs(r.r1.at(i, i, i)) + std::abs(r.r2.at(i, i, i)) <= 1e-12);
    }
    SUBCASE("manufactured fields match the closed-form residual at O(h^2)") {
        // beta_- = x^4, Y = x^3 y:
        //   r1 = 24 + 96 x^2 + 2 k0 e^{x^4}(12 x^2 + 16 x^6) - 6 y
        //   r2 = -2 k0 e^{x^4}(12 x^2 + 16 x^6)
        auto bm = [](const Vec3& x) { return x[0] * x[0] * x[0] * x[0]; };
        auto Yf = [](const Vec3& x) { return x[0] * x[0] * x[0] * x[1]; };
        auto exact1 = [&](const Vec3& x) {
            const double xx = x[0];
            return 24.0 + 96.0 * xx * xx +
                   2.0 * std::exp(bm(x)) * (12.0 * xx * xx + 16.0 * std::pow(xx, 6)) -
                   6.0 * x[1];
        };
        auto exact2 = [&](const Vec3& x) {
            const double xx = x[0];
            return -2.0 * std::exp(bm(x)) * (12.0 * xx * xx + 16.0 * std::pow(xx, 6));
        };
        auto err_at = [&](int n) {
            FdGrid gr;
            gr.n = n;
            gr.extent = 0.9;
            ScalarGrid bg = ScalarGrid::sample(gr, bm);
            ScalarGrid yg = ScalarGrid::sample(gr, Yf);
            const auto r = elliptic_residual(bg, yg, beta_plus, g_coeff, h_coeff, k0);
            // Fixed physical sampling box so the windows match across grids.
            double worst = 0;
            const int lo = static_cast<int>(std::ceil(0.3 * (n - 1)));
            const int hi = static_cast<int>(std::floor(0.7 * (n - 1)));
            for (int i = lo; i <= hi; i += 2)
                for (int j = lo; j <= hi; j += 2)
                    for (int k = lo; k <= hi; k += 2) {
                        const Vec3 x = gr.node(i, j, k);
                        worst = std::max(worst, std::abs(r.r1.at(i, j, k) - exact1(x)));
                        worst = std::max(worst, std::abs(r.r2.at(i, j, k) - exact2(x)));
                    }
            return worst;
        };
        const double e1 = err_at(21), e2 = err_at(41);
        CHECK((e2 <= e1 / 3.9 || e2 <= 1e-8));
    }
}

TEST_CASE("layer stripping") {
    SUBCASE("homogeneous ball yields no reflected arrivals") {
        Medium ball = layered_ball({1.0}, {1.0}, {1.0}, 1.0, 1.0);
        const auto data = synthesize_layered(ball, 1.0, 1.0, {0.0, 0.3});
        CHECK(data.interfaces.empty());
        const auto rep = layer_strip(data, ball, 1.0);
        CHECK(rep.layers.empty());
        CHECK(rep.converged);
    }
    SUBCASE("synthesis is deterministic in the seed") {
        Medium truth = layered_ball({1.0, 0.5}, {1.0, 2.0}, {1.0, 1.5});
        const auto a = synthesize_layered(truth, 1.0, 1.0, {0.0, 0.3}, 0.01, 7);
        const auto b = synthesize_layered(truth, 1.0, 1.0, {0.0, 0.3}, 0.01, 7);
        REQUIRE(a.interfaces.size() == b.interfaces.size());
        for (size_t i = 0; i < a.interfaces.size(); ++i)
            for (size_t k = 0; k < a.interfaces[i].order0.size(); ++k)
                CHECK(a.interfaces[i].order0[k].value == b.interfaces[i].order0[k].value);
    }
    SUBCASE("three layers recover to high accuracy") {
        Medium truth =
            layered_ball({1.0, 0.7, 0.4}, {1.2, 1.8, 2.5}, {1.1, 1.3, 1.6}, 1.0, 1.0, 2.0);
        const auto data = synthesize_layered(truth, 1.0, 1.0, {0.0, 0.3});
        const auto rep = layer_strip(data, truth, 1.0);
        REQUIRE(rep.layers.size() == 3);
        CHECK(rep.max_rel_error <= 1e-6);
    }
}

TEST_CASE("Brewster-flagged samples are rejected from the order-0 solve") {
    InterfaceSides sd{1.0, 1.5, 2.0, 1.0};
    std::vector<ReflectionSample> samples = order0_samples(sd, 1.0, {0.0, 0.3});
    ReflectionSample bad;
    bad.tau = 1.0;
    bad.eta = {0.5091750772 * 1.0, 0.0};
    bad.order = 0;
    bad.value = 0.0;
    bad.cls = CovectorClass::Brewster;
    samples.push_back(bad);
    CHECK_THROWS_AS(recover_order0(samples, 1.0, 1.5), PreconditionError);
}
