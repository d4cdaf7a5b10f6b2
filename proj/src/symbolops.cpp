#include "gravac/symbolops.hpp"

#include <cmath>

namespace gravac {

CVec3 Bp_apply(const MediumEval& e, const Vec3& grad_phi_pot, double tau, const Vec3& xi,
               const Mat3& grad_xi, const FieldDerivs& M) {
    (void)tau;  // steady families: the 2 rho tau dt(M) term vanishes
    const Vec3 grad_kappa = e.grad_kappa();
    const Complex xi_dot_M = xi[0] * M.value[0] + xi[1] * M.value[1] + xi[2] * M.value[2];
    const Complex gphi_dot_M =
        grad_phi_pot[0] * M.value[0] + grad_phi_pot[1] * M.value[1] + grad_phi_pot[2] * M.value[2];
    const CVec3 out = e.kappa * (M.jac * xi.cast<Complex>()) +
                      e.kappa * M.div * xi.cast<Complex>() +
                      xi_dot_M * grad_kappa.cast<Complex>() -
                      e.rho * gphi_dot_M * xi.cast<Complex>() +
                      e.rho * xi_dot_M * grad_phi_pot.cast<Complex>() +
                      e.rho * e.c * e.c * (grad_xi * M.value);
    return I_UNIT * out;
}

CVec3 Cp_apply(const MediumEval& e, const Vec3& grad_phi_pot, const FieldDerivs& M) {
    const Vec3 grad_kappa = e.grad_kappa();
    return M.div * grad_kappa.cast<Complex>() + e.kappa * M.grad_div -
           e.rho * (M.jac * grad_phi_pot.cast<Complex>()) +
           e.rho * M.div * grad_phi_pot.cast<Complex>();
}

CVec3 h_minus1_closed(const MediumEval& e, const GravityField& g, const Vec3& x,
                      const WavefrontJet& jet) {
    const double nxi = jet.xi_norm();
    if (!(nxi > 0.0)) throw PreconditionError("ZeroCovector", "h_{-1} needs xi != 0");
    const Vec3 N = jet.N();
    const Mat3 grad_a0N = jet.grad_alpha0N();
    const Vec3 grad_log_sqrt_rhoc2 =
        0.5 * (e.grad_rho / e.rho + 2.0 * e.grad_c / e.c);  // grad log sqrt(rho c^2)
    const Vec3 grad_phi = g.grad(x);

    // Bracket of the Appendix closed form; terms parallel to N die under the
    // projection but are kept for fidelity with the displayed formula.
    Vec3 bracket = Vec3::Zero();
    bracket += e.c * e.c * (grad_a0N * N);
    bracket += e.c * e.c * grad_a0N.trace() * N;
    bracket += (2.0 * e.c * e.c * grad_log_sqrt_rhoc2 + e.c * e.c * (jet.grad_xi * N) / nxi +
                grad_phi) *
               jet.alpha0;

    const Mat3 proj = Mat3::Identity() - N * N.transpose();
    const Vec3 projected = proj * bracket;
    // -(1/(rho c^2 |xi|^2)) * i rho |xi| * (...) = -(i/(c^2 |xi|)) (...)
    return (-I_UNIT / (e.c * e.c * nxi)) * projected.cast<Complex>();
}

namespace {

// Fourth-order central differences over closed-form fields.
template <typename F>
auto fd_grad(const F& f, const Vec3& x, double h) {
    using R = decltype(f(x));
    std::array<R, 3> g;
    for (int a = 0; a < 3; ++a) {
        Vec3 e = Vec3::Zero();
        e[a] = 1.0;
        g[a] = (-f(x + 2 * h * e) + 8.0 * f(x + h * e) - 8.0 * f(x - h * e) + f(x - 2 * h * e)) /
               (12.0 * h);
    }
    return g;
}

}  // namespace

WaveFields fields_of(const FamilyPtr& fam) {
    WaveFields wf;
    wf.tau = fam->jet(Vec3(1, 0, 0)).tau;
    wf.xi = [fam](const Vec3& x) { return fam->jet(x).xi; };
    wf.alpha0 = [fam](const Vec3& x) { return fam->alpha0_field(x); };
    return wf;
}

double generic_nAn(const Medium& m, const GravityField& g, const WaveFields& wf, const Vec3& x,
                   bool selfgrav, double fd_h) {
    const auto e = m.eval(x);
    const Vec3 xi = wf.xi(x);
    const double nxi = xi.norm();
    const Vec3 N = xi / nxi;
    const double alpha0 = wf.alpha0(x);

    auto jet_at = [&](const Vec3& y) {
        WavefrontJet j;
        j.tau = wf.tau;
        j.xi = wf.xi(y);
        auto gx = fd_grad(wf.xi, y, fd_h);
        for (int a = 0; a < 3; ++a) j.grad_xi.row(a) = gx[a].transpose();
        j.alpha0 = wf.alpha0(y);
        auto ga = fd_grad(wf.alpha0, y, fd_h);
        j.grad_alpha0 = Vec3(ga[0], ga[1], ga[2]);
        return j;
    };

    // alpha0 N field and its derivatives.
    auto a0N = [&](const Vec3& y) -> Vec3 { return wf.alpha0(y) * wf.xi(y).normalized(); };
    FieldDerivs Ma;
    Ma.value = a0N(x).cast<Complex>();
    {
        auto ja = fd_grad(a0N, x, fd_h);
        for (int a = 0; a < 3; ++a) Ma.jac.row(a) = ja[a].cast<Complex>().transpose();
        Ma.div = Ma.jac.trace();
        auto div_field = [&](const Vec3& y) {
            auto jv = fd_grad(a0N, y, fd_h);
            return jv[0][0] + jv[1][1] + jv[2][2];
        };
        auto gd = fd_grad(div_field, x, 2.0 * fd_h);
        Ma.grad_div = CVec3(gd[0], gd[1], gd[2]);
    }

    // h_{-1} field and its first derivatives.
    auto h_field = [&](const Vec3& y) -> CVec3 {
        return h_minus1_closed(m.eval(y), g, y, jet_at(y));
    };
    FieldDerivs Mh;
    Mh.value = h_field(x);
    {
        auto jh = fd_grad(h_field, x, fd_h);
        for (int a = 0; a < 3; ++a) Mh.jac.row(a) = jh[a].transpose();
        Mh.div = Mh.jac.trace();
    }

    const auto jx = jet_at(x);
    const Vec3 grad_phi = g.grad(x);
    const CVec3 Bh = Bp_apply(e, grad_phi, wf.tau, xi, jx.grad_xi, Mh);
    const CVec3 Ca = Cp_apply(e, grad_phi, Ma);

    Complex bracket = N.cast<Complex>().dot(Bh) + N.cast<Complex>().dot(Ca);
    if (selfgrav) {
        // (c)_0 = rho^2 b0 alpha0 N; enters the recursion with the sign that
        // matches the assembled A(x), i.e. subtracted from the B/C grouping.
        const Mat3 b0 = selfgrav_symbol_b0(xi, g.k0());
        bracket -= e.rho * e.rho * alpha0 * N.dot(b0 * N);
    }
    const double H_sqrt_rho = alpha0 * e.rho;
    return -bracket.real() / H_sqrt_rho;
}

double remainder_nn_generic(double c, const WaveFields& wf_unit_rho, const Vec3& x,
                            double domain_radius, double fd_h) {
    const Medium unit = homogeneous_medium(1.0, c, domain_radius);
    const ZeroGravity g0;
    return generic_nAn(unit, g0, wf_unit_rho, x, false, fd_h);
}

}  // namespace gravac
