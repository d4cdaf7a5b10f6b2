#include "gravac/interface_symbols.hpp"

#include <cmath>

#include "gravac/errors.hpp"

namespace gravac {

double vertical_xi(double c, double tau, double eta_norm, double glancing_tol) {
    const double q2 = tau * tau / (c * c) - eta_norm * eta_norm;
    const double scale = tau * tau / (c * c);
    if (q2 < glancing_tol * scale) {
        if (q2 > -glancing_tol * scale)
            throw PreconditionError("Glancing", "covector in the glancing set");
        throw PreconditionError("PostCritical", "covector past the critical slowness");
    }
    return std::sqrt(q2);
}

double principal_R(const InterfaceSides& s, double tau, double eta_norm) {
    const double xi_I3 = vertical_xi(s.c_m, tau, eta_norm);
    const double xi_T3 = vertical_xi(s.c_p, tau, eta_norm);
    return (xi_I3 * s.rho_p - xi_T3 * s.rho_m) / (xi_I3 * s.rho_p + xi_T3 * s.rho_m);
}

double principal_T(const InterfaceSides& s, double tau, double eta_norm) {
    const double xi_I3 = vertical_xi(s.c_m, tau, eta_norm);
    const double xi_T3 = vertical_xi(s.c_p, tau, eta_norm);
    return 2.0 * s.kappa_m() * xi_I3 /
           (s.kappa_p() * (s.c_m / s.c_p) * xi_I3 + s.kappa_m() * (s.c_p / s.c_m) * xi_T3);
}

Mat2c transmission_matrix(const InterfaceSides& s, double tau, double eta_norm) {
    const double xi_I3 = vertical_xi(s.c_m, tau, eta_norm);
    const double xi_T3 = vertical_xi(s.c_p, tau, eta_norm);
    const double abs_xi_I = tau / s.c_m;
    const double abs_xi_T = tau / s.c_p;
    Mat2c M;
    M(0, 0) = xi_I3 / abs_xi_I;
    M(0, 1) = xi_T3 / abs_xi_T;
    M(1, 0) = I_UNIT * s.kappa_m() * abs_xi_I;
    M(1, 1) = -I_UNIT * s.kappa_p() * abs_xi_T;
    return M;
}

Complex transmission_det(const InterfaceSides& s, double tau, double eta_norm) {
    const Mat2c M = transmission_matrix(s, tau, eta_norm);
    return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
}

Vec2c solve_order_J(const Mat2c& M, const Vec2c& rhs, double det_tol) {
    const Complex det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    const double scale = M.cwiseAbs().maxCoeff();
    if (std::abs(det) < det_tol * scale * scale)
        throw NumericalError("DegenerateSystem", "transmission system near Brewster/glancing");
    Vec2c out;
    out[0] = (rhs[0] * M(1, 1) - M(0, 1) * rhs[1]) / det;
    out[1] = (M(0, 0) * rhs[1] - rhs[0] * M(1, 0)) / det;
    return out;
}

Vec2c order_J_rhs(const InterfaceSides& s, double tau, double eta_norm, Complex alpha_I,
                  Complex nu_dot_h_jump, Complex V_J) {
    const double xi_I3 = vertical_xi(s.c_m, tau, eta_norm);
    const double abs_xi_I = tau / s.c_m;
    Vec2c rhs;
    rhs[0] = (xi_I3 / abs_xi_I) * alpha_I - nu_dot_h_jump;
    rhs[1] = -I_UNIT * s.kappa_m() * abs_xi_I * alpha_I + V_J;
    return rhs;
}

Complex reflect_amp_minus1(const InterfaceSides& s, const InterfaceJets& jets, double tau,
                           const Eigen::Vector2d& eta, Complex R0) {
    const double eta_norm = eta.norm();
    const double xi_T3 = vertical_xi(s.c_p, tau, eta_norm);
    const double abs_xi_T = tau / s.c_p;
    const double xi_hat_T3 = xi_T3 / abs_xi_T;
    const Complex D = transmission_det(s, tau, eta_norm);
    if (std::abs(D) < 1e-12) throw NumericalError("DegenerateSystem", "det M too small");
    const double alpha_T0 = principal_T(s, tau, eta_norm);

    const Vec3 N_T = Vec3(eta[0], eta[1], xi_T3) / abs_xi_T;
    const double jet_part =
        -(0.5 * jets.dnu_log_c_p * (1.0 - 3.0 * eta_norm * eta_norm / (xi_T3 * xi_T3)) +
          jets.dnu_log_sqrt_rho_p) *
        alpha_T0;
    const double grav_part = -s.rho_p * alpha_T0 * N_T.dot(jets.grad_phi) * xi_hat_T3;
    return (jet_part + grav_part + R0) / D;
}

StackResponse transfer_matrix_response(const LayerStack& stack, double tau, double eta_norm) {
    const double p = eta_norm / tau;
    if (p >= 1.0 / stack.c_top - 1e-14)
        throw PreconditionError("PostCritical", "post-critical in the incidence half-space");

    // Vertical slownesses; evanescent layers get Im(q) > 0.
    auto qz = [p](double c) {
        const Complex q2 = 1.0 / (c * c) - p * p;
        Complex q = std::sqrt(q2);
        if (q.imag() < 0.0) q = -q;
        return q;
    };
    std::vector<double> rho{stack.rho_top};
    std::vector<double> cc{stack.c_top};
    std::vector<double> dd{0.0};
    for (const auto& l : stack.layers) {
        if (l.d < 0 || l.rho <= 0 || l.c <= 0)
            throw PreconditionError("BadStack", "layer parameters must be positive");
        rho.push_back(l.rho);
        cc.push_back(l.c);
        dd.push_back(l.d);
    }
    rho.push_back(stack.rho_bot);
    cc.push_back(stack.c_bot);
    dd.push_back(0.0);

    const int nmed = static_cast<int>(rho.size());
    std::vector<Complex> Zt(nmed);
    for (int j = 0; j < nmed; ++j) Zt[j] = rho[j] / qz(cc[j]);

    auto r_at = [&](int k) { return (Zt[k + 1] - Zt[k]) / (Zt[k + 1] + Zt[k]); };

    // Recursive reflectivity/transmissivity from the bottom interface upward.
    Complex R = r_at(nmed - 2);
    Complex T = 1.0 + r_at(nmed - 2);
    for (int k = nmed - 3; k >= 0; --k) {
        const Complex ph = std::exp(I_UNIT * tau * qz(cc[k + 1]) * dd[k + 1]);
        const Complex rk = r_at(k);
        const Complex den = 1.0 + rk * R * ph * ph;
        T = (1.0 + rk) * ph * T / den;
        R = (rk + R * ph * ph) / den;
    }
    StackResponse out;
    out.R = R;
    out.T = T;
    // Transmitted-over-incident energy flux is |T|^2 Re(1/Zt_bot)/Re(1/Zt_top)
    // for pressure amplitudes; lossless stacks satisfy |R|^2 + flux |T|^2 = 1.
    out.flux_factor = (1.0 / Zt.back()).real() / (1.0 / Zt.front()).real();
    return out;
}

}  // namespace gravac
