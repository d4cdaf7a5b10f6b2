#pragma once

#include <optional>
#include <vector>

#include "gravac/rays.hpp"
#include "gravac/types.hpp"

namespace gravac {

// One-sided material pair seen from an interface; minus is the incidence side.
struct InterfaceSides {
    double rho_m = 1, c_m = 1;
    double rho_p = 1, c_p = 1;
    double kappa_m() const { return rho_m * c_m * c_m; }
    double kappa_p() const { return rho_p * c_p * c_p; }
};

// Vertical covector component sqrt(tau^2/c^2 - |eta'|^2); throws when the
// covector is post-critical or glancing on that side.
double vertical_xi(double c, double tau, double eta_norm, double glancing_tol = 1e-12);

// Principal symbols of the reflection and transmission operators at (tau, eta').
double principal_R(const InterfaceSides& s, double tau, double eta_norm);
double principal_T(const InterfaceSides& s, double tau, double eta_norm);

using Mat2c = Eigen::Matrix2cd;
using Vec2c = Eigen::Vector2cd;

// Transmission-system matrix of the order-J recursion and its determinant.
Mat2c transmission_matrix(const InterfaceSides& s, double tau, double eta_norm);
Complex transmission_det(const InterfaceSides& s, double tau, double eta_norm);

// Exact 2x2 solve of M (alpha_R, alpha_T)^T = rhs; at J=0 with the incident
// normalization rhs this reproduces the principal symbols.
Vec2c solve_order_J(const Mat2c& M, const Vec2c& rhs, double det_tol = 1e-12);

// rhs of the order-J system for incident amplitude aI and源 terms:
// (xi_hat_I3 * aI - nu.(hT - hI - hR), -i kappa_m |xi_I| aI + V_J).
Vec2c order_J_rhs(const InterfaceSides& s, double tau, double eta_norm, Complex alpha_I,
                  Complex nu_dot_h_jump = 0.0, Complex V_J = 0.0);

// One-sided first-order jets entering the order -1 reflection value.
struct InterfaceJets {
    double dnu_log_c_p = 0;        // normal derivative of log c on the + side
    double dnu_log_sqrt_rho_p = 0; // normal derivative of log sqrt(rho) on the + side
    Vec3 grad_phi = Vec3::Zero();  // grad Phi at the interface, local frame (e3 = normal)
};

// Order (-1) reflection amplitude: the jet-dependent part of D (alpha_R)_{-1}
// divided by D; R0 collects already-determined terms and defaults to zero.
Complex reflect_amp_minus1(const InterfaceSides& s, const InterfaceJets& jets, double tau,
                           const Eigen::Vector2d& eta, Complex R0 = 0.0);

struct Layer {
    double rho = 1, c = 1, d = 0;  // thickness d
};

// Homogeneous stack between two half-spaces; incidence from the top.
struct LayerStack {
    double rho_top = 1, c_top = 1;
    std::vector<Layer> layers;
    double rho_bot = 1, c_bot = 1;
};

struct StackResponse {
    Complex R;          // pressure reflection coefficient at the top interface
    Complex T;          // pressure transmission into the bottom half-space
    double flux_factor; // Re(Ztilde_top) / Re(Ztilde_bot); |R|^2 + flux |T|^2 = 1 lossless
};

StackResponse transfer_matrix_response(const LayerStack& stack, double tau, double eta_norm);

}  // namespace gravac
