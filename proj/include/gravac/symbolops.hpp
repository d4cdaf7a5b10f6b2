#pragma once

#include "gravac/wavefront.hpp"

namespace gravac {

// First-order symbol expansion operators of the wave operator applied to
// amplitude fields, in the grouping where the order-J compatibility reads
//   p(d phi) (a)_{J-1} = B_p (a)_J + C_p (a)_{J+1} + (c)_{J+1}.
//
// B_p M = i [ 2 rho tau dt M + kappa ((grad M) xi + xi div M)
//             + grad(kappa) (xi.M) - rho xi (grad Phi . M) + rho grad Phi (xi.M)
//             + rho c^2 (grad xi) M ]            (dt M = 0 for steady families)
// C_p M = grad(kappa) div M + kappa grad(div M)
//         - rho (grad M) grad Phi + rho grad Phi div M.

struct FieldDerivs {
    CVec3 value = CVec3::Zero();
    Eigen::Matrix3cd jac = Eigen::Matrix3cd::Zero();  // (i,j) = d_i M_j
    Complex div = 0.0;
    CVec3 grad_div = CVec3::Zero();  // only needed by C_p
};

CVec3 Bp_apply(const MediumEval& e, const Vec3& grad_phi_pot, double tau, const Vec3& xi,
               const Mat3& grad_xi, const FieldDerivs& M);

CVec3 Cp_apply(const MediumEval& e, const Vec3& grad_phi_pot, const FieldDerivs& M);

// Appendix-style closed form of h_{-1}: -(1/(rho c^2 |xi|^2)) B_p(alpha0 N)
// projected off N. Orthogonal to N by construction.
CVec3 h_minus1_closed(const MediumEval& e, const GravityField& g, const Vec3& x,
                      const WavefrontJet& jet);

// Scalar fields evaluated by the generic route through finite differences
// of closed-form wavefront data.
struct WaveFields {
    double tau = 1.0;
    std::function<Vec3(const Vec3&)> xi;
    std::function<double(const Vec3&)> alpha0;
};

WaveFields fields_of(const FamilyPtr& fam);

// N.A.N computed generically: finite differences of the alpha0 N and h_{-1}
// fields pushed through B_p/C_p plus the self-gravitation symbol term.
double generic_nAn(const Medium& m, const GravityField& g, const WaveFields& wf, const Vec3& x,
                   bool selfgrav, double fd_h = 1e-3);

// rho,Phi-free part of N.A.N: the same machinery with unit density, no
// potential and self-gravitation off, keeping c and the wavefront geometry.
double remainder_nn_generic(double c, const WaveFields& wf_unit_rho, const Vec3& x,
                            double domain_radius, double fd_h = 1e-3);

}  // namespace gravac
