#pragma once

#include <functional>
#include <memory>

#include "gravac/gravity.hpp"
#include "gravac/media.hpp"

namespace gravac {

// Local first-order data of a wavefront family at a point: the phase gradient
// xi = grad(phi), its Jacobian (the phase Hessian), and the leading amplitude
// with its gradient.
struct WavefrontJet {
    double tau = 1.0;
    Vec3 xi = Vec3::UnitX();
    Mat3 grad_xi = Mat3::Zero();  // (i,j) = d_i xi_j, symmetric
    double alpha0 = 1.0;
    Vec3 grad_alpha0 = Vec3::Zero();

    double xi_norm() const { return xi.norm(); }
    Vec3 N() const { return xi.normalized(); }
    Vec3 grad_xi_norm() const { return grad_xi * N(); }  // grad |xi|
    Mat3 grad_N() const {
        const double n = xi_norm();
        const Vec3 Nv = N();
        return (grad_xi - grad_xi_norm() * Nv.transpose()) / n;  // (i,j) = d_i N_j
    }
    double div_N() const { return grad_N().trace(); }
    // (i,j) = d_i (alpha0 N_j)
    Mat3 grad_alpha0N() const {
        return grad_alpha0 * N().transpose() + alpha0 * grad_N();
    }
};

// Closed-form wavefront family in a constant-c region: supplies jets, the
// ray-family factor H with its log-gradient, and the rho/Phi-free part of
// N.A.N computed from the symbol machinery.
class WavefrontFamily {
  public:
    virtual ~WavefrontFamily() = default;
    virtual WavefrontJet jet(const Vec3& x) const = 0;
    virtual Vec3 grad_H_over_H(const Vec3& x) const = 0;
    virtual double div_N(const Vec3& x) const = 0;
    virtual double remainder_nn(const Vec3& x) const = 0;
    virtual double alpha0_field(const Vec3& x) const { return jet(x).alpha0; }
};

using FamilyPtr = std::shared_ptr<const WavefrontFamily>;

// Planar wavefront travelling along `dir` in a medium with constant c.
// alpha0(x) = amp / sqrt(rho(x) c); H is constant along the family.
FamilyPtr planar_family(const Medium& m, const Vec3& dir, double tau, double amp = 1.0);

// Spherical wavefront expanding from `center` (constant c):
// alpha0(x) = amp / (r sqrt(rho(x))), H = amp / r.
FamilyPtr spherical_family(const Medium& m, const Vec3& center, double tau, double amp = 1.0);

}  // namespace gravac
