#pragma once

#include <functional>
#include <vector>

#include "gravac/types.hpp"

namespace gravac {

// Radial polynomial test function supported on [a, b] (0 < a < b < r0),
// with closed-form derivatives up to fourth order.
class RadialTestFunction {
  public:
    // ((r-a)(b-r))^4 * (m0 + m1 r + m2 r^2 + ...) on [a, b], zero outside.
    static RadialTestFunction bump(double a, double b, std::vector<double> modulation = {1.0});

    double u(double r) const { return deriv(r, 0); }
    double du(double r) const { return deriv(r, 1); }
    double d2u(double r) const { return deriv(r, 2); }
    double d3u(double r) const { return deriv(r, 3); }
    double d4u(double r) const { return deriv(r, 4); }

    double support_lo() const { return a_; }
    double support_hi() const { return b_; }

    RadialTestFunction scaled(double factor) const;

    // Radial norms: |grad u|^2, |hess u|^2, |grad^3 u|^2, A u, Delta^2 u.
    double grad_sq(double r) const;
    double hess_sq(double r) const;
    double third_sq(double r) const;
    double biharmonic(double r) const;  // u'''' + 4 u'''/r
    double e_metric(double r) const {   // third + hess + grad + value energy
        return third_sq(r) + hess_sq(r) + grad_sq(r) + u(r) * u(r);
    }

  private:
    double deriv(double r, int order) const;
    std::vector<double> coef_;  // polynomial in r on [a, b]
    double a_ = 0, b_ = 1;
};

struct CarlemanConfig {
    double beta = 4.0;
    double s0 = 0.0;
    double c_tilde = 1.0;  // s = s0 + c_tilde * beta
    double r0 = 0.9;       // support must sit inside B_{r0}, r0 < 1
    int radial_panels = 48;
    int n_phi = 32;
    double s() const { return s0 + c_tilde * beta; }
};

struct CarlemanSides {
    double log_lhs = 0, log_rhs = 0;
    double ratio() const { return std::exp(log_lhs - log_rhs); }
};

using EllipticCoeff = std::function<Mat3(const Vec3&)>;

// Second-order estimate: beta^2 int r^{-s-beta-1} psi^2 (|grad u|^2 + u^2)
// against int r^{-s} psi^2 |A u|^2, with psi = exp(r^-beta). All integrals
// are accumulated in log space.
CarlemanSides carleman_sides_2nd(const RadialTestFunction& u, const EllipticCoeff& a_jk,
                                 const CarlemanConfig& cfg);

// Fourth-order iterate: beta^4 int r^{-s-6beta-8} psi^2 e(u) against
// int r^{-s} psi^2 |Delta^2 u|^2.
CarlemanSides carleman_sides_4th(const RadialTestFunction& u, const CarlemanConfig& cfg);

// Smallest integer beta at which lhs/rhs stops growing (relative change of
// the log-ratio below 10% over three consecutive steps).
double estimate_beta0(const std::function<double(double)>& ratio_of_beta, double beta_max = 32);

struct UcpDemoReport {
    bool satisfies_system = false;
    double system_constant = 0;   // sup |Delta^2 w| / sqrt(e(w1)+e(w2))
    double sup_half_ball = 0;     // sup of e(w1)+e(w2) on B_{r_tilde/2}
    std::vector<std::pair<double, double>> envelope;  // (beta, bound)
    bool below_envelope = false;
    bool violation_detected = false;
};

// Numerical illustration of the unique-continuation step: radial pairs
// vanishing on the seed ball stay below the (c/beta^2) annulus envelope on
// the half ball; pairs violating the Lipschitz system are flagged.
UcpDemoReport ucp_propagation_demo(const RadialTestFunction& w1, const RadialTestFunction& w2,
                                   double r_seed, double r_tilde,
                                   const std::vector<double>& betas,
                                   double system_threshold = 1e3);

}  // namespace gravac
