#pragma once

#include <memory>
#include <vector>

#include "gravac/media.hpp"

namespace gravac {

// Reference potential: Delta Phi = k0 rho, Phi -> 0 at infinity. The body's
// density is the medium inside its outermost interface; space outside the
// body is vacuum for the potential solve.
class GravityField {
  public:
    virtual ~GravityField() = default;
    virtual double phi(const Vec3& x) const = 0;
    virtual Vec3 grad(const Vec3& x) const = 0;
    virtual Mat3 hess(const Vec3& x) const = 0;
    virtual double k0() const = 0;
};

using GravityPtr = std::shared_ptr<const GravityField>;

class ZeroGravity final : public GravityField {
  public:
    explicit ZeroGravity(double k0 = 1.0) : k0_(k0) {}
    double phi(const Vec3&) const override { return 0.0; }
    Vec3 grad(const Vec3&) const override { return Vec3::Zero(); }
    Mat3 hess(const Vec3&) const override { return Mat3::Zero(); }
    double k0() const override { return k0_; }

  private:
    double k0_;
};

// Analytic gravity from closed-form phi(x); used by manufactured tests.
class AnalyticGravity final : public GravityField {
  public:
    AnalyticGravity(FieldPtr phi, double k0) : phi_(std::move(phi)), k0_(k0) {}
    double phi(const Vec3& x) const override { return phi_->value(x); }
    Vec3 grad(const Vec3& x) const override { return phi_->gradient(x); }
    Mat3 hess(const Vec3& x) const override { return phi_->hessian(x); }
    double k0() const override { return k0_; }

  private:
    FieldPtr phi_;
    double k0_;
};

class RadialGravity final : public GravityField {
  public:
    RadialGravity(const Medium& m, double k0, double quad_tol = 1e-10);

    double phi(const Vec3& x) const override { return phi_r(x.norm()); }
    Vec3 grad(const Vec3& x) const override;
    Mat3 hess(const Vec3& x) const override;
    double k0() const override { return k0_; }

    double phi_r(double r) const;
    double dphi_r(double r) const;                       // Phi'
    double d2phi_r(double r, Side side = Side::Minus) const;  // Phi'' (one-sided at interfaces)
    double support_radius() const { return support_radius_; }
    double enclosed(double r) const;  // integral_0^r s^2 rho ds

  private:
    double outer_moment(double r) const;  // integral_r^R s rho ds
    double rho_r(double r, Side side) const;

    const Medium* medium_;
    double k0_;
    double quad_tol_;
    double support_radius_;
    std::vector<double> breakpoints_;  // ascending interface radii + support radius
    std::vector<double> m_cum_, s_cum_;
};

GravityPtr solve_phi_radial(const Medium& m, double k0 = 1.0);

struct GridSpec {
    int n = 64;          // cells per dimension; nodes are n+1 per dimension
    double extent = 2.0; // box is [-extent, extent]^3
    // Density support radius; 0 means the outermost sphere interface (or the
    // domain radius when the interfaces are not spheres).
    double support_radius = 0.0;
};

class GridGravity final : public GravityField {
  public:
    GridGravity(std::vector<double> phi_nodes, int n, double extent, double k0);
    double phi(const Vec3& x) const override;
    Vec3 grad(const Vec3& x) const override;
    Mat3 hess(const Vec3& x) const override;
    double k0() const override { return k0_; }
    double spacing() const { return h_; }
    double node_phi(int i, int j, int k) const { return phi_[idx(i, j, k)]; }

  private:
    size_t idx(int i, int j, int k) const {
        return (static_cast<size_t>(i) * (n_ + 1) + j) * (n_ + 1) + k;
    }
    double interp(const std::vector<double>& f, const Vec3& x) const;
    void build_derivatives();

    std::vector<double> phi_;
    std::vector<double> dphi_[3];
    std::vector<double> d2phi_[6];  // xx, yy, zz, xy, xz, yz
    int n_;
    double extent_, h_, k0_;
};

GravityPtr solve_phi_grid(const Medium& m, const GridSpec& spec, double k0 = 1.0);

struct HydrostaticPressure {
    std::function<double(double)> p0;   // p0(r), zero outside the body
    std::function<double(double)> dp0;  // -rho Phi'
};

HydrostaticPressure hydrostatic_pressure(const Medium& m, const GravityField& g);

// Principal symbol of grad S with Delta S(v) = -k0 div v:
// b0(xi) = -k0 (xi (x) xi) / |xi|^2.
Mat3 selfgrav_symbol_b0(const Vec3& xi, double k0);

}  // namespace gravac
