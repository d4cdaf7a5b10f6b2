#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gravac/fields.hpp"

namespace gravac {

enum class Side { Minus, Plus };  // minus: incoming/outer side, plus: far/inner side

// Implicit closed hypersurface psi(x)=0.  Convention: psi>0 on the minus
// side, psi<0 on the plus side, and nu = grad psi / |grad psi| points out
// of Omega_+.  Spheres: psi = |x|-R.  Planes: psi = n.x - d.
struct Interface {
    enum class Kind { Sphere, Plane, LevelSet };
    Kind kind = Kind::Sphere;
    double radius = 1.0;          // Sphere
    Vec3 plane_normal{0, 0, 1};   // Plane (unit)
    double plane_offset = 0.0;    // Plane: psi = n.x - d
    std::function<double(const Vec3&)> level;       // LevelSet
    std::function<Vec3(const Vec3&)> level_grad;    // LevelSet
    std::function<Mat3(const Vec3&)> level_hess;    // LevelSet (optional; used by paraxial maps)
    std::string name;

    double psi(const Vec3& x) const;
    Vec3 psi_grad(const Vec3& x) const;
    Mat3 psi_hess(const Vec3& x) const;
    Vec3 normal(const Vec3& x) const { return psi_grad(x).normalized(); }
};

Interface sphere_interface(double radius, std::string name = {});
Interface plane_interface(const Vec3& normal, double offset, std::string name = {});

struct Region {
    FieldPtr rho;
    FieldPtr c;
    std::string name;
};

struct MediumEval {
    double rho = 0, c = 0, kappa = 0;
    Vec3 grad_rho = Vec3::Zero(), grad_c = Vec3::Zero();
    Mat3 hess_rho = Mat3::Zero(), hess_c = Mat3::Zero();

    Vec3 grad_kappa() const { return c * c * grad_rho + 2.0 * rho * c * grad_c; }
    Vec3 grad_log_sqrt_rho() const { return 0.5 * grad_rho / rho; }
    Mat3 hess_log_sqrt_rho() const {
        return 0.5 * (hess_rho / rho - (grad_rho * grad_rho.transpose()) / (rho * rho));
    }
    Vec3 grad_c2() const { return 2.0 * c * grad_c; }
    Vec3 grad_log_c() const { return grad_c / c; }
    Mat3 hess_log_c() const {
        return hess_c / c - (grad_c * grad_c.transpose()) / (c * c);
    }
};

// Piecewise-smooth (rho, c) with nested interfaces, outermost first.
// Region k sits between interface k-1 and interface k; region_of counts
// crossed level sets, which is valid for disjoint nested surfaces.
class Medium {
  public:
    Medium(std::vector<Region> regions, std::vector<Interface> interfaces,
           double domain_radius = 2.0);

    const std::vector<Region>& regions() const { return regions_; }
    const std::vector<Interface>& interfaces() const { return interfaces_; }
    double domain_radius() const { return domain_radius_; }
    double interface_tolerance() const { return 1e-12 * 2.0 * domain_radius_; }

    bool radial() const { return radial_; }
    void set_radial(bool r) { radial_ = r; }

    // Index of the innermost interface with psi(x) ~ 0, if any.
    std::optional<int> on_interface(const Vec3& x) const;
    int region_of(const Vec3& x, std::optional<Side> side = std::nullopt) const;

    MediumEval eval(const Vec3& x, std::optional<Side> side = std::nullopt) const;
    MediumEval eval_region(const Vec3& x, int region) const;

  private:
    std::vector<Region> regions_;
    std::vector<Interface> interfaces_;
    double domain_radius_;
    bool radial_ = false;
};

// Convenience constructors used all over the tests and scenarios.
Medium homogeneous_medium(double rho, double c, double domain_radius = 2.0);
Medium radial_medium(RadialProfile rho, RadialProfile c, double ball_radius,
                     double domain_radius = 2.0);
// Concentric piecewise-constant ball: layer k occupies radii (r_{k+1}, r_k).
Medium layered_ball(const std::vector<double>& radii, const std::vector<double>& rho,
                    const std::vector<double>& c, double rho_outside = 1.0,
                    double c_outside = 1.0, double domain_radius = 2.0);
// Two half-spaces split by the plane n.x = d.
Medium halfspace_medium(double rho_minus, double c_minus, double rho_plus, double c_plus,
                        const Vec3& normal = Vec3(0, 0, 1), double offset = 0.0,
                        double domain_radius = 4.0);

struct InterfaceFrame {
    Vec3 nu;       // unit normal, out of Omega_+
    Vec3 t1, t2;   // tangents, (t1, t2, nu) right-handed orthonormal
    MediumEval minus, plus;
    int interface_index = -1;
};

// One-sided evaluation with the OnInterfaceWithoutSide/OutOfDomain contract.
MediumEval eval_medium(const Medium& m, const Vec3& x, std::optional<Side> side = std::nullopt);

InterfaceFrame interface_frame(const Medium& m, const Vec3& x);

// Foliation function kappa_f and its radial Herglotz check.
struct FoliationChart {
    double boundary_radius = 1.0;
    double value(const Vec3& x) const { return boundary_radius - x.norm(); }
    Vec3 gradient(const Vec3& x) const { return -x.normalized(); }
};

struct FoliationViolation {
    double r;
    std::string what;
};

struct FoliationReport {
    bool satisfied = true;
    std::vector<FoliationViolation> violations;
};

// Herglotz condition d/dr (r / c(r)) > 0 on a per-region radial grid, plus
// the interface jump condition c_inner <= c_outer at each interface radius.
FoliationReport check_foliation_radial(const Medium& m, int samples_per_region = 200);

}  // namespace gravac
