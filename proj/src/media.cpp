#include "gravac/media.hpp"

#include <cmath>

namespace gravac {

double Interface::psi(const Vec3& x) const {
    switch (kind) {
        case Kind::Sphere: return x.norm() - radius;
        case Kind::Plane: return plane_normal.dot(x) - plane_offset;
        case Kind::LevelSet: return level(x);
    }
    return 0.0;
}

Vec3 Interface::psi_grad(const Vec3& x) const {
    switch (kind) {
        case Kind::Sphere: return x.normalized();
        case Kind::Plane: return plane_normal;
        case Kind::LevelSet: return level_grad(x);
    }
    return Vec3::Zero();
}

Mat3 Interface::psi_hess(const Vec3& x) const {
    switch (kind) {
        case Kind::Sphere: {
            const double r = x.norm();
            const Vec3 n = x / r;
            return (Mat3::Identity() - n * n.transpose()) / r;
        }
        case Kind::Plane: return Mat3::Zero();
        case Kind::LevelSet: return level_hess ? level_hess(x) : Mat3::Zero();
    }
    return Mat3::Zero();
}

Interface sphere_interface(double radius, std::string name) {
    Interface g;
    g.kind = Interface::Kind::Sphere;
    g.radius = radius;
    g.name = name.empty() ? "sphere" : std::move(name);
    return g;
}

Interface plane_interface(const Vec3& normal, double offset, std::string name) {
    Interface g;
    g.kind = Interface::Kind::Plane;
    g.plane_normal = normal.normalized();
    g.plane_offset = offset;
    g.name = name.empty() ? "plane" : std::move(name);
    return g;
}

Medium::Medium(std::vector<Region> regions, std::vector<Interface> interfaces,
               double domain_radius)
    : regions_(std::move(regions)), interfaces_(std::move(interfaces)),
      domain_radius_(domain_radius) {
    if (regions_.size() != interfaces_.size() + 1)
        throw PreconditionError("BadMedium", "need one region per side of each interface");
}

std::optional<int> Medium::on_interface(const Vec3& x) const {
    const double tol = interface_tolerance();
    for (int i = 0; i < static_cast<int>(interfaces_.size()); ++i)
        if (std::abs(interfaces_[i].psi(x)) < tol) return i;
    return std::nullopt;
}

int Medium::region_of(const Vec3& x, std::optional<Side> side) const {
    const double tol = interface_tolerance();
    int k = 0;
    for (int i = 0; i < static_cast<int>(interfaces_.size()); ++i) {
        const double p = interfaces_[i].psi(x);
        if (std::abs(p) < tol) {
            if (!side)
                throw PreconditionError("OnInterfaceWithoutSide",
                                        "point lies on interface '" + interfaces_[i].name +
                                            "'; pass a side");
            // minus side = region above this interface (index i), plus = below (i+1).
            return *side == Side::Minus ? i : i + 1;
        }
        if (p < 0.0) k = i + 1;
    }
    return k;
}

MediumEval Medium::eval_region(const Vec3& x, int region) const {
    const Region& reg = regions_.at(region);
    MediumEval e;
    e.rho = reg.rho->value(x);
    e.c = reg.c->value(x);
    e.kappa = e.rho * e.c * e.c;
    e.grad_rho = reg.rho->gradient(x);
    e.grad_c = reg.c->gradient(x);
    e.hess_rho = reg.rho->hessian(x);
    e.hess_c = reg.c->hessian(x);
    if (!(e.rho > 0.0) || !(e.c > 0.0))
        throw NumericalError("NonPositiveField", "rho and c must stay positive");
    return e;
}

MediumEval Medium::eval(const Vec3& x, std::optional<Side> side) const {
    if (x.norm() > domain_radius_ * (1.0 + 1e-12))
        throw PreconditionError("OutOfDomain", "point outside sampled domain");
    return eval_region(x, region_of(x, side));
}

MediumEval eval_medium(const Medium& m, const Vec3& x, std::optional<Side> side) {
    return m.eval(x, side);
}

InterfaceFrame interface_frame(const Medium& m, const Vec3& x) {
    const auto idx = m.on_interface(x);
    if (!idx) throw PreconditionError("NotOnInterface", "point is not on any interface");
    InterfaceFrame f;
    f.interface_index = *idx;
    f.nu = m.interfaces()[*idx].normal(x);
    // Any orthonormal completion works; pick deterministically.
    Vec3 a = std::abs(f.nu[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    f.t1 = (a - a.dot(f.nu) * f.nu).normalized();
    f.t2 = f.nu.cross(f.t1);
    f.minus = m.eval(x, Side::Minus);
    f.plus = m.eval(x, Side::Plus);
    return f;
}

Medium homogeneous_medium(double rho, double c, double domain_radius) {
    std::vector<Region> regs;
    regs.push_back({std::make_shared<ConstantField>(rho), std::make_shared<ConstantField>(c),
                    "bulk"});
    Medium m(std::move(regs), {}, domain_radius);
    m.set_radial(true);
    return m;
}

Medium radial_medium(RadialProfile rho, RadialProfile c, double ball_radius,
                     double domain_radius) {
    std::vector<Region> regs;
    regs.push_back({std::make_shared<ConstantField>(rho.f(ball_radius)),
                    std::make_shared<ConstantField>(c.f(ball_radius)), "exterior"});
    regs.push_back({std::make_shared<RadialField>(rho), std::make_shared<RadialField>(c),
                    "ball"});
    Medium m(std::move(regs), {sphere_interface(ball_radius, "boundary")}, domain_radius);
    m.set_radial(true);
    return m;
}

Medium layered_ball(const std::vector<double>& radii, const std::vector<double>& rho,
                    const std::vector<double>& c, double rho_outside, double c_outside,
                    double domain_radius) {
    if (rho.size() != radii.size() || c.size() != radii.size())
        throw PreconditionError("BadMedium", "one (rho, c) pair per layer radius");
    std::vector<Region> regs;
    std::vector<Interface> ifaces;
    regs.push_back({std::make_shared<ConstantField>(rho_outside),
                    std::make_shared<ConstantField>(c_outside), "exterior"});
    for (size_t k = 0; k < radii.size(); ++k) {
        ifaces.push_back(sphere_interface(radii[k], "r=" + std::to_string(radii[k])));
        regs.push_back({std::make_shared<ConstantField>(rho[k]),
                        std::make_shared<ConstantField>(c[k]),
                        "layer" + std::to_string(k)});
    }
    Medium m(std::move(regs), std::move(ifaces), domain_radius);
    m.set_radial(true);
    return m;
}

Medium halfspace_medium(double rho_minus, double c_minus, double rho_plus, double c_plus,
                        const Vec3& normal, double offset, double domain_radius) {
    std::vector<Region> regs;
    regs.push_back({std::make_shared<ConstantField>(rho_minus),
                    std::make_shared<ConstantField>(c_minus), "minus"});
    regs.push_back({std::make_shared<ConstantField>(rho_plus),
                    std::make_shared<ConstantField>(c_plus), "plus"});
    return Medium(std::move(regs), {plane_interface(normal, offset)}, domain_radius);
}

FoliationReport check_foliation_radial(const Medium& m, int samples_per_region) {
    if (!m.radial()) throw PreconditionError("NotRadial", "medium lacks radial symmetry metadata");
    FoliationReport rep;
    // Region radial extents: outermost interface radius down to 0.
    std::vector<double> radii;
    for (const auto& g : m.interfaces()) {
        if (g.kind != Interface::Kind::Sphere)
            throw PreconditionError("NotRadial", "non-spherical interface in radial medium");
        radii.push_back(g.radius);
    }
    radii.insert(radii.begin(), radii.empty() ? 1.0 : radii.front());  // outer boundary
    const double r_out = m.interfaces().empty() ? m.domain_radius() : m.interfaces().front().radius;

    auto c_at = [&m](double r, Side side) {
        const Vec3 x(r, 0, 0);
        return m.eval(x, side).c;
    };

    // Herglotz d/dr (r/c) = (c - r c') / c^2 > 0, sampled per region.
    const int nreg = static_cast<int>(m.regions().size());
    for (int k = 1; k < nreg; ++k) {  // interior regions only; k=0 is the exterior
        const double hi = m.interfaces()[k - 1].radius;
        const double lo = (k < nreg - 1) ? m.interfaces()[k].radius : 0.0;
        for (int i = 0; i < samples_per_region; ++i) {
            const double r = lo + (hi - lo) * (i + 0.5) / samples_per_region;
            if (r < 1e-9) continue;
            const Vec3 x(r, 0, 0);
            const auto e = m.eval_region(x, k);
            const double dc_dr = e.grad_c.dot(x.normalized());
            const double herglotz = (e.c - r * dc_dr) / (e.c * e.c);
            if (!(herglotz > 0.0))
                rep.violations.push_back({r, "Herglotz d/dr(r/c) <= 0"});
        }
    }
    // Interface condition: speed limit from inside (deeper) <= from outside.
    for (const auto& g : m.interfaces()) {
        if (g.radius >= r_out && m.interfaces().size() > 1) continue;
        const double ci = c_at(g.radius, Side::Plus);   // inner side
        const double co = c_at(g.radius, Side::Minus);  // outer side
        if (ci > co * (1.0 + 1e-12))
            rep.violations.push_back({g.radius, "interface jump: c_inner > c_outer"});
    }
    rep.satisfied = rep.violations.empty();
    return rep;
}

}  // namespace gravac
