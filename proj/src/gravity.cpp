#include "gravac/gravity.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace gravac {

namespace {
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

double quad(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    return GK::integrate(f, a, b, 12, tol);
}
}  // namespace

RadialGravity::RadialGravity(const Medium& m, double k0, double quad_tol)
    : medium_(&m), k0_(k0), quad_tol_(quad_tol) {
    if (!m.radial()) throw PreconditionError("NotRadial", "radial Poisson solve needs a radial medium");
    for (const auto& g : m.interfaces()) {
        if (g.kind != Interface::Kind::Sphere)
            throw PreconditionError("NotRadial", "non-spherical interface");
        breakpoints_.push_back(g.radius);
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    support_radius_ = breakpoints_.empty() ? m.domain_radius() : breakpoints_.back();
    if (breakpoints_.empty() || breakpoints_.back() < support_radius_)
        breakpoints_.push_back(support_radius_);

    if (!std::isfinite(rho_r(0.5 * support_radius_, Side::Minus)))
        throw NumericalError("NonIntegrableDensity", "density not finite inside the body");

    // Cumulative moments at breakpoints; quadrature never crosses a jump.
    m_cum_.assign(breakpoints_.size() + 1, 0.0);
    s_cum_.assign(breakpoints_.size() + 1, 0.0);
    double lo = 0.0;
    for (size_t k = 0; k < breakpoints_.size(); ++k) {
        const double hi = breakpoints_[k];
        m_cum_[k + 1] = m_cum_[k] +
                        quad([this](double s) { return s * s * rho_r(s, Side::Minus); }, lo, hi,
                             quad_tol_);
        lo = hi;
    }
    // s_cum_[k] = integral from breakpoint k to the surface of s rho ds.
    s_cum_[breakpoints_.size()] = 0.0;
    for (int k = static_cast<int>(breakpoints_.size()) - 1; k >= 0; --k) {
        const double lo2 = k == 0 ? 0.0 : breakpoints_[k - 1];
        s_cum_[k] = s_cum_[k + 1] + quad([this](double s) { return s * rho_r(s, Side::Minus); },
                                         lo2, breakpoints_[k], quad_tol_);
    }
}

double RadialGravity::rho_r(double r, Side side) const {
    const double tol = 1e-12 * support_radius_;
    if (r > support_radius_ + tol) return 0.0;
    if (r > support_radius_ - tol && side == Side::Minus) return 0.0;  // vacuum outside
    const Vec3 x(std::clamp(r, 0.0, support_radius_), 0.0, 0.0);
    if (medium_->on_interface(x)) return medium_->eval(x, side).rho;
    return medium_->eval(x).rho;
}

double RadialGravity::enclosed(double r) const {
    if (r <= 0.0) return 0.0;
    r = std::min(r, support_radius_);
    size_t k = 0;
    while (k < breakpoints_.size() && breakpoints_[k] <= r) ++k;
    const double lo = k == 0 ? 0.0 : breakpoints_[k - 1];
    double m = m_cum_[k];
    if (r > lo)
        m += quad([this](double s) { return s * s * rho_r(s, Side::Minus); }, lo, r, quad_tol_);
    return m;
}

double RadialGravity::outer_moment(double r) const {
    if (r >= support_radius_) return 0.0;
    r = std::max(r, 0.0);
    size_t k = 0;
    while (k < breakpoints_.size() && breakpoints_[k] <= r) ++k;
    // r lies in panel (lo, breakpoints_[k]].
    const double hi = breakpoints_[k];
    double s = s_cum_[k + 1];
    s += quad([this](double t) { return t * rho_r(t, Side::Minus); }, r, hi, quad_tol_);
    return s;
}

double RadialGravity::phi_r(double r) const {
    r = std::abs(r);
    if (r >= support_radius_) {
        const double mt = m_cum_.back();
        return r > 0 ? -k0_ * mt / r : 0.0;
    }
    const double inner = r > 1e-14 ? enclosed(r) / r : 0.0;
    return -k0_ * (inner + outer_moment(r));
}

double RadialGravity::dphi_r(double r) const {
    r = std::abs(r);
    if (r < 1e-14) return 0.0;
    return k0_ * enclosed(r) / (r * r);
}

double RadialGravity::d2phi_r(double r, Side side) const {
    r = std::abs(r);
    if (r < 1e-14) return k0_ * rho_r(0.0, side) / 3.0;
    return k0_ * rho_r(r, side) - 2.0 * k0_ * enclosed(r) / (r * r * r);
}

Vec3 RadialGravity::grad(const Vec3& x) const {
    const double r = x.norm();
    if (r < 1e-14) return Vec3::Zero();
    return dphi_r(r) * x / r;
}

Mat3 RadialGravity::hess(const Vec3& x) const {
    const double r = x.norm();
    if (r < 1e-14) return d2phi_r(0.0) * Mat3::Identity();
    const Vec3 n = x / r;
    const Mat3 nn = n * n.transpose();
    return d2phi_r(r) * nn + (dphi_r(r) / r) * (Mat3::Identity() - nn);
}

GravityPtr solve_phi_radial(const Medium& m, double k0) {
    return std::make_shared<RadialGravity>(m, k0);
}

// ---------------------------------------------------------------------------
// Grid solver: node-based 7-point Laplacian on [-L, L]^3, Dirichlet faces from
// the multipole far field of the sampled density, direct solve by DST-I.
// ---------------------------------------------------------------------------

namespace {

double sample_rho(const Medium& m, const Vec3& x, double support_radius, double h) {
    // Sub-cell average tames the interface jump to second order.
    const int q = 3;
    double acc = 0.0;
    for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
            for (int c = 0; c < q; ++c) {
                Vec3 y = x + h * Vec3((a + 0.5) / q - 0.5, (b + 0.5) / q - 0.5,
                                      (c + 0.5) / q - 0.5);
                if (y.norm() >= support_radius) continue;
                acc += m.eval(y).rho;
            }
    return acc / (q * q * q);
}

}  // namespace

GravityPtr solve_phi_grid(const Medium& m, const GridSpec& spec, double k0) {
    const int n = spec.n;
    const double L = spec.extent;
    const double h = 2.0 * L / n;

    double support = spec.support_radius > 0 ? spec.support_radius : m.domain_radius();
    double min_feature = 2.0 * support;
    if (spec.support_radius <= 0 && !m.interfaces().empty()) {
        std::vector<double> radii;
        for (const auto& g : m.interfaces())
            if (g.kind == Interface::Kind::Sphere) radii.push_back(g.radius);
        if (!radii.empty()) {
            std::sort(radii.begin(), radii.end());
            support = radii.back();
            min_feature = radii.front();
            for (size_t i = 1; i < radii.size(); ++i)
                min_feature = std::min(min_feature, radii[i] - radii[i - 1]);
        }
    }
    if (support >= L)
        throw PreconditionError("SupportOutsideGrid", "density support must fit inside the box");
    if (min_feature < 4.0 * h)
        throw PreconditionError("GridTooCoarse", "interface features below 4 cells");

    auto node = [&](int i, int j, int k) { return Vec3(-L + i * h, -L + j * h, -L + k * h); };
    const int nn = n + 1;
    std::vector<double> rho(static_cast<size_t>(nn) * nn * nn, 0.0);
    auto id = [nn](int i, int j, int k) {
        return (static_cast<size_t>(i) * nn + j) * nn + k;
    };

    double m0 = 0.0;
    Vec3 dip = Vec3::Zero();
    Mat3 quadm = Mat3::Zero();
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k) {
                const Vec3 x = node(i, j, k);
                if (x.norm() > support + h) continue;
                const double r = sample_rho(m, x, support, h);
                rho[id(i, j, k)] = r;
                const double w = r * h * h * h;
                m0 += w;
                dip += w * x;
                quadm += w * (3.0 * x * x.transpose() - x.squaredNorm() * Mat3::Identity());
            }

    auto far_phi = [&](const Vec3& x) {
        const double r = x.norm();
        const Vec3 u = x / r;
        const double mono = m0 / r;
        const double dipole = dip.dot(u) / (r * r);
        const double quad_t = 0.5 * u.dot(quadm * u) / (r * r * r);
        return -k0 / (4.0 * M_PI) * (mono + dipole + quad_t);
    };

    // Right-hand side k0 rho at interior nodes, minus Dirichlet contributions.
    std::vector<double> phi(static_cast<size_t>(nn) * nn * nn, 0.0);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k)
                if (i == 0 || i == n || j == 0 || j == n || k == 0 || k == n)
                    phi[id(i, j, k)] = far_phi(node(i, j, k));

    const int ni = n - 1;
    std::vector<double> rhs(static_cast<size_t>(ni) * ni * ni);
    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j)
            for (int k = 1; k < n; ++k) {
                double b = k0 * rho[id(i, j, k)] * h * h;
                if (i == 1) b -= phi[id(0, j, k)];
                if (i == n - 1) b -= phi[id(n, j, k)];
                if (j == 1) b -= phi[id(i, 0, k)];
                if (j == n - 1) b -= phi[id(i, n, k)];
                if (k == 1) b -= phi[id(i, j, 0)];
                if (k == n - 1) b -= phi[id(i, j, n)];
                rhs[(static_cast<size_t>(i - 1) * ni + (j - 1)) * ni + (k - 1)] = b;
            }

    fftw_plan plan = fftw_plan_r2r_3d(ni, ni, ni, rhs.data(), rhs.data(), FFTW_RODFT00,
                                      FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    fftw_execute(plan);
    std::vector<double> lam(ni);
    for (int i = 0; i < ni; ++i) lam[i] = 2.0 * std::cos(M_PI * (i + 1) / n) - 2.0;
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < ni; ++j)
            for (int k = 0; k < ni; ++k)
                rhs[(static_cast<size_t>(i) * ni + j) * ni + k] /= lam[i] + lam[j] + lam[k];
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double norm = 1.0 / (8.0 * n * n * n);  // RODFT00 round trip scales by (2n)^3

    for (int i = 1; i < n; ++i)
        for (int j = 1; j < n; ++j)
            for (int k = 1; k < n; ++k)
                phi[id(i, j, k)] =
                    rhs[(static_cast<size_t>(i - 1) * ni + (j - 1)) * ni + (k - 1)] * norm;

    return std::make_shared<GridGravity>(std::move(phi), n, L, k0);
}

GridGravity::GridGravity(std::vector<double> phi_nodes, int n, double extent, double k0)
    : phi_(std::move(phi_nodes)), n_(n), extent_(extent), h_(2.0 * extent / n), k0_(k0) {
    build_derivatives();
}

void GridGravity::build_derivatives() {
    const int nn = n_ + 1;
    const size_t total = static_cast<size_t>(nn) * nn * nn;
    for (auto& d : dphi_) d.assign(total, 0.0);
    for (auto& d : d2phi_) d.assign(total, 0.0);
    auto clampd = [&](int i) { return std::clamp(i, 0, n_); };

    // diff: central difference of grid f along axis, one-sided on box faces.
    auto diff = [&](const std::vector<double>& f, int i, int j, int k, int axis) {
        int p[3] = {i, j, k}, mns[3] = {i, j, k};
        p[axis] = clampd(p[axis] + 1);
        mns[axis] = clampd(mns[axis] - 1);
        const double span = (p[axis] - mns[axis]) * h_;
        return (f[idx(p[0], p[1], p[2])] - f[idx(mns[0], mns[1], mns[2])]) / span;
    };

    for (int i = 0; i <= n_; ++i)
        for (int j = 0; j <= n_; ++j)
            for (int k = 0; k <= n_; ++k)
                for (int a = 0; a < 3; ++a) dphi_[a][idx(i, j, k)] = diff(phi_, i, j, k, a);

    const int pair[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
    for (int i = 0; i <= n_; ++i)
        for (int j = 0; j <= n_; ++j)
            for (int k = 0; k <= n_; ++k)
                for (int q = 0; q < 6; ++q) {
                    const int a = pair[q][0], b = pair[q][1];
                    d2phi_[q][idx(i, j, k)] = 0.5 * (diff(dphi_[a], i, j, k, b) +
                                                     diff(dphi_[b], i, j, k, a));
                }
}

double GridGravity::interp(const std::vector<double>& f, const Vec3& x) const {
    Vec3 u = (x + Vec3(extent_, extent_, extent_)) / h_;
    for (int a = 0; a < 3; ++a) u[a] = std::clamp(u[a], 0.0, static_cast<double>(n_) - 1e-12);
    const int i = static_cast<int>(u[0]), j = static_cast<int>(u[1]), k = static_cast<int>(u[2]);
    const double fx = u[0] - i, fy = u[1] - j, fz = u[2] - k;
    double acc = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                acc += f[idx(i + a, j + b, k + c)] * (a ? fx : 1 - fx) * (b ? fy : 1 - fy) *
                       (c ? fz : 1 - fz);
    return acc;
}

double GridGravity::phi(const Vec3& x) const { return interp(phi_, x); }

Vec3 GridGravity::grad(const Vec3& x) const {
    return Vec3(interp(dphi_[0], x), interp(dphi_[1], x), interp(dphi_[2], x));
}

Mat3 GridGravity::hess(const Vec3& x) const {
    Mat3 hm;
    const double xx = interp(d2phi_[0], x), yy = interp(d2phi_[1], x), zz = interp(d2phi_[2], x);
    const double xy = interp(d2phi_[3], x), xz = interp(d2phi_[4], x), yz = interp(d2phi_[5], x);
    hm << xx, xy, xz, xy, yy, yz, xz, yz, zz;
    return hm;
}

HydrostaticPressure hydrostatic_pressure(const Medium& m, const GravityField& g) {
    if (!m.radial()) throw PreconditionError("NotRadial", "hydrostatic pressure needs a radial medium");
    const auto* rg = dynamic_cast<const RadialGravity*>(&g);
    if (!rg) throw PreconditionError("NotRadial", "hydrostatic pressure needs the radial solver");
    const double R = rg->support_radius();
    const Medium* med = &m;
    auto rho_of = [med, R](double r) {
        if (r >= R) return 0.0;
        const Vec3 x(r, 0, 0);
        if (med->on_interface(x)) return med->eval(x, Side::Plus).rho;
        return med->eval(x).rho;
    };
    // Precompute on a fine grid per call; profiles are smooth per panel.
    auto p0 = [rho_of, rg, R](double r) {
        r = std::abs(r);
        if (r >= R) return 0.0;
        return GK::integrate([&](double s) { return rho_of(s) * rg->dphi_r(s); }, r, R, 12, 1e-10);
    };
    auto dp0 = [rho_of, rg](double r) { return -rho_of(r) * rg->dphi_r(r); };
    return {p0, dp0};
}

Mat3 selfgrav_symbol_b0(const Vec3& xi, double k0) {
    const double n2 = xi.squaredNorm();
    if (!(n2 > 0.0)) throw PreconditionError("ZeroCovector", "b0 needs xi != 0");
    return -k0 * (xi * xi.transpose()) / n2;
}

}  // namespace gravac
