#include "gravac/inversion.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>

namespace gravac {

namespace {

double normal_R_of(const std::vector<ReflectionSample>& samples) {
    // Even in slowness: R(p) = R0 + a p^2. Use the normal sample if present,
    // otherwise extrapolate from the two smallest slownesses.
    double best = 1e300;
    double r_at_best = 0;
    std::vector<std::pair<double, double>> pr;
    for (const auto& s : samples) {
        if (s.order != 0) continue;
        pr.emplace_back(s.slowness(), s.value.real());
        if (s.slowness() < best) {
            best = s.slowness();
            r_at_best = s.value.real();
        }
    }
    if (pr.size() < 2) throw PreconditionError("InsufficientAngles", "need >= 2 order-0 samples");
    if (best < 1e-10) return r_at_best;
    std::sort(pr.begin(), pr.end());
    const auto [p1, r1] = pr[0];
    const auto [p2, r2] = pr[1];
    if (std::abs(p2 * p2 - p1 * p1) < 1e-14)
        throw PreconditionError("InsufficientAngles", "need distinct slownesses");
    return r1 - (r2 - r1) * p1 * p1 / (p2 * p2 - p1 * p1);
}

}  // namespace

Order0Result recover_order0(const std::vector<ReflectionSample>& samples, double rho_m,
                            double c_m, bool least_squares) {
    std::vector<ReflectionSample> s0;
    for (const auto& s : samples)
        if (s.order == 0) {
            if (s.cls == CovectorClass::Brewster || s.cls == CovectorClass::GlancingMinus ||
                s.cls == CovectorClass::GlancingPlus)
                throw PreconditionError("DegenerateSample", "Brewster/glancing sample in solve");
            s0.push_back(s);
        }
    if (s0.size() < 2) throw PreconditionError("InsufficientAngles", "need >= 2 order-0 samples");

    const double Zm = rho_m * c_m;
    const double R0 = normal_R_of(s0);
    if (!(std::abs(R0) < 1.0))
        throw NumericalError("DegenerateSample", "normal-incidence |R| >= 1");
    double Zp = Zm * (1.0 + R0) / (1.0 - R0);

    // Oblique sample with the largest slowness drives the speed solve.
    const auto* obl = &s0.front();
    for (const auto& s : s0)
        if (s.slowness() > obl->slowness()) obl = &s;
    if (obl->slowness() < 1e-10)
        throw PreconditionError("InsufficientAngles", "need one oblique slowness");

    const double p = obl->slowness();
    const double tau = obl->tau;
    auto residual = [&](double cp) {
        InterfaceSides sd{rho_m, c_m, Zp / cp, cp};
        return principal_R(sd, tau, p * tau) - obl->value.real();
    };
    const double hi = (1.0 / p) * (1.0 - 1e-9);
    const double lo = 1e-3 * c_m;
    double a = lo, b = hi;
    double fa = residual(a), fb = residual(b);
    if (fa * fb > 0.0) {
        // Scan for a sign change; the residual is monotone away from Brewster.
        bool found = false;
        double prev_x = a, prev_f = fa;
        for (int i = 1; i <= 200; ++i) {
            const double xs = lo + (hi - lo) * i / 200.0;
            const double fx = residual(xs);
            if (prev_f * fx <= 0.0) {
                a = prev_x;
                b = xs;
                found = true;
                break;
            }
            prev_x = xs;
            prev_f = fx;
        }
        if (!found) throw NumericalError("NoBracket", "oblique sample inconsistent with impedance");
    }
    boost::math::tools::eps_tolerance<double> tol(50);
    std::uintmax_t iters = 200;
    auto rr = boost::math::tools::toms748_solve(residual, a, b, tol, iters);
    double cp = 0.5 * (rr.first + rr.second);
    double rhop = Zp / cp;

    if (least_squares) {
        // Gauss-Newton over all samples on (Z, c).
        double Z = Zp, c = cp;
        for (int it = 0; it < 60; ++it) {
            Eigen::MatrixXd J(s0.size(), 2);
            Eigen::VectorXd r(s0.size());
            const double dZ = 1e-7 * Z, dc = 1e-7 * c;
            for (size_t k = 0; k < s0.size(); ++k) {
                const auto& s = s0[k];
                auto model = [&](double Zv, double cv) {
                    InterfaceSides sd{rho_m, c_m, Zv / cv, cv};
                    return principal_R(sd, s.tau, s.slowness() * s.tau);
                };
                const double m0 = model(Z, c);
                r[k] = m0 - s.value.real();
                J(k, 0) = (model(Z + dZ, c) - m0) / dZ;
                J(k, 1) = (model(Z, c + dc) - m0) / dc;
            }
            Eigen::Vector2d step = (J.transpose() * J).ldlt().solve(-J.transpose() * r);
            Z += step[0];
            c += step[1];
            if (step.norm() < 1e-12 * (std::abs(Z) + std::abs(c))) break;
        }
        Zp = Z;
        cp = c;
        rhop = Z / c;
    }

    Order0Result out;
    out.rho_p = rhop;
    out.c_p = cp;
    for (const auto& s : s0) {
        InterfaceSides sd{rho_m, c_m, rhop, cp};
        out.max_residual = std::max(
            out.max_residual,
            std::abs(principal_R(sd, s.tau, s.slowness() * s.tau) - s.value.real()));
    }
    return out;
}

Eigen::MatrixXd order1_design(const std::vector<ReflectionSample>& samples,
                              const InterfaceSides& sides) {
    Eigen::MatrixXd A(samples.size(), 5);
    for (size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        const double eta_norm = s.eta.norm();
        const double xi_T3 = vertical_xi(sides.c_p, s.tau, eta_norm);
        const double abs_xi_T = s.tau / sides.c_p;
        const double xi_hat_T3 = xi_T3 / abs_xi_T;
        const double aT0 = principal_T(sides, s.tau, eta_norm);
        A(k, 0) = -0.5 * (1.0 - 3.0 * eta_norm * eta_norm / (xi_T3 * xi_T3)) * aT0;
        A(k, 1) = -1.0 * aT0;
        A(k, 2) = -sides.rho_p * s.eta[0] * xi_hat_T3 / abs_xi_T * aT0;
        A(k, 3) = -sides.rho_p * s.eta[1] * xi_hat_T3 / abs_xi_T * aT0;
        A(k, 4) = -sides.rho_p * xi_T3 * xi_hat_T3 / abs_xi_T * aT0;
    }
    return A;
}

Order1Result recover_order1(const std::vector<ReflectionSample>& samples,
                            const InterfaceSides& sides) {
    if (samples.size() < 5)
        throw PreconditionError("InsufficientAngles", "need >= 5 order -1 samples");
    for (const auto& s : samples)
        if (s.cls == CovectorClass::Brewster || s.cls == CovectorClass::GlancingMinus ||
            s.cls == CovectorClass::GlancingPlus)
            throw PreconditionError("DegenerateSample", "Brewster/glancing sample in solve");

    const Eigen::MatrixXd A = order1_design(samples, sides);
    Eigen::VectorXd b(samples.size());
    for (size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        const Complex D = transmission_det(sides, s.tau, s.eta.norm());
        const Complex scaled = D * s.value;
        b[k] = scaled.real();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Order1Result out;
    out.rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-10 * sv[0]) ++out.rank;
    if (out.rank < 5)
        throw NumericalError("RankDeficientDesign", "order-1 covector design is rank-deficient");
    out.condition = sv[0] / sv[sv.size() - 1];
    const Eigen::VectorXd x = svd.solve(b);
    out.dnu_log_c_p = x[0];
    out.dnu_log_sqrt_rho_p = x[1];
    out.grad_phi = Vec3(x[2], x[3], x[4]);
    return out;
}

std::vector<RayTransformDatum> ray_transform_forward(const Medium& m, const TensorField& B,
                                                     const std::vector<PhasePoint>& starts,
                                                     double max_s) {
    std::vector<RayTransformDatum> out;
    out.reserve(starts.size());
    TraceOptions opt;
    opt.max_s = max_s;
    for (const auto& p0 : starts) {
        RayPath path = trace(m, nullptr, p0, opt);
        if (path.status != RayStatus::Ok)
            throw NumericalError("CausticOnPath", "geodesic left the admissible family");
        RayTransformDatum d;
        d.entry_x = path.start().x;
        d.entry_dir = path.start().xi.normalized();
        d.exit_x = path.end().x;
        d.exit_dir = path.end().xi.normalized();

        // Fine RK4 re-integration of (x, xi, I), stopped at the domain edge.
        const double s_end = path.length();
        const int nstep = std::max(200, static_cast<int>(s_end / 0.002));
        const double h = s_end / nstep;
        const double r_stop = m.domain_radius() - 3.0 * h;
        Vec3 x = p0.x, xi = p0.xi;
        double I = 0.0;
        auto rhs = [&](const Vec3& xv, const Vec3& xiv, Vec3& dx, Vec3& dxi, double& dI) {
            const auto e = m.eval(xv);
            const Vec3 N = xiv.normalized();
            dx = N;
            dxi = -xiv.norm() * e.grad_log_c();
            dI = N.dot(B(xv) * N);
        };
        for (int i = 0; i < nstep; ++i) {
            if (i > nstep / 2 && x.norm() > r_stop) break;
            Vec3 k1x, k1xi, k2x, k2xi, k3x, k3xi, k4x, k4xi;
            double k1I, k2I, k3I, k4I;
            rhs(x, xi, k1x, k1xi, k1I);
            rhs(x + 0.5 * h * k1x, xi + 0.5 * h * k1xi, k2x, k2xi, k2I);
            rhs(x + 0.5 * h * k2x, xi + 0.5 * h * k2xi, k3x, k3xi, k3I);
            rhs(x + h * k3x, xi + h * k3xi, k4x, k4xi, k4I);
            x += (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x);
            xi += (h / 6.0) * (k1xi + 2 * k2xi + 2 * k3xi + k4xi);
            I += (h / 6.0) * (k1I + 2 * k2I + 2 * k3I + k4I);
        }
        d.value = I;
        out.push_back(d);
    }
    return out;
}

TensorField symmetrized_differential(const VectorField& v, const Medium& m, double fd_h) {
    return [v, &m, fd_h](const Vec3& x) {
        Mat3 grad_v;
        for (int a = 0; a < 3; ++a) {
            Vec3 e = Vec3::Zero();
            e[a] = 1.0;
            const Vec3 d = (-v(x + 2 * fd_h * e) + 8.0 * v(x + fd_h * e) - 8.0 * v(x - fd_h * e) +
                            v(x - 2 * fd_h * e)) /
                           (12.0 * fd_h);
            grad_v.row(a) = d.transpose();
        }
        const Vec3 vx = v(x);
        const auto ev = m.eval(x);
        const Vec3 glc = ev.grad_log_c();
        Mat3 dv = 0.5 * (grad_v + grad_v.transpose());
        dv += sym_outer(vx, glc);
        dv -= vx.dot(glc) * Mat3::Identity();
        return dv;
    };
}

// ---------------------------------------------------------------------------

ScalarGrid ScalarGrid::sample(const FdGrid& g, const std::function<double(const Vec3&)>& f) {
    ScalarGrid s;
    s.g = g;
    s.v.resize(g.size());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) s.v[g.idx(i, j, k)] = f(g.node(i, j, k));
    return s;
}

namespace {
inline void shift(int idx[3], int axis, int by) { idx[axis] += by; }
}  // namespace

double ScalarGrid::d1(int i, int j, int k, int axis) const {
    int p1[3] = {i, j, k}, p2[3] = {i, j, k}, m1[3] = {i, j, k}, m2[3] = {i, j, k};
    shift(p1, axis, 1);
    shift(p2, axis, 2);
    shift(m1, axis, -1);
    shift(m2, axis, -2);
    return (-at(p2[0], p2[1], p2[2]) + 8.0 * at(p1[0], p1[1], p1[2]) -
            8.0 * at(m1[0], m1[1], m1[2]) + at(m2[0], m2[1], m2[2])) /
           (12.0 * g.h());
}

double ScalarGrid::d2(int i, int j, int k, int a, int b) const {
    if (a == b) {
        int p1[3] = {i, j, k}, p2[3] = {i, j, k}, m1[3] = {i, j, k}, m2[3] = {i, j, k};
        shift(p1, a, 1);
        shift(p2, a, 2);
        shift(m1, a, -1);
        shift(m2, a, -2);
        return (-at(p2[0], p2[1], p2[2]) + 16.0 * at(p1[0], p1[1], p1[2]) - 30.0 * at(i, j, k) +
                16.0 * at(m1[0], m1[1], m1[2]) - at(m2[0], m2[1], m2[2])) /
               (12.0 * g.h() * g.h());
    }
    // Mixed: 4th-order cross stencil composed from first derivatives.
    auto d1b = [&](int ii, int jj, int kk) {
        int p1[3] = {ii, jj, kk}, p2[3] = {ii, jj, kk}, m1[3] = {ii, jj, kk}, m2[3] = {ii, jj, kk};
        shift(p1, b, 1);
        shift(p2, b, 2);
        shift(m1, b, -1);
        shift(m2, b, -2);
        return (-at(p2[0], p2[1], p2[2]) + 8.0 * at(p1[0], p1[1], p1[2]) -
                8.0 * at(m1[0], m1[1], m1[2]) + at(m2[0], m2[1], m2[2])) /
               (12.0 * g.h());
    };
    int p1[3] = {i, j, k}, p2[3] = {i, j, k}, m1[3] = {i, j, k}, m2[3] = {i, j, k};
    shift(p1, a, 1);
    shift(p2, a, 2);
    shift(m1, a, -1);
    shift(m2, a, -2);
    return (-d1b(p2[0], p2[1], p2[2]) + 8.0 * d1b(p1[0], p1[1], p1[2]) -
            8.0 * d1b(m1[0], m1[1], m1[2]) + d1b(m2[0], m2[1], m2[2])) /
           (12.0 * g.h());
}

double ScalarGrid::lap(int i, int j, int k) const {
    return d2(i, j, k, 0, 0) + d2(i, j, k, 1, 1) + d2(i, j, k, 2, 2);
}

TensorGrid TensorGrid::sample(const FdGrid& g, const TensorField& f) {
    TensorGrid t;
    t.g = g;
    for (auto& c : t.comp) c.resize(g.size());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            for (int k = 0; k < g.n; ++k) {
                const Mat3 M = f(g.node(i, j, k));
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        t.comp[a * 3 + b][g.idx(i, j, k)] = M(a, b);
            }
    return t;
}

Mat3 TensorGrid::at(int i, int j, int k) const {
    Mat3 M;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) M(a, b) = comp[a * 3 + b][g.idx(i, j, k)];
    return M;
}

Tensor4 SaintVenantField::at(int i, int j, int k) const {
    Tensor4 W;
    for (int i1 = 0; i1 < 3; ++i1)
        for (int i2 = 0; i2 < 3; ++i2)
            for (int j1 = 0; j1 < 3; ++j1)
                for (int j2 = 0; j2 < 3; ++j2)
                    W(i1, i2, j1, j2) = comp_[j1 * 3 + j2].d2(i, j, k, i1, i2) +
                                        comp_[i1 * 3 + i2].d2(i, j, k, j1, j2) -
                                        comp_[i1 * 3 + j2].d2(i, j, k, i2, j1) -
                                        comp_[i2 * 3 + j1].d2(i, j, k, i1, j2);
    return W;
}

double SaintVenantField::contraction(int i, int j, int k) const {
    // sum_ij [B_jj,ii + B_ii,jj - B_ij,ij - B_ji,ij] without forming W.
    double acc = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            acc += comp_[b * 3 + b].d2(i, j, k, a, a) + comp_[a * 3 + a].d2(i, j, k, b, b) -
                   comp_[a * 3 + b].d2(i, j, k, a, b) - comp_[b * 3 + a].d2(i, j, k, a, b);
    return acc;
}

SaintVenantField saint_venant_W(TensorGrid B) { return SaintVenantField(std::move(B)); }

TensorField pair_difference_tensor(const MediaPair& pair, const FamilyPtr& family,
                                   bool selfgrav) {
    const MediaPair p = pair;
    return [p, family, selfgrav](const Vec3& x) {
        const WavefrontJet jet = family->jet(x);
        RayJetContext ctx;
        ctx.xi = jet.xi;
        ctx.grad_xi = jet.grad_xi;
        ctx.grad_H_over_H = family->grad_H_over_H(x);
        const Mat3 A = tensor_A(x, ctx, *p.m, *p.grav, selfgrav).displayed;
        const Mat3 At = tensor_A(x, ctx, *p.m_tilde, *p.grav_tilde, selfgrav).displayed;
        const double c = p.m->eval(x).c;
        return Mat3((A - At) / c);
    };
}

ScalarGrid contraction_T4(const MediaPair& pair, const FdGrid& grid) {
    // The I-block scalar of the elliptic reduction plus the Hessian block;
    // W annihilates the Hessian and maps the I-block to 4 * Delta(scalar).
    auto beta_minus = [&](const Vec3& x) {
        return std::log(std::sqrt(pair.m->eval(x).rho / pair.m_tilde->eval(x).rho));
    };
    auto scalar = [&](const Vec3& x) {
        const auto e = pair.m->eval(x);
        const auto et = pair.m_tilde->eval(x);
        const double b = beta_minus(x);
        const Vec3 grad_bp = e.grad_log_sqrt_rho() + et.grad_log_sqrt_rho();
        const Vec3 grad_bm = e.grad_log_sqrt_rho() - et.grad_log_sqrt_rho();
        const Mat3 hess_bm = e.hess_log_sqrt_rho() - et.hess_log_sqrt_rho();
        double val = hess_bm.trace() + grad_bp.dot(grad_bm) +
                     pair.k0 * et.rho * (std::exp(b) - 1.0);
        if (pair.grav && pair.grav_tilde) {
            const Vec3 hsum = pair.grav->grad(x) + pair.grav_tilde->grad(x);
            const Vec3 gy = pair.grav->grad(x) - pair.grav_tilde->grad(x);
            val -= hsum.dot(gy);
        }
        return val;
    };
    TensorField T = [&](const Vec3& x) {
        const auto e = pair.m->eval(x);
        const auto et = pair.m_tilde->eval(x);
        const Mat3 hess_bm = e.hess_log_sqrt_rho() - et.hess_log_sqrt_rho();
        return Mat3((0.25 * scalar(x)) * Mat3::Identity() +
                    2.0 * e.c * e.c * hess_bm);
    };
    SaintVenantField W(TensorGrid::sample(grid, T));
    ScalarGrid out;
    out.g = grid;
    out.v.assign(grid.size(), 0.0);
    for (int i = 4; i < grid.n - 4; ++i)
        for (int j = 4; j < grid.n - 4; ++j)
            for (int k = 4; k < grid.n - 4; ++k)
                out.v[grid.idx(i, j, k)] = W.contraction(i, j, k);
    return out;
}

EllipticResidual elliptic_residual(const ScalarGrid& beta_minus, const ScalarGrid& Y,
                                   const std::function<double(const Vec3&)>& beta_plus,
                                   const std::function<double(const Vec3&)>& g_coeff,
                                   const std::function<Vec3(const Vec3&)>& h_coeff, double k0) {
    const FdGrid& g = beta_minus.g;
    if (Y.g.n != g.n) throw PreconditionError("GridTooCoarse", "fields must share one grid");
    if (g.n < 17) throw PreconditionError("GridTooCoarse", "need at least 17 nodes per axis");

    // Intermediate scalar fields, then biharmonic/Laplacian on them.
    ScalarGrid bp = ScalarGrid::sample(g, beta_plus);
    ScalarGrid gx = ScalarGrid::sample(g, g_coeff);
    ScalarGrid lap_b, lap_y, cross, expo, hdY;
    lap_b.g = lap_y.g = cross.g = expo.g = hdY.g = g;
    lap_b.v.assign(g.size(), 0.0);
    lap_y.v.assign(g.size(), 0.0);
    cross.v.assign(g.size(), 0.0);
    expo.v.assign(g.size(), 0.0);
    hdY.v.assign(g.size(), 0.0);

    for (int i = 2; i < g.n - 2; ++i)
        for (int j = 2; j < g.n - 2; ++j)
            for (int k = 2; k < g.n - 2; ++k) {
                const size_t q = g.idx(i, j, k);
                lap_b.v[q] = beta_minus.lap(i, j, k);
                lap_y.v[q] = Y.lap(i, j, k);
                Vec3 gb(beta_minus.d1(i, j, k, 0), beta_minus.d1(i, j, k, 1),
                        beta_minus.d1(i, j, k, 2));
                Vec3 gp(bp.d1(i, j, k, 0), bp.d1(i, j, k, 1), bp.d1(i, j, k, 2));
                cross.v[q] = gp.dot(gb);
                expo.v[q] = gx.v[q] * (std::exp(beta_minus.v[q]) - 1.0);
                Vec3 gy(Y.d1(i, j, k, 0), Y.d1(i, j, k, 1), Y.d1(i, j, k, 2));
                hdY.v[q] = h_coeff(g.node(i, j, k)).dot(gy);
            }

    EllipticResidual out;
    out.r1.g = out.r2.g = g;
    out.r1.v.assign(g.size(), 0.0);
    out.r2.v.assign(g.size(), 0.0);
    for (int i = 4; i < g.n - 4; ++i)
        for (int j = 4; j < g.n - 4; ++j)
            for (int k = 4; k < g.n - 4; ++k) {
                const size_t q = g.idx(i, j, k);
                const double bih_b = lap_b.lap(i, j, k);
                const double bih_y = lap_y.lap(i, j, k);
                out.r1.v[q] = bih_b + cross.lap(i, j, k) + k0 * expo.lap(i, j, k) -
                              hdY.lap(i, j, k);
                out.r2.v[q] = bih_y - k0 * expo.lap(i, j, k);
            }
    return out;
}

// ---------------------------------------------------------------------------

SyntheticData synthesize_layered(const Medium& m, double k0, double tau,
                                 const std::vector<double>& slownesses0, double noise,
                                 uint64_t seed) {
    if (!m.radial()) throw PreconditionError("NotRadial", "layer stripping needs a radial ball");
    const auto& ifaces = m.interfaces();
    if (ifaces.empty()) return {};
    auto grav = solve_phi_radial(m, k0);
    const auto* rg = dynamic_cast<const RadialGravity*>(grav.get());

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SyntheticData data;
    data.surface_radius = ifaces.front().radius;
    data.rho_outside = m.eval_region(Vec3(data.surface_radius * 1.0001, 0, 0), 0).rho;
    data.c_outside = m.eval_region(Vec3(data.surface_radius * 1.0001, 0, 0), 0).c;

    // One-way times to every interface from one traced normal-incidence ray.
    std::vector<double> t_oneway(ifaces.size(), 0.0);
    {
        const Vec3 x0(data.surface_radius, 0, 0);
        PhasePoint start = make_onshell(m, x0, Vec3(-1, 0, 0), tau);
        TraceOptions opt;
        opt.max_s = 2.5 * data.surface_radius;
        opt.max_events = static_cast<int>(ifaces.size()) + 2;
        RayPath path = trace(m, nullptr, start, opt);
        for (const auto& ev : path.events)
            if (ev.interface_id > 0 && ev.interface_id < static_cast<int>(ifaces.size()) &&
                t_oneway[ev.interface_id] == 0.0)
                t_oneway[ev.interface_id] = ev.incident.t;
    }

    for (size_t gi = 0; gi < ifaces.size(); ++gi) {
        InterfaceData d;
        d.truth_interface = static_cast<int>(gi);
        d.two_way_time = 2.0 * t_oneway[gi];

        const Vec3 xg(ifaces[gi].radius, 0, 0);
        InterfaceSides sides;
        sides.rho_m = m.eval(xg, Side::Minus).rho;
        sides.c_m = m.eval(xg, Side::Minus).c;
        sides.rho_p = m.eval(xg, Side::Plus).rho;
        sides.c_p = m.eval(xg, Side::Plus).c;
        if (std::abs(sides.rho_p - sides.rho_m) < 1e-14 &&
            std::abs(sides.c_p - sides.c_m) < 1e-14) {
            // No contrast: no reflected arrival from this interface.
            continue;
        }

        for (double p : slownesses0) {
            ReflectionSample s;
            s.tau = tau;
            s.eta = Eigen::Vector2d(p * tau, 0.0);
            s.order = 0;
            const MediumEval em = m.eval(xg, Side::Minus);
            const MediumEval ep = m.eval(xg, Side::Plus);
            s.cls = classify_covector(em, ep, tau, p);
            s.value = principal_R(sides, tau, p * tau);
            if (noise > 0.0) s.value *= (1.0 + noise * gauss(rng));
            d.order0.push_back(s);
        }

        // Order -1 covectors per the recovery sampling pattern: one normal,
        // one sign-reversed pair and two extra magnitudes.
        const double pmax = 0.5 / std::max(sides.c_m, sides.c_p);
        const std::vector<Eigen::Vector2d> etas = {
            {0.0, 0.0},           {pmax * tau, 0.0},        {-pmax * tau, 0.0},
            {0.0, 0.7 * pmax * tau}, {0.4 * pmax * tau, 0.2 * pmax * tau},
            {0.0, -0.7 * pmax * tau}};
        InterfaceJets jets;
        // Piecewise-constant layers: the material jets vanish; gravity does not.
        // Local frame: e3 is the transmission direction = inward = -r_hat,
        // so d3 Phi = -Phi'(r).
        jets.grad_phi = Vec3(0, 0, -rg->dphi_r(ifaces[gi].radius));
        for (const auto& eta : etas) {
            ReflectionSample s;
            s.tau = tau;
            s.eta = eta;
            s.order = -1;
            const MediumEval em = m.eval(xg, Side::Minus);
            const MediumEval ep = m.eval(xg, Side::Plus);
            s.cls = classify_covector(em, ep, tau, eta.norm() / tau);
            s.value = reflect_amp_minus1(sides, jets, tau, eta);
            d.order1.push_back(s);
        }
        data.interfaces.push_back(d);
    }
    return data;
}

LayerStripReport layer_strip(const SyntheticData& data, const Medium& truth, double k0) {
    LayerStripReport rep;
    if (data.interfaces.empty()) {
        rep.converged = true;
        return rep;
    }

    std::vector<double> radii_est, rho_est, c_est;
    double rho_cur = data.rho_outside, c_cur = data.c_outside;
    double r_prev = data.surface_radius;
    double t_prev = 0.0;

    for (size_t gi = 0; gi < data.interfaces.size(); ++gi) {
        const auto& d = data.interfaces[gi];
        const double r_est = r_prev - c_cur * (d.two_way_time - t_prev) / 2.0;

        Order0Result o0 = recover_order0(d.order0, rho_cur, c_cur);
        InterfaceSides sides{rho_cur, c_cur, o0.rho_p, o0.c_p};
        Order1Result o1 = recover_order1(d.order1, sides);

        LayerEstimate est;
        est.radius_est = r_est;
        est.rho_est = o0.rho_p;
        est.c_est = o0.c_p;
        est.grad_phi_est = o1.grad_phi;
        est.order1_condition = o1.condition;

        // Truth for the report.
        est.radius_true = truth.interfaces()[d.truth_interface].radius;
        const Vec3 xg(est.radius_true, 0, 0);
        est.rho_true = truth.eval(xg, Side::Plus).rho;
        est.c_true = truth.eval(xg, Side::Plus).c;

        radii_est.push_back(r_est);
        rho_est.push_back(o0.rho_p);
        c_est.push_back(o0.c_p);
        rep.layers.push_back(est);

        rho_cur = o0.rho_p;
        c_cur = o0.c_p;
        r_prev = r_est;
        t_prev = d.two_way_time;
    }

    // Close the loop: gravity of the recovered model at each recovered
    // interface against the order-1 gravity estimates. A contrast-free
    // surface is re-added so the body's full mass enters the forward solve.
    if (radii_est.empty() || radii_est.front() < data.surface_radius * (1.0 - 1e-9)) {
        radii_est.insert(radii_est.begin(), data.surface_radius);
        rho_est.insert(rho_est.begin(), data.rho_outside);
        c_est.insert(c_est.begin(), data.c_outside);
    }
    Medium recovered = layered_ball(radii_est, rho_est, c_est, data.rho_outside, data.c_outside,
                                    truth.domain_radius());
    auto grav = solve_phi_radial(recovered, k0);
    const auto* rg = dynamic_cast<const RadialGravity*>(grav.get());
    for (size_t gi = 0; gi < rep.layers.size(); ++gi) {
        auto& est = rep.layers[gi];
        // Same local frame as the synthesis: e3 inward, so d3 Phi = -Phi'.
        const double forward = -rg->dphi_r(est.radius_est);
        est.grad_phi_consistency = std::abs(est.grad_phi_est[2] - forward);
        const double rel_r = std::abs(est.radius_est - est.radius_true) /
                             std::abs(est.radius_true);
        const double rel_rho = std::abs(est.rho_est - est.rho_true) / est.rho_true;
        const double rel_c = std::abs(est.c_est - est.c_true) / est.c_true;
        rep.max_rel_error = std::max({rep.max_rel_error, rel_r, rel_rho, rel_c});
    }
    return rep;
}

}  // namespace gravac
