#include "gravac/rays.hpp"

#include <algorithm>
#include <cmath>

namespace gravac {

namespace {

// State carried by the integrator: x, xi, t, and the 6x6 variational matrix.
struct OdeState {
    Vec3 x;
    Vec3 xi;
    double t;
    Mat6 P;

    OdeState operator+(const OdeState& o) const { return {x + o.x, xi + o.xi, t + o.t, P + o.P}; }
    OdeState operator*(double a) const { return {a * x, a * xi, a * t, a * P}; }
};

OdeState operator*(double a, const OdeState& s) { return s * a; }

struct Deriv {
    const Medium* m;
    int region;

    OdeState operator()(const OdeState& y) const {
        const auto e = m->eval_region(y.x, region);
        const double nxi = y.xi.norm();
        const Vec3 N = y.xi / nxi;
        const Vec3 glc = e.grad_log_c();
        OdeState d;
        d.x = N;
        d.xi = -nxi * glc;
        d.t = 1.0 / e.c;
        Mat6 J = Mat6::Zero();
        J.block<3, 3>(0, 3) = (Mat3::Identity() - N * N.transpose()) / nxi;
        J.block<3, 3>(3, 0) = -nxi * e.hess_log_c();
        J.block<3, 3>(3, 3) = -glc * N.transpose();
        d.P = J * y.P;
        return d;
    }
};

// Dormand-Prince RK45 coefficients.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;

struct StepResult {
    OdeState y;
    OdeState f_new;
    double err;
};

StepResult dopri_step(const Deriv& f, const OdeState& y, const OdeState& f0, double h) {
    const OdeState k1 = f0;
    const OdeState k2 = f(y + h * (A21 * k1));
    const OdeState k3 = f(y + h * (A31 * k1 + A32 * k2));
    const OdeState k4 = f(y + h * (A41 * k1 + A42 * k2 + A43 * k3));
    const OdeState k5 = f(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    const OdeState k6 = f(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    OdeState y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    const OdeState k7 = f(y5);
    const OdeState err_state =
        h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    double err = std::sqrt(err_state.x.squaredNorm() + err_state.xi.squaredNorm() +
                           err_state.t * err_state.t);
    return {y5, k7, err};
}

PhasePoint to_phase(const OdeState& y, double tau) { return {y.t, y.x, tau, y.xi}; }

// Jacobian of the unit-normal field of an interface.
Mat3 normal_jacobian(const Interface& g, const Vec3& x) {
    const Vec3 gd = g.psi_grad(x);
    const double mag = gd.norm();
    const Vec3 n = gd / mag;
    return (Mat3::Identity() - n * n.transpose()) * g.psi_hess(x) / mag;
}

}  // namespace

PhasePoint make_onshell(const Medium& m, const Vec3& x, const Vec3& direction, double tau,
                        double t0) {
    std::optional<Side> side;
    if (auto gi = m.on_interface(x)) {
        // Starting on an interface: the travel direction picks the side.
        const Vec3 nu = m.interfaces()[*gi].normal(x);
        side = direction.dot(nu) < 0 ? Side::Plus : Side::Minus;
    }
    const auto e = m.eval(x, side);
    PhasePoint p;
    p.t = t0;
    p.x = x;
    p.tau = tau;
    p.xi = (tau / e.c) * direction.normalized();
    return p;
}

PhasePoint RayPath::at(double s) const {
    for (const auto& seg : segments) {
        if (s > seg.s_end + 1e-14) continue;
        const auto& v = seg.samples;
        auto it = std::lower_bound(v.begin(), v.end(), s,
                                   [](const RaySample& a, double val) { return a.s < val; });
        if (it == v.begin()) return it->p;
        if (it == v.end()) return v.back().p;
        const auto& b = *it;
        const auto& a = *(it - 1);
        const double w = (s - a.s) / (b.s - a.s);
        PhasePoint p;
        p.t = (1 - w) * a.p.t + w * b.p.t;
        p.x = (1 - w) * a.p.x + w * b.p.x;
        p.tau = a.p.tau;
        p.xi = (1 - w) * a.p.xi + w * b.p.xi;
        return p;
    }
    return segments.back().samples.back().p;
}

Mat6 RayPath::propagator_at(double s) const {
    for (const auto& seg : segments) {
        if (s > seg.s_end + 1e-14) continue;
        const auto& v = seg.samples;
        auto it = std::lower_bound(v.begin(), v.end(), s,
                                   [](const RaySample& a, double val) { return a.s < val; });
        if (it == v.end()) return v.back().propagator;
        return it->propagator;
    }
    return segments.back().samples.back().propagator;
}

SnellResult snell_refract(const PhasePoint& state, const InterfaceFrame& frame,
                          double glancing_tol) {
    const Vec3 xi = state.xi;
    const double nxi = xi.norm();
    const double cosang = std::abs(xi.dot(frame.nu)) / nxi;
    if (cosang < glancing_tol)
        throw PreconditionError("Glancing", "tangential incidence at interface");

    // Propagation-oriented normal and far-side material.
    const double sgn = xi.dot(frame.nu) > 0 ? 1.0 : -1.0;
    const Vec3 nhat = sgn * frame.nu;
    const MediumEval& far = sgn > 0 ? frame.minus : frame.plus;
    const Vec3 eta = xi - xi.dot(nhat) * nhat;

    SnellResult out;
    out.reflected = state;
    out.reflected.xi = xi - 2.0 * xi.dot(nhat) * nhat;

    const double q2 = state.tau * state.tau / (far.c * far.c) - eta.squaredNorm();
    if (q2 > 0.0) {
        const double q = std::sqrt(q2);
        if (q / (state.tau / far.c) >= glancing_tol) {
            out.transmitted = state;
            out.transmitted->xi = eta + q * nhat;
        }
    }
    return out;
}

std::optional<double> brewster_slowness(double rho_m, double c_m, double rho_p, double c_p) {
    const double den = (c_p * c_p * c_m * c_m) * (rho_p * rho_p - rho_m * rho_m);
    if (std::abs(den) < 1e-300) return std::nullopt;
    const double num = (rho_p * c_p) * (rho_p * c_p) - (rho_m * c_m) * (rho_m * c_m);
    const double val = std::sqrt(std::abs(num / den));
    // The formula's root is a genuine zero of sigma0(M_R) only if it is
    // sub-critical on both sides; otherwise report none.
    if (val >= 1.0 / c_m || val >= 1.0 / c_p) return std::nullopt;
    return val;
}

CovectorClass classify_covector(const MediumEval& minus, const MediumEval& plus, double tau,
                                double slowness, double tol) {
    if (tau == 0.0) throw PreconditionError("ZeroFrequency", "tau must be nonzero");
    const double gm = 1.0 / (minus.c * minus.c) - slowness * slowness;
    const double gp = 1.0 / (plus.c * plus.c) - slowness * slowness;
    if (std::abs(gm) < tol) return CovectorClass::GlancingMinus;
    if (std::abs(gp) < tol) return CovectorClass::GlancingPlus;
    if (gm < 0.0) return CovectorClass::PostCriticalMinus;
    if (gp < 0.0) return CovectorClass::PostCriticalPlus;
    if (auto b = brewster_slowness(minus.rho, minus.c, plus.rho, plus.c))
        if (std::abs(slowness - *b) < tol) return CovectorClass::Brewster;
    return CovectorClass::HH;
}

namespace {

// Equal-parameter paraxial transfer across an event.
Mat6 event_transfer(const Medium& m, const Interface& g, const PhasePoint& inc,
                    const PhasePoint& out, bool transmitted, int region_in, int region_out) {
    const Vec3 x = inc.x;
    const Vec3 n = g.normal(x);
    const Mat3 DN = normal_jacobian(g, x);
    const auto e_in = m.eval_region(x, region_in);
    const auto e_out = m.eval_region(x, region_out);

    const double nxi_in = inc.xi.norm();
    const Vec3 Nin = inc.xi / nxi_in;
    const Vec3 xidot_in = -nxi_in * e_in.grad_log_c();
    const double nxi_out = out.xi.norm();
    const Vec3 Nout = out.xi / nxi_out;
    const Vec3 xidot_out = -nxi_out * e_out.grad_log_c();

    // (dx, dxi) -> crossing-time shift ds = -(n.dx)/(n.Nin)
    Eigen::Matrix<double, 1, 6> ds_row = Eigen::Matrix<double, 1, 6>::Zero();
    ds_row.block<1, 3>(0, 0) = -n.transpose() / n.dot(Nin);

    // State at the crossing point.
    Mat6 to_gamma = Mat6::Identity();
    to_gamma.block<3, 6>(0, 0) += Nin * ds_row;
    to_gamma.block<3, 6>(3, 0) += xidot_in * ds_row;

    // Outgoing covector as a function of (x_Gamma, xi_Gamma).
    Mat3 dxi_dx, dxi_dxi;
    if (!transmitted) {
        const double xin = inc.xi.dot(n);
        dxi_dxi = Mat3::Identity() - 2.0 * n * n.transpose();
        dxi_dx = -2.0 * (n * (inc.xi.transpose() * DN) + xin * DN);
    } else {
        const double sgn = inc.xi.dot(n) > 0 ? 1.0 : -1.0;
        const Vec3 nh = sgn * n;
        const Mat3 DNh = sgn * DN;
        const Vec3 eta = inc.xi - inc.xi.dot(nh) * nh;
        const double q = out.xi.dot(nh);
        // d eta / d xi and / d x
        const Mat3 deta_dxi = Mat3::Identity() - nh * nh.transpose();
        const Mat3 deta_dx = -(nh * (inc.xi.transpose() * DNh) + inc.xi.dot(nh) * DNh);
        // On the characteristic set tau = c_in |xi|, so
        // q^2 = (c_in/c_out)^2 |xi|^2 - |eta|^2 with both speeds x-dependent.
        const double ratio2 = (e_in.c * e_in.c) / (e_out.c * e_out.c);
        const Eigen::RowVector3d dq_dxi =
            (ratio2 * inc.xi.transpose() - eta.transpose() * deta_dxi) / q;
        const Eigen::RowVector3d dq_dx =
            (inc.xi.squaredNorm() *
                 (e_in.c * e_in.grad_c.transpose() / (e_out.c * e_out.c) -
                  e_in.c * e_in.c * e_out.grad_c.transpose() /
                      (e_out.c * e_out.c * e_out.c)) -
             eta.transpose() * deta_dx) /
            q;
        dxi_dxi = deta_dxi + nh * dq_dxi;
        dxi_dx = deta_dx + nh * dq_dx + q * DNh;
    }

    Mat6 across = Mat6::Zero();
    across.block<3, 3>(0, 0) = Mat3::Identity();
    across.block<3, 3>(3, 0) = dxi_dx;
    across.block<3, 3>(3, 3) = dxi_dxi;

    // Back the outgoing ray up by ds so both sides are compared at equal s.
    Mat6 total = across * to_gamma;
    total.block<3, 6>(0, 0) -= Nout * ds_row;
    total.block<3, 6>(3, 0) -= xidot_out * ds_row;
    return total;
}

}  // namespace

RayPath trace(const Medium& m, const GravityField* /*gravity*/, const PhasePoint& start,
              const TraceOptions& opt) {
    RayPath path;
    OdeState y{start.x, start.xi, start.t, Mat6::Identity()};
    double s = 0.0;
    Mat6 path_map = Mat6::Identity();
    int region;

    // A start on an interface is resolved by the travel direction.
    if (auto gi = m.on_interface(start.x)) {
        const Vec3 nu = m.interfaces()[*gi].normal(start.x);
        const double d = start.xi.dot(nu);
        if (std::abs(d) / start.xi.norm() < opt.glancing_tol)
            throw PreconditionError("GlancingRay", "start direction tangential to an interface");
        region = d < 0 ? *gi + 1 : *gi;  // moving against nu -> into the plus region
        y.x += 10.0 * m.interface_tolerance() * (d > 0 ? nu : Vec3(-nu));
    } else {
        region = m.region_of(start.x, std::nullopt);
    }

    const auto e0 = m.eval_region(y.x, region);
    const double shell = std::abs(start.tau * start.tau - e0.c * e0.c * start.xi.squaredNorm());
    if (shell > 1e-8 * start.tau * start.tau)
        throw PreconditionError("OffShell", "start state violates tau^2 = c^2 |xi|^2");

    auto begin_segment = [&](double s0) {
        RaySegment seg;
        seg.region = region;
        seg.s_begin = s0;
        seg.from_path_start = path_map;
        seg.samples.push_back({s0, to_phase(y, start.tau), Mat6::Identity()});
        return seg;
    };
    RaySegment seg = begin_segment(0.0);

    Deriv f{&m, region};
    OdeState fy = f(y);
    double h = 1e-3;
    int steps = 0;
    const int max_steps = 200000;

    auto psi_of = [&](const OdeState& st, int gi) { return m.interfaces()[gi].psi(st.x); };

    while (s < opt.max_s) {
        if (++steps > max_steps) throw NumericalError("StepFailure", "integrator step limit");
        h = std::min(h, opt.max_s - s);
        auto st = dopri_step(f, y, fy, h);
        const double scale = opt.abs_tol + opt.rel_tol * (1.0 + y.xi.norm() + y.x.norm());
        if (st.err > scale) {
            h *= std::max(0.2, 0.9 * std::pow(scale / st.err, 0.2));
            continue;
        }

        // Interface crossing inside this step?
        int hit = -1;
        for (int gi = 0; gi < static_cast<int>(m.interfaces().size()); ++gi) {
            const double p0 = psi_of(y, gi);
            const double p1 = psi_of(st.y, gi);
            if (p0 == 0.0 || p0 * p1 < 0.0) {
                hit = gi;
                break;
            }
        }

        if (hit >= 0) {
            // Bisect the step size until the crossing is pinned to event_tol_s.
            double a = 0.0, b = h;
            const double pa_sign = psi_of(y, hit) >= 0 ? 1.0 : -1.0;
            while (b - a > opt.event_tol_s) {
                const double mid = 0.5 * (a + b);
                auto sm = dopri_step(f, y, fy, mid);
                if (pa_sign * psi_of(sm.y, hit) > 0.0)
                    a = mid;
                else
                    b = mid;
            }
            auto se = dopri_step(f, y, fy, b);
            y = se.y;
            s += b;
            seg.samples.push_back({s, to_phase(y, start.tau), y.P});
            seg.s_end = s;

            // Classify and branch.
            const Interface& g = m.interfaces()[hit];
            const Vec3 nu = g.normal(y.x);
            const double cosang = std::abs(y.xi.dot(nu)) / y.xi.norm();
            PhasePoint inc = to_phase(y, start.tau);
            RayEvent ev;
            ev.interface_id = hit;
            ev.incident = inc;
            if (cosang < opt.glancing_tol) {
                ev.kind = EventKind::Glancing;
                path.events.push_back(ev);
                path.segments.push_back(seg);
                path.status = RayStatus::Glancing;
                return path;
            }

            InterfaceFrame fr;
            fr.nu = nu;
            fr.interface_index = hit;
            const int reg_minus = hit, reg_plus = hit + 1;
            fr.minus = m.eval_region(y.x, reg_minus);
            fr.plus = m.eval_region(y.x, reg_plus);
            auto sr = snell_refract(inc, fr, opt.glancing_tol);
            ev.reflected = sr.reflected;
            ev.transmitted = sr.transmitted;
            ev.kind = sr.transmitted ? EventKind::Transmission : EventKind::Reflection;
            const double slowness = (inc.xi - inc.xi.dot(nu) * nu).norm() / inc.tau;
            const auto cls = classify_covector(fr.minus, fr.plus, inc.tau, slowness,
                                               opt.glancing_tol * opt.glancing_tol);
            if (cls == CovectorClass::GlancingMinus || cls == CovectorClass::GlancingPlus) {
                ev.kind = EventKind::Glancing;
                path.events.push_back(ev);
                path.segments.push_back(seg);
                path.status = RayStatus::Glancing;
                return path;
            }
            if (cls == CovectorClass::Brewster) ev.kind = EventKind::Brewster;

            const int region_far = (y.xi.dot(nu) > 0) ? reg_minus : reg_plus;
            const int region_near = (region_far == reg_minus) ? reg_plus : reg_minus;
            ev.reflected_map = event_transfer(m, g, inc, sr.reflected, false, region_near,
                                              region_near);
            if (sr.transmitted)
                ev.transmitted_map =
                    event_transfer(m, g, inc, *sr.transmitted, true, region_near, region_far);

            const bool follow_trans =
                sr.transmitted && opt.branch == BranchPolicy::Transmitted;
            path.events.push_back(ev);
            path.segments.push_back(seg);
            if (static_cast<int>(path.events.size()) >= opt.max_events) {
                path.status = RayStatus::StepLimit;
                return path;
            }

            // Continue on the chosen branch.
            const PhasePoint nxt = follow_trans ? *sr.transmitted : sr.reflected;
            path_map = (follow_trans ? ev.transmitted_map : ev.reflected_map) * y.P *
                       seg.from_path_start;
            y.xi = nxt.xi;
            y.P = Mat6::Identity();
            region = follow_trans ? region_far : region_near;
            // Step off the surface so the sign tests see the new side.
            const Vec3 dir = y.xi.normalized();
            y.x += 10.0 * m.interface_tolerance() * dir;
            f = Deriv{&m, region};
            fy = f(y);
            seg = begin_segment(s);
            h = std::max(h, 1e-4);
            continue;
        }

        // Accept the plain step.
        y = st.y;
        fy = st.f_new;
        s += h;
        if (seg.samples.empty() || s - seg.samples.back().s >= opt.sample_ds ||
            s >= opt.max_s - 1e-15)
            seg.samples.push_back({s, to_phase(y, start.tau), y.P});
        seg.s_end = s;
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(scale / std::max(st.err, 1e-300), 0.2)));

        if (opt.stop_at_domain && y.x.norm() > m.domain_radius()) {
            RayEvent ev;
            ev.kind = EventKind::Exit;
            ev.incident = to_phase(y, start.tau);
            path.events.push_back(ev);
            break;
        }
    }

    if (seg.samples.back().s < s - 1e-15) seg.samples.push_back({s, to_phase(y, start.tau), y.P});
    seg.s_end = s;
    path.segments.push_back(seg);
    return path;
}

double travel_time(const RayPath& path) {
    return path.end().t - path.start().t;
}

double geodesic_distance(const Medium& m, const Vec3& x, const Vec3& y, double tau, double tol) {
    const Vec3 chord = y - x;
    Vec3 dir = chord.normalized();
    // Orthonormal basis transverse to the initial chord for the 2-D shooting.
    Vec3 a = std::abs(dir[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    const Vec3 u = (a - a.dot(dir) * dir).normalized();
    const Vec3 v = dir.cross(u);

    TraceOptions opt;
    opt.max_s = 4.0 * chord.norm() + 2.0;
    opt.sample_ds = 0.005;

    auto shoot = [&](double p, double q, double* t_at) {
        const Vec3 d = (dir + p * u + q * v).normalized();
        RayPath path = trace(m, nullptr, make_onshell(m, x, d, tau), opt);
        double best = 1e300;
        Vec3 miss = Vec3::Zero();
        for (const auto& segm : path.segments)
            for (size_t i = 1; i < segm.samples.size(); ++i) {
                const auto& s0 = segm.samples[i - 1];
                const auto& s1 = segm.samples[i];
                const Vec3 dseg = s1.p.x - s0.p.x;
                const double len2 = dseg.squaredNorm();
                double w = len2 > 0 ? std::clamp((y - s0.p.x).dot(dseg) / len2, 0.0, 1.0) : 0.0;
                const Vec3 xc = s0.p.x + w * dseg;
                const double dd = (xc - y).norm();
                if (dd < best) {
                    best = dd;
                    miss = xc - y;
                    if (t_at) *t_at = (1 - w) * s0.p.t + w * s1.p.t;
                }
            }
        return std::make_pair(best, miss);
    };

    double p = 0, q = 0;
    double t_hit = 0;
    for (int it = 0; it < 60; ++it) {
        auto [d0, miss] = shoot(p, q, &t_hit);
        if (d0 < tol) return t_hit;
        const double h = 1e-6;
        auto [dp, mp] = shoot(p + h, q, nullptr);
        auto [dq, mq] = shoot(p, q + h, nullptr);
        // Gauss-Newton on the 3-vector miss with 2 parameters.
        Eigen::Matrix<double, 3, 2> J;
        J.col(0) = (mp - miss) / h;
        J.col(1) = (mq - miss) / h;
        Eigen::Vector2d step = J.colPivHouseholderQr().solve(-miss);
        if (!step.allFinite()) break;
        const double lim = 0.5;
        if (step.norm() > lim) step *= lim / step.norm();
        p += step[0];
        q += step[1];
    }
    auto [d_final, miss_final] = shoot(p, q, &t_hit);
    (void)miss_final;
    if (d_final < 1e3 * tol) return t_hit;
    throw NumericalError("NoConnectingRay", "shooting failed to connect the endpoints");
}

}  // namespace gravac
