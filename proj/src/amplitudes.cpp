#include "gravac/amplitudes.hpp"

#include <cmath>

namespace gravac {

TensorA tensor_A(const Vec3& x, const RayJetContext& ctx, const Medium& m,
                 const GravityField& g, bool selfgrav) {
    const auto e = m.eval(x);
    const double nxi = ctx.xi.norm();
    if (!(nxi > 0.0)) throw PreconditionError("ZeroCovector", "tensor_A needs xi != 0");
    const Vec3 N = ctx.xi / nxi;
    const Vec3 grad_xi_norm = ctx.grad_xi * N;
    const Mat3 grad_N = (ctx.grad_xi - grad_xi_norm * N.transpose()) / nxi;
    const double div_N = grad_N.trace();

    const Vec3 glr = e.grad_log_sqrt_rho();
    const Mat3 hlr = e.hess_log_sqrt_rho();
    const Vec3 gc2 = e.grad_c2();
    const double c2 = e.c * e.c;

    const Vec3 grad_phi = g.grad(x);
    const Mat3 hess_phi = g.hess(x);
    const double lap_phi = hess_phi.trace();

    Mat3 A = Mat3::Zero();
    A += c2 * hlr;
    A += 2.0 * outer(glr, gc2);
    A -= (c2 * hlr.trace() - c2 * glr.squaredNorm() + glr.dot(gc2)) * Mat3::Identity();

    A -= outer(glr, grad_phi);
    A -= outer(ctx.grad_H_over_H, grad_phi);
    A += outer(grad_N * grad_phi, N);
    A -= div_N * outer(grad_phi, N);
    A += hess_phi;

    // c^2 (|xi|/H) grad(H/(c^2 |xi|)) = grad H/H - grad c^2/c^2 - grad|xi|/|xi|
    const Vec3 weight_grad = ctx.grad_H_over_H - gc2 / c2 - grad_xi_norm / nxi;
    double bracket = weight_grad.dot(grad_phi) - glr.dot(grad_phi) + lap_phi -
                     grad_phi.squaredNorm() / c2;
    if (selfgrav) bracket -= g.k0() * e.rho;
    A += bracket * Mat3::Identity();

    TensorA out;
    out.displayed = A;
    out.remainder_nn = ctx.remainder_nn;
    return out;
}

CVec3 h_minus1(const Medium& m, const GravityField& g, const Vec3& x, const WavefrontJet& jet) {
    return h_minus1_closed(m.eval(x), g, x, jet);
}

namespace {

// Augmented transport state: ray (x, xi, t), two deviation vectors, the
// leading amplitude, accumulated divN and log(rho c) integrals, alpha_{-1},
// and the g-weighted source integral.
using AmpVec = Eigen::Matrix<double, 25, 1>;

struct AmpState {
    AmpVec& v;

    Eigen::Map<Vec3> x() { return Eigen::Map<Vec3>(v.data()); }
    Eigen::Map<Vec3> xi() { return Eigen::Map<Vec3>(v.data() + 3); }
    double& t() { return v[6]; }
    Eigen::Map<Vec6> y1() { return Eigen::Map<Vec6>(v.data() + 7); }
    Eigen::Map<Vec6> y2() { return Eigen::Map<Vec6>(v.data() + 13); }
    double& a0() { return v[19]; }
    double& i_divn() { return v[20]; }
    double& am1_re() { return v[21]; }
    double& am1_im() { return v[22]; }
    double& igg_re() { return v[23]; }
    double& igg_im() { return v[24]; }
};

struct AmpContext {
    const Medium* m;
    int region;
    const GravityField* grav = nullptr;
    const WavefrontFamily* family = nullptr;
    bool selfgrav = false;
    bool with_m1 = false;
    double alpha0_ref = 1.0;   // family alpha0 at the start, for rescaling
    double alpha0_init = 1.0;
};

double divN_of(AmpState& st, const MediumEval& e) {
    const Vec3 xi = st.xi();
    const double nxi = xi.norm();
    const Vec3 N = xi / nxi;
    const Vec3 dx1 = st.y1().head<3>(), dq1 = st.y1().tail<3>();
    const Vec3 dx2 = st.y2().head<3>(), dq2 = st.y2().tail<3>();
    const Mat3 proj = Mat3::Identity() - N * N.transpose();
    const Vec3 dxdot1 = proj * dq1 / nxi;
    const Vec3 dxdot2 = proj * dq2 / nxi;
    const Vec3 Ndot = -proj * e.grad_log_c();
    const Vec3 cr = dx1.cross(dx2);
    const double area = cr.dot(N);
    if (!(area > 1e-14))
        throw NumericalError("CausticOnPath", "paraxial cross-section collapsed");
    const double darea = (dxdot1.cross(dx2) + dx1.cross(dxdot2)).dot(N) + cr.dot(Ndot);
    return darea / area;
}

AmpVec amp_rhs(const AmpContext& ctx, const AmpVec& v) {
    AmpVec vc = v;
    AmpState st{vc};
    const auto e = ctx.m->eval_region(st.x(), ctx.region);
    const Vec3 xi = st.xi();
    const double nxi = xi.norm();
    const Vec3 N = xi / nxi;
    const Vec3 glc = e.grad_log_c();

    AmpVec d = AmpVec::Zero();
    AmpState ds{d};
    ds.x() = N;
    ds.xi() = -nxi * glc;
    ds.t() = 1.0 / e.c;

    Mat6 J = Mat6::Zero();
    J.block<3, 3>(0, 3) = (Mat3::Identity() - N * N.transpose()) / nxi;
    J.block<3, 3>(3, 0) = -nxi * e.hess_log_c();
    J.block<3, 3>(3, 3) = -glc * N.transpose();
    ds.y1() = J * st.y1();
    ds.y2() = J * st.y2();

    const double divN = divN_of(st, e);
    ds.i_divn() = divN;
    // d/ds log sqrt(rho c) = 0.5 (grad log(rho c)).N
    const double dlog_rc = 0.5 * (e.grad_rho / e.rho + e.grad_c / e.c).dot(N);
    const double decay = dlog_rc + 0.5 * divN;
    ds.a0() = -decay * st.a0();

    if (ctx.with_m1) {
        WavefrontJet jet = ctx.family->jet(st.x());
        // Rescale the family's alpha0 to the requested initial amplitude.
        const double scale = ctx.alpha0_init / ctx.alpha0_ref;
        jet.alpha0 *= scale;
        jet.grad_alpha0 *= scale;
        RayJetContext rctx;
        rctx.xi = jet.xi;
        rctx.grad_xi = jet.grad_xi;
        rctx.grad_H_over_H = ctx.family->grad_H_over_H(st.x());
        rctx.remainder_nn = ctx.family->remainder_nn(st.x());
        const TensorA A = tensor_A(st.x(), rctx, *ctx.m, *ctx.grav, ctx.selfgrav);
        const double nAn = A.nAn(N);
        // G = -i alpha0 nAn / (2 c^2 |xi|); the transported a0 tracks the family.
        const Complex G = -I_UNIT * st.a0() * nAn / (2.0 * e.c * e.c * nxi);
        const Complex am1(st.am1_re(), st.am1_im());
        const Complex dm1 = -decay * am1 + G;
        ds.am1_re() = dm1.real();
        ds.am1_im() = dm1.imag();
        const Complex gG = G / st.a0();
        ds.igg_re() = gG.real();
        ds.igg_im() = gG.imag();
    }
    return d;
}

// Classic RK4 with fixed substeps between output samples; the transported
// quantities are smooth along caustic-free rays and the ray itself is
// re-integrated here at high resolution.
template <typename F>
AmpVec rk4_advance(const F& f, AmpVec v, double s0, double s1, int substeps) {
    const double h = (s1 - s0) / substeps;
    for (int i = 0; i < substeps; ++i) {
        const auto k1 = f(v);
        const auto k2 = f(v + 0.5 * h * k1);
        const auto k3 = f(v + 0.5 * h * k2);
        const auto k4 = f(v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return v;
}

AmplitudeTrace run_transport(const RayPath& path, const Medium& m, const GravityField* grav,
                             const WavefrontFamily* family, double alpha0_init,
                             Complex alpha_m1_init, bool selfgrav, bool with_m1,
                             double init_curvature) {
    if (path.segments.size() != 1)
        throw PreconditionError("BrokenRay", "amplitude transport expects a single-branch ray");
    const auto& seg = path.segments.front();
    const PhasePoint p0 = seg.front().p;

    AmpContext ctx;
    ctx.m = &m;
    ctx.region = seg.region;
    ctx.grav = grav;
    ctx.family = family;
    ctx.selfgrav = selfgrav;
    ctx.with_m1 = with_m1;
    ctx.alpha0_init = alpha0_init;
    if (family) ctx.alpha0_ref = family->jet(p0.x).alpha0;

    AmpVec v = AmpVec::Zero();
    AmpState st{v};
    st.x() = p0.x;
    st.xi() = p0.xi;
    st.t() = p0.t;
    const Vec3 N0 = p0.xi.normalized();
    Vec3 a = std::abs(N0[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    const Vec3 e1 = (a - a.dot(N0) * N0).normalized();
    const Vec3 e2 = N0.cross(e1);
    st.y1().head<3>() = e1;
    st.y1().tail<3>() = init_curvature * p0.xi.norm() * e1;
    st.y2().head<3>() = e2;
    st.y2().tail<3>() = init_curvature * p0.xi.norm() * e2;
    st.a0() = alpha0_init;
    st.am1_re() = alpha_m1_init.real();
    st.am1_im() = alpha_m1_init.imag();

    const auto e_start = m.eval_region(p0.x, seg.region);
    const double rc0 = e_start.rho * e_start.c;
    const double g0 = 1.0 / alpha0_init;

    AmplitudeTrace trace;
    auto push = [&](double s) {
        AmpState cur{v};
        const auto e = m.eval_region(cur.x(), ctx.region);
        AmplitudeSample smp;
        smp.s = s;
        smp.x = cur.x();
        smp.t = cur.t();
        smp.alpha0 = cur.a0();
        smp.alpha0_closed =
            alpha0_init * std::sqrt(rc0 / (e.rho * e.c)) * std::exp(-0.5 * cur.i_divn());
        smp.H = cur.a0() * std::sqrt(e.rho);
        smp.g = 1.0 / cur.a0();
        smp.div_N = divN_of(cur, e);
        smp.alpha_m1 = Complex(cur.am1_re(), cur.am1_im());
        smp.alpha_m1_quad =
            (Complex(cur.igg_re(), cur.igg_im()) + g0 * alpha_m1_init) * cur.a0();
        if (with_m1) {
            WavefrontJet jet = family->jet(cur.x());
            RayJetContext rctx;
            rctx.xi = jet.xi;
            rctx.grad_xi = jet.grad_xi;
            rctx.grad_H_over_H = family->grad_H_over_H(cur.x());
            rctx.remainder_nn = family->remainder_nn(cur.x());
            smp.nAn = tensor_A(cur.x(), rctx, m, *grav, selfgrav).nAn(cur.xi().normalized());
        }
        trace.samples.push_back(smp);
    };

    const double s_end = seg.s_end - seg.s_begin;
    const int nout = std::max(8, static_cast<int>(std::ceil(s_end / 0.025)));
    auto f = [&ctx](const AmpVec& y) { return amp_rhs(ctx, y); };
    push(0.0);
    for (int i = 0; i < nout; ++i) {
        const double sa = s_end * i / nout;
        const double sb = s_end * (i + 1) / nout;
        v = rk4_advance(f, v, sa, sb, 16);
        push(sb);
    }
    return trace;
}

}  // namespace

AmplitudeTrace transport_alpha0(const RayPath& path, const Medium& m, double alpha0_init,
                                double init_curvature) {
    return run_transport(path, m, nullptr, nullptr, alpha0_init, 0.0, false, false,
                         init_curvature);
}

AmplitudeTrace transport_alpha_minus1(const RayPath& path, const Medium& m,
                                      const GravityField& g, const WavefrontFamily& family,
                                      double alpha0_init, Complex alpha_m1_init, bool selfgrav) {
    // Infer the initial curvature from the family jet at the start point.
    const PhasePoint p0 = path.segments.front().front().p;
    const WavefrontJet j0 = family.jet(p0.x);
    const double curv = j0.div_N() / 2.0;
    return run_transport(path, m, &g, &family, alpha0_init, alpha_m1_init, selfgrav, true, curv);
}

std::vector<DivNSample> spreading_divN(const RayPath& path, const Medium& m,
                                       double init_curvature) {
    const auto trace = transport_alpha0(path, m, 1.0, init_curvature);
    std::vector<DivNSample> out;
    out.reserve(trace.samples.size());
    for (const auto& s : trace.samples) out.push_back({s.s, s.div_N});
    return out;
}

double bundle_spreading_fd(const Medium& m, const PhasePoint& start, double s_target,
                           double offset, double init_curvature) {
    const Vec3 N0 = start.xi.normalized();
    Vec3 a = std::abs(N0[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    const Vec3 e1 = (a - a.dot(N0) * N0).normalized();
    const Vec3 e2 = N0.cross(e1);

    TraceOptions opt;
    opt.max_s = s_target;
    opt.sample_ds = s_target / 400.0;
    auto endpoint = [&](const Vec3& dx) {
        PhasePoint p = start;
        p.x += dx;
        // Wavefront initial condition: xi direction tilts with curvature.
        const Vec3 dir = (N0 + init_curvature * dx).normalized();
        const auto e = m.eval(p.x);
        p.xi = (start.tau / e.c) * dir;
        RayPath rp = trace(m, nullptr, p, opt);
        return rp.at(s_target).x;
    };
    RayPath center = trace(m, nullptr, start, opt);
    const Vec3 N_end = center.at(s_target).xi.normalized();
    const Vec3 xp = endpoint(offset * e1), xm = endpoint(-offset * e1);
    const Vec3 yp = endpoint(offset * e2), ym = endpoint(-offset * e2);
    const Vec3 d1 = (xp - xm) / (2.0 * offset);
    const Vec3 d2 = (yp - ym) / (2.0 * offset);
    // Only the area projected on the ray direction is wavefront spreading;
    // shear components along N drop out of the flux-tube element.
    return std::abs(d1.cross(d2).dot(N_end));
}

Vec3 grad_H_over_H_bundle(const Medium& m, const WavefrontFamily& family,
                          const PhasePoint& start, double s, double offset) {
    const Vec3 N0 = start.xi.normalized();
    Vec3 a = std::abs(N0[0]) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    const Vec3 e1 = (a - a.dot(N0) * N0).normalized();
    const Vec3 e2 = N0.cross(e1);

    TraceOptions opt;
    opt.max_s = s + 0.5;
    const WavefrontJet j0 = family.jet(start.x);
    const double curv = j0.div_N() / 2.0;

    auto H_at = [&](const Vec3& dx, double s_eval) {
        PhasePoint p = start;
        p.x += dx;
        const Vec3 dir = (N0 + curv * dx).normalized();
        const auto e = m.eval(p.x);
        p.xi = (start.tau / e.c) * dir;
        RayPath rp = trace(m, nullptr, p, opt);
        const auto tr = transport_alpha0(rp, m, family.jet(p.x).alpha0, curv);
        // Interpolate H at s_eval.
        for (size_t i = 1; i < tr.samples.size(); ++i)
            if (tr.samples[i].s >= s_eval) {
                const auto& s0 = tr.samples[i - 1];
                const auto& s1 = tr.samples[i];
                const double w = (s_eval - s0.s) / (s1.s - s0.s);
                return (1 - w) * s0.H + w * s1.H;
            }
        return tr.samples.back().H;
    };

    const double Hc = H_at(Vec3::Zero(), s);
    const double h1 = (H_at(offset * e1, s) - H_at(-offset * e1, s)) / (2.0 * offset);
    const double h2 = (H_at(offset * e2, s) - H_at(-offset * e2, s)) / (2.0 * offset);
    const double hl = (H_at(Vec3::Zero(), s + offset) - H_at(Vec3::Zero(), s - offset)) /
                      (2.0 * offset);

    // Transport the transverse frame to s along the central ray.
    RayPath rp = trace(m, nullptr, start, opt);
    const Vec3 Ns = rp.at(s).xi.normalized();
    Vec3 f1 = (e1 - e1.dot(Ns) * Ns).normalized();
    Vec3 f2 = Ns.cross(f1);
    return (h1 * f1 + h2 * f2 + hl * Ns) / Hc;
}

}  // namespace gravac
