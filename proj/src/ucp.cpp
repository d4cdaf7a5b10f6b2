#include "gravac/ucp.hpp"

#include <algorithm>
#include <cmath>

#include "gravac/errors.hpp"

namespace gravac {

namespace {

std::vector<double> poly_mul(const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> r(p.size() + q.size() - 1, 0.0);
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

double poly_eval_deriv(const std::vector<double>& c, double r, int order) {
    double s = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= order; --k) {
        double f = 1.0;
        for (int j = 0; j < order; ++j) f *= (k - j);
        s = s * r + f * c[k];
    }
    return s;
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// logsumexp accumulator for sum of w_i * exp(L_i), w_i > 0.
struct LogSum {
    double max_log = -1e308;
    std::vector<std::pair<double, double>> terms;  // (L, log w)

    void add(double L, double w) {
        if (!(w > 0.0)) return;
        const double lw = std::log(w);
        terms.emplace_back(L, lw);
        max_log = std::max(max_log, L + lw);
    }
    double log_total() const {
        if (terms.empty()) return -1e308;
        double acc = 0.0;
        for (const auto& [L, lw] : terms) acc += std::exp(L + lw - max_log);
        return max_log + std::log(acc);
    }
};

// Geometrically graded radial panels on [a, b], refined toward a where the
// exp(r^-beta) weight concentrates.
std::vector<std::pair<double, double>> graded_panels(double a, double b, int n) {
    std::vector<double> edges{b};
    double len = b - a;
    for (int k = 1; k < n; ++k) {
        len *= 0.55;
        edges.push_back(a + len);
        if (len < 1e-16 * (b - a)) break;
    }
    edges.push_back(a);
    std::sort(edges.begin(), edges.end());
    std::vector<std::pair<double, double>> out;
    for (size_t i = 0; i + 1 < edges.size(); ++i) out.emplace_back(edges[i], edges[i + 1]);
    return out;
}

void check_range(double beta, double support_lo) {
    if (beta * std::log(1.0 / support_lo) > 600.0)
        throw NumericalError("QuadratureUnderflow",
                             "r^-beta exceeds the double exponent range even in log space");
}

}  // namespace

RadialTestFunction RadialTestFunction::bump(double a, double b, std::vector<double> modulation) {
    if (!(0.0 < a && a < b))
        throw PreconditionError("BadSupport", "need 0 < a < b for the radial bump");
    RadialTestFunction f;
    f.a_ = a;
    f.b_ = b;
    f.coef_ = std::move(modulation);
    return f;
}

RadialTestFunction RadialTestFunction::scaled(double factor) const {
    RadialTestFunction f = *this;
    for (auto& c : f.coef_) c *= factor;
    return f;
}

double RadialTestFunction::deriv(double r, int order) const {
    // Factored evaluation of (r-a)^4 (b-r)^4 m(r): the expanded polynomial
    // cancels catastrophically inside the exp(r^-beta) boundary layer.
    if (r <= a_ || r >= b_) return 0.0;
    const double w = r - a_, v = b_ - r;
    auto pow4_deriv = [](double t, int j, double sign) {
        // j-th derivative of t^4 with dt/dr = sign
        static const double fall[5] = {1, 4, 12, 24, 24};
        if (j > 4) return 0.0;
        double p = fall[j];
        for (int e = 0; e < 4 - j; ++e) p *= t;
        for (int e = 0; e < j; ++e) p *= sign;
        return p;
    };
    static const double fact[5] = {1, 1, 2, 6, 24};
    double total = 0.0;
    for (int i = 0; i <= order; ++i)
        for (int j = 0; i + j <= order; ++j) {
            const int l = order - i - j;
            const double mult = fact[order] / (fact[i] * fact[j] * fact[l]);
            total += mult * pow4_deriv(w, i, 1.0) * pow4_deriv(v, j, -1.0) *
                     poly_eval_deriv(coef_, r, l);
        }
    return total;
}

double RadialTestFunction::grad_sq(double r) const {
    const double d = du(r);
    return d * d;
}

double RadialTestFunction::hess_sq(double r) const {
    const double d1 = du(r), d2 = d2u(r);
    return d2 * d2 + 2.0 * (d1 / r) * (d1 / r);
}

double RadialTestFunction::third_sq(double r) const {
    const double d1 = du(r), d2 = d2u(r), d3 = d3u(r);
    const double g = d2 / r - d1 / (r * r);
    return d3 * d3 + 6.0 * g * g;
}

double RadialTestFunction::biharmonic(double r) const { return d4u(r) + 4.0 * d3u(r) / r; }

CarlemanSides carleman_sides_2nd(const RadialTestFunction& u, const EllipticCoeff& a_jk,
                                 const CarlemanConfig& cfg) {
    if (!(cfg.r0 < 1.0)) throw PreconditionError("BadConfig", "r0 must be < 1");
    if (u.support_hi() > cfg.r0)
        throw PreconditionError("BadConfig", "test function support exceeds B_{r0}");
    check_range(cfg.beta, u.support_lo());
    const double s = cfg.s();

    LogSum lhs, rhs;
    for (const auto& [ra, rb] : graded_panels(u.support_lo(), u.support_hi(), cfg.radial_panels)) {
        for (int q = 0; q < kGL; ++q) {
            const double r = 0.5 * (ra + rb) + 0.5 * (rb - ra) * kGLx[q];
            const double wr = 0.5 * (rb - ra) * kGLw[q] * r * r;
            const double log_psi2 = 2.0 * std::pow(r, -cfg.beta);
            const double dens_l = u.grad_sq(r) + u.u(r) * u.u(r);
            if (dens_l > 0.0)
                lhs.add((-s - cfg.beta - 1.0) * std::log(r) + log_psi2 + std::log(dens_l),
                        wr * 4.0 * M_PI);
            // Angular quadrature for |A u|^2 with direction-dependent a_jk:
            // Gauss-Legendre in cos(theta), trapezoid in phi.
            const double d1 = u.du(r), d2 = u.d2u(r);
            for (int it = 0; it < kGL; ++it) {
                const double ct = kGLx[it];
                const double wt = kGLw[it];
                const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                for (int ip = 0; ip < cfg.n_phi; ++ip) {
                    const double ph = 2.0 * M_PI * ip / cfg.n_phi;
                    const Vec3 nhat(st * std::cos(ph), st * std::sin(ph), ct);
                    const Mat3 A = a_jk(r * nhat);
                    const double ann = nhat.dot(A * nhat);
                    const double Au = d2 * ann + (d1 / r) * (A.trace() - ann);
                    if (Au * Au > 0.0)
                        rhs.add((-s) * std::log(r) + log_psi2 + 2.0 * std::log(std::abs(Au)),
                                wr * wt * (2.0 * M_PI / cfg.n_phi));
                }
            }
        }
    }
    CarlemanSides out;
    out.log_lhs = 2.0 * std::log(cfg.beta) + lhs.log_total();
    out.log_rhs = rhs.log_total();
    return out;
}

CarlemanSides carleman_sides_4th(const RadialTestFunction& u, const CarlemanConfig& cfg) {
    if (!(cfg.r0 < 1.0)) throw PreconditionError("BadConfig", "r0 must be < 1");
    if (u.support_hi() > cfg.r0)
        throw PreconditionError("BadConfig", "test function support exceeds B_{r0}");
    check_range(cfg.beta, u.support_lo());
    const double s = cfg.s();

    LogSum lhs, rhs;
    for (const auto& [ra, rb] : graded_panels(u.support_lo(), u.support_hi(), cfg.radial_panels)) {
        for (int q = 0; q < kGL; ++q) {
            const double r = 0.5 * (ra + rb) + 0.5 * (rb - ra) * kGLx[q];
            const double wr = 0.5 * (rb - ra) * kGLw[q] * r * r * 4.0 * M_PI;
            const double log_psi2 = 2.0 * std::pow(r, -cfg.beta);
            const double e = u.e_metric(r);
            if (e > 0.0)
                lhs.add((-s - 6.0 * cfg.beta - 8.0) * std::log(r) + log_psi2 + std::log(e), wr);
            const double b = u.biharmonic(r);
            if (b * b > 0.0)
                rhs.add((-s) * std::log(r) + log_psi2 + 2.0 * std::log(std::abs(b)), wr);
        }
    }
    CarlemanSides out;
    out.log_lhs = 4.0 * std::log(cfg.beta) + lhs.log_total();
    out.log_rhs = rhs.log_total();
    return out;
}

double estimate_beta0(const std::function<double(double)>& ratio_of_beta, double beta_max) {
    double prev = std::log(ratio_of_beta(1.0));
    int stable = 0;
    for (double b = 2.0; b <= beta_max; b += 1.0) {
        const double cur = std::log(ratio_of_beta(b));
        if (cur <= prev + 0.1 * std::abs(prev)) {
            if (++stable >= 3) return b - 2.0;
        } else {
            stable = 0;
        }
        prev = cur;
    }
    return beta_max;
}

UcpDemoReport ucp_propagation_demo(const RadialTestFunction& w1, const RadialTestFunction& w2,
                                   double r_seed, double r_tilde,
                                   const std::vector<double>& betas, double system_threshold) {
    UcpDemoReport rep;
    const int n = 4000;
    const double r_max = std::max(w1.support_hi(), w2.support_hi());
    const double hi = std::max(r_tilde, r_max) * 1.05;

    // Lipschitz-system constant sup |Delta^2 w_j| / sqrt(e(w1)+e(w2)),
    // measured inside the half ball; the cutoff commutator lives in the
    // annulus and is integrated there as the g_j source.
    double worst = 0.0;
    double sup_half = 0.0;
    double annulus_g = 0.0;
    for (int i = 1; i < n; ++i) {
        const double r = hi * i / n;
        if (r <= r_seed) continue;
        const double e_tot = w1.e_metric(r) + w2.e_metric(r);
        const double bi = std::max(std::abs(w1.biharmonic(r)), std::abs(w2.biharmonic(r)));
        if (r <= r_tilde / 2.0) {
            sup_half = std::max(sup_half, e_tot);
            if (e_tot > 1e-30)
                worst = std::max(worst, bi / std::sqrt(e_tot));
            else if (bi > 1e-12)
                worst = std::max(worst, system_threshold * 10.0);
        } else if (r <= r_tilde) {
            annulus_g += (e_tot + bi * bi) * 4.0 * M_PI * r * r * (hi / n);
        }
    }
    rep.system_constant = worst;
    rep.satisfies_system = worst < system_threshold;

    rep.sup_half_ball = sup_half;
    const double c_fit = std::max(1.0, worst + 1.0);
    bool below = true;
    for (double b : betas) {
        const double bound = c_fit * annulus_g / (b * b);
        rep.envelope.emplace_back(b, bound);
        if (sup_half > bound) below = false;
    }
    rep.below_envelope = below;
    rep.violation_detected = !rep.satisfies_system || !below;
    return rep;
}

}  // namespace gravac
