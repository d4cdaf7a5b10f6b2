#include "gravac/wavefront.hpp"

#include <cmath>

#include "gravac/symbolops.hpp"

namespace gravac {

namespace {

double constant_speed_of(const Medium& m, const Vec3& seed) {
    // Probe a point off every interface.
    Vec3 probe = seed;
    const Vec3 jitter(0.137, 0.071, 0.093);
    for (int k = 0; k < 8 && m.on_interface(probe); ++k)
        probe += (0.02 * (k + 1)) * jitter;
    const auto e = m.eval(probe);
    if (e.grad_c.norm() > 1e-12)
        throw PreconditionError("NonConstantSpeed",
                                "closed-form wavefront families need constant c");
    return e.c;
}

class PlanarFamily final : public WavefrontFamily {
  public:
    PlanarFamily(const Medium& m, const Vec3& dir, double tau, double amp)
        : m_(&m), dir_(dir.normalized()), tau_(tau), amp_(amp),
          c_(constant_speed_of(m, Vec3::Zero())) {}

    WavefrontJet jet(const Vec3& x) const override {
        WavefrontJet j;
        j.tau = tau_;
        j.xi = (tau_ / c_) * dir_;
        j.grad_xi = Mat3::Zero();
        const auto e = m_->eval(x);
        j.alpha0 = amp_ / std::sqrt(e.rho * c_);
        j.grad_alpha0 = -0.5 * j.alpha0 * e.grad_rho / e.rho;
        return j;
    }
    Vec3 grad_H_over_H(const Vec3&) const override { return Vec3::Zero(); }
    double div_N(const Vec3&) const override { return 0.0; }
    double remainder_nn(const Vec3&) const override { return 0.0; }

  private:
    const Medium* m_;
    Vec3 dir_;
    double tau_, amp_, c_;
};

class SphericalFamily final : public WavefrontFamily {
  public:
    SphericalFamily(const Medium& m, const Vec3& center, double tau, double amp)
        : m_(&m), x0_(center), tau_(tau), amp_(amp),
          c_(constant_speed_of(m, center + Vec3(0.1, 0, 0))) {}

    WavefrontJet jet(const Vec3& x) const override {
        const Vec3 d = x - x0_;
        const double r = d.norm();
        const Vec3 n = d / r;
        WavefrontJet j;
        j.tau = tau_;
        j.xi = (tau_ / c_) * n;
        j.grad_xi = (tau_ / c_) * (Mat3::Identity() - n * n.transpose()) / r;
        const auto e = m_->eval(x);
        j.alpha0 = amp_ / (r * std::sqrt(e.rho));
        j.grad_alpha0 = j.alpha0 * (-n / r - 0.5 * e.grad_rho / e.rho);
        return j;
    }
    Vec3 grad_H_over_H(const Vec3& x) const override {
        const Vec3 d = x - x0_;
        return -d / d.squaredNorm();  // H = amp / r
    }
    double div_N(const Vec3& x) const override { return 2.0 / (x - x0_).norm(); }
    double remainder_nn(const Vec3& x) const override {
        WaveFields wf;
        wf.tau = tau_;
        const Vec3 x0 = x0_;
        const double tau = tau_, c = c_, amp = amp_;
        wf.xi = [x0, tau, c](const Vec3& y) -> Vec3 { return (tau / c) * (y - x0).normalized(); };
        wf.alpha0 = [x0, amp](const Vec3& y) { return amp / (y - x0).norm(); };
        return remainder_nn_generic(c_, wf, x, m_->domain_radius());
    }

  private:
    const Medium* m_;
    Vec3 x0_;
    double tau_, amp_, c_;
};

}  // namespace

FamilyPtr planar_family(const Medium& m, const Vec3& dir, double tau, double amp) {
    return std::make_shared<PlanarFamily>(m, dir, tau, amp);
}

FamilyPtr spherical_family(const Medium& m, const Vec3& center, double tau, double amp) {
    return std::make_shared<SphericalFamily>(m, center, tau, amp);
}

}  // namespace gravac
