#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "gravac/errors.hpp"
#include "gravac/types.hpp"

namespace gravac {

// Scalar field with exact first and second derivatives. Closed forms only:
// the amplitude transport needs two analytic derivatives of every material
// parameter, so gridded fields are not supported here.
class RegionField {
  public:
    virtual ~RegionField() = default;
    virtual double value(const Vec3& x) const = 0;
    virtual Vec3 gradient(const Vec3& x) const = 0;
    virtual Mat3 hessian(const Vec3& x) const = 0;
};

using FieldPtr = std::shared_ptr<const RegionField>;

class ConstantField final : public RegionField {
  public:
    explicit ConstantField(double v) : v_(v) {}
    double value(const Vec3&) const override { return v_; }
    Vec3 gradient(const Vec3&) const override { return Vec3::Zero(); }
    Mat3 hessian(const Vec3&) const override { return Mat3::Zero(); }

  private:
    double v_;
};

// Trivariate polynomial sum c * x^i y^j z^k.
class PolynomialField final : public RegionField {
  public:
    struct Term {
        int i, j, k;
        double c;
    };
    explicit PolynomialField(std::vector<Term> terms) : terms_(std::move(terms)) {}

    double value(const Vec3& x) const override {
        double s = 0;
        for (const auto& t : terms_) s += t.c * ipow(x[0], t.i) * ipow(x[1], t.j) * ipow(x[2], t.k);
        return s;
    }
    Vec3 gradient(const Vec3& x) const override {
        Vec3 g = Vec3::Zero();
        for (const auto& t : terms_) {
            g[0] += t.c * t.i * ipow(x[0], t.i - 1) * ipow(x[1], t.j) * ipow(x[2], t.k);
            g[1] += t.c * t.j * ipow(x[0], t.i) * ipow(x[1], t.j - 1) * ipow(x[2], t.k);
            g[2] += t.c * t.k * ipow(x[0], t.i) * ipow(x[1], t.j) * ipow(x[2], t.k - 1);
        }
        return g;
    }
    Mat3 hessian(const Vec3& x) const override {
        Mat3 h = Mat3::Zero();
        for (const auto& t : terms_) {
            const int e[3] = {t.i, t.j, t.k};
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    int f[3] = {e[0], e[1], e[2]};
                    double coef = t.c * f[a];
                    f[a] -= 1;
                    coef *= f[b];
                    f[b] -= 1;
                    if (coef != 0.0)
                        h(a, b) += coef * ipow(x[0], f[0]) * ipow(x[1], f[1]) * ipow(x[2], f[2]);
                }
        }
        return h;
    }

  private:
    static double ipow(double x, int n) {
        if (n < 0) return 0.0;
        double r = 1.0;
        while (n--) r *= x;
        return r;
    }
    std::vector<Term> terms_;
};

// 1-D radial profile f(r) with analytic f', f''.
struct RadialProfile {
    std::function<double(double)> f, df, d2f;
};

RadialProfile radial_linear(double a, double b);           // a + b r
RadialProfile radial_rational(double a, double b, double c);  // a / (b + c r)
RadialProfile radial_poly(std::vector<double> coeffs);     // sum c_k r^k
// Gaussian bump a * exp(-((r-r0)/w)^2), handy for compactly supported tweaks.
RadialProfile radial_gaussian(double a, double r0, double w);

// Natural cubic spline through (r_k, f_k); analytic derivatives per panel.
RadialProfile radial_spline(std::vector<double> knots_r, std::vector<double> knots_f);

class RadialField final : public RegionField {
  public:
    RadialField(RadialProfile p, Vec3 center = Vec3::Zero()) : p_(std::move(p)), c_(center) {}
    double value(const Vec3& x) const override { return p_.f((x - c_).norm()); }
    Vec3 gradient(const Vec3& x) const override {
        const Vec3 d = x - c_;
        const double r = d.norm();
        if (r < kTiny) return Vec3::Zero();
        return p_.df(r) * d / r;
    }
    Mat3 hessian(const Vec3& x) const override {
        const Vec3 d = x - c_;
        const double r = d.norm();
        if (r < kTiny) return p_.d2f(0.0) * Mat3::Identity();
        const Vec3 n = d / r;
        const Mat3 nn = n * n.transpose();
        return p_.d2f(r) * nn + (p_.df(r) / r) * (Mat3::Identity() - nn);
    }
    const RadialProfile& profile() const { return p_; }

  private:
    static constexpr double kTiny = 1e-300;
    RadialProfile p_;
    Vec3 c_;
};

// Sum of fields, for compact interior perturbations on top of a base profile.
class SumField final : public RegionField {
  public:
    SumField(FieldPtr a, FieldPtr b) : a_(std::move(a)), b_(std::move(b)) {}
    double value(const Vec3& x) const override { return a_->value(x) + b_->value(x); }
    Vec3 gradient(const Vec3& x) const override { return a_->gradient(x) + b_->gradient(x); }
    Mat3 hessian(const Vec3& x) const override { return a_->hessian(x) + b_->hessian(x); }

  private:
    FieldPtr a_, b_;
};

// Smooth bump supported on |x - x0| < w: a * exp(1 - 1/(1 - (|x-x0|/w)^2)).
class CompactBumpField final : public RegionField {
  public:
    CompactBumpField(double a, Vec3 x0, double w) : a_(a), x0_(x0), w_(w) {}
    double value(const Vec3& x) const override;
    Vec3 gradient(const Vec3& x) const override;
    Mat3 hessian(const Vec3& x) const override;

  private:
    double a_;
    Vec3 x0_;
    double w_;
};

}  // namespace gravac
