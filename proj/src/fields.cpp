#include "gravac/fields.hpp"

#include <cmath>

namespace gravac {

RadialProfile radial_linear(double a, double b) {
    return {[=](double r) { return a + b * r; }, [=](double) { return b; },
            [](double) { return 0.0; }};
}

RadialProfile radial_rational(double a, double b, double c) {
    return {[=](double r) { return a / (b + c * r); },
            [=](double r) {
                const double d = b + c * r;
                return -a * c / (d * d);
            },
            [=](double r) {
                const double d = b + c * r;
                return 2.0 * a * c * c / (d * d * d);
            }};
}

RadialProfile radial_poly(std::vector<double> coeffs) {
    auto horner = [](const std::vector<double>& c, double r, int deriv) {
        double s = 0.0;
        for (int k = static_cast<int>(c.size()) - 1; k >= deriv; --k) {
            double f = 1.0;
            for (int j = 0; j < deriv; ++j) f *= (k - j);
            s = s * r + f * c[k];
        }
        return s;
    };
    return {[coeffs, horner](double r) { return horner(coeffs, r, 0); },
            [coeffs, horner](double r) { return horner(coeffs, r, 1); },
            [coeffs, horner](double r) { return horner(coeffs, r, 2); }};
}

RadialProfile radial_gaussian(double a, double r0, double w) {
    return {[=](double r) {
                const double u = (r - r0) / w;
                return a * std::exp(-u * u);
            },
            [=](double r) {
                const double u = (r - r0) / w;
                return a * std::exp(-u * u) * (-2.0 * u / w);
            },
            [=](double r) {
                const double u = (r - r0) / w;
                return a * std::exp(-u * u) * (4.0 * u * u - 2.0) / (w * w);
            }};
}

RadialProfile radial_spline(std::vector<double> xr, std::vector<double> yf) {
    const int n = static_cast<int>(xr.size());
    if (n < 3 || yf.size() != xr.size())
        throw PreconditionError("BadSpline", "need >= 3 knots and matching values");
    // Natural cubic spline second derivatives by the classic tridiagonal sweep.
    std::vector<double> m(n, 0.0), u(n, 0.0), z(n, 0.0), l(n, 1.0);
    std::vector<double> h(n - 1), alpha(n, 0.0);
    for (int i = 0; i + 1 < n; ++i) h[i] = xr[i + 1] - xr[i];
    for (int i = 1; i + 1 < n; ++i)
        alpha[i] = 3.0 * ((yf[i + 1] - yf[i]) / h[i] - (yf[i] - yf[i - 1]) / h[i - 1]);
    for (int i = 1; i + 1 < n; ++i) {
        l[i] = 2.0 * (xr[i + 1] - xr[i - 1]) - h[i - 1] * u[i - 1];
        u[i] = h[i] / l[i];
        z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
    }
    for (int i = n - 2; i >= 0; --i) m[i] = z[i] - u[i] * m[i + 1];

    auto locate = [xr](double r) {
        int lo = 0, hi = static_cast<int>(xr.size()) - 2;
        if (r <= xr.front()) return 0;
        if (r >= xr.back()) return hi;
        while (lo < hi) {
            int mid = (lo + hi + 1) / 2;
            if (xr[mid] <= r)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    };
    auto eval = [xr, yf, m, h, locate](double r, int deriv) {
        const int i = locate(r);
        const double a = yf[i], b = (yf[i + 1] - yf[i]) / h[i] - h[i] * (m[i + 1] + 2.0 * m[i]) / 3.0;
        const double c = m[i], d = (m[i + 1] - m[i]) / (3.0 * h[i]);
        const double t = r - xr[i];
        switch (deriv) {
            case 0: return a + t * (b + t * (c + t * d));
            case 1: return b + t * (2.0 * c + 3.0 * t * d);
            default: return 2.0 * c + 6.0 * t * d;
        }
    };
    return {[eval](double r) { return eval(r, 0); }, [eval](double r) { return eval(r, 1); },
            [eval](double r) { return eval(r, 2); }};
}

double CompactBumpField::value(const Vec3& x) const {
    const double s = (x - x0_).squaredNorm() / (w_ * w_);
    if (s >= 1.0) return 0.0;
    return a_ * std::exp(1.0 - 1.0 / (1.0 - s));
}

Vec3 CompactBumpField::gradient(const Vec3& x) const {
    const Vec3 d = x - x0_;
    const double s = d.squaredNorm() / (w_ * w_);
    if (s >= 1.0) return Vec3::Zero();
    const double q = 1.0 - s;
    // d/ds exp(1 - 1/q) = exp(1 - 1/q) * (-1/q^2); ds/dx = 2 d / w^2.
    return value(x) * (-1.0 / (q * q)) * (2.0 / (w_ * w_)) * d;
}

Mat3 CompactBumpField::hessian(const Vec3& x) const {
    const Vec3 d = x - x0_;
    const double s = d.squaredNorm() / (w_ * w_);
    if (s >= 1.0) return Mat3::Zero();
    const double q = 1.0 - s;
    const double v = value(x);
    const double f1 = -1.0 / (q * q);                       // d/ds of the exponent
    const double f2 = f1 * f1 - 2.0 / (q * q * q);          // second exponent derivative + square
    const Vec3 gs = (2.0 / (w_ * w_)) * d;                  // grad s
    const Mat3 hs = (2.0 / (w_ * w_)) * Mat3::Identity();   // hess s
    return v * (f2 * gs * gs.transpose() + f1 * hs);
}

}  // namespace gravac
