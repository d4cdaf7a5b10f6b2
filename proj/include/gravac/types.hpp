#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace gravac {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Complex = std::complex<double>;
using CVec3 = Eigen::Vector3cd;

inline constexpr Complex I_UNIT{0.0, 1.0};

// Tensor of rank 4 on R^3, dense 81-entry storage.
struct Tensor4 {
    std::array<double, 81> a{};
    double& operator()(int i, int j, int k, int l) { return a[((i * 3 + j) * 3 + k) * 3 + l]; }
    double operator()(int i, int j, int k, int l) const { return a[((i * 3 + j) * 3 + k) * 3 + l]; }
};

inline Mat3 outer(const Vec3& u, const Vec3& v) { return u * v.transpose(); }

// Algebraic symmetrization of u (x) v.
inline Mat3 sym_outer(const Vec3& u, const Vec3& v) {
    return 0.5 * (u * v.transpose() + v * u.transpose());
}

}  // namespace gravac
