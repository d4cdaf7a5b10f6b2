#pragma once

#include "gravac/rays.hpp"
#include "gravac/symbolops.hpp"
#include "gravac/wavefront.hpp"

namespace gravac {

// Ray-family data entering the tensor A(x) besides the medium and gravity.
struct RayJetContext {
    Vec3 xi = Vec3::UnitX();
    Mat3 grad_xi = Mat3::Zero();
    Vec3 grad_H_over_H = Vec3::Zero();
    double remainder_nn = 0.0;  // rho,Phi-free part of N.A.N for this family
};

// The assembled tensor: every displayed block, with the rho,Phi-independent
// part carried as a separately computed scalar contribution to N.A.N.
struct TensorA {
    Mat3 displayed = Mat3::Zero();
    double remainder_nn = 0.0;
    double nAn(const Vec3& N) const { return N.dot(displayed * N) + remainder_nn; }
};

TensorA tensor_A(const Vec3& x, const RayJetContext& ctx, const Medium& m,
                 const GravityField& g, bool selfgrav);

// h_{-1} at a point of a wavefront family.
CVec3 h_minus1(const Medium& m, const GravityField& g, const Vec3& x, const WavefrontJet& jet);

struct AmplitudeSample {
    double s = 0;
    Vec3 x = Vec3::Zero();
    double t = 0;
    double alpha0 = 0;         // ODE-integrated
    double alpha0_closed = 0;  // endpoint-factor closed form
    double H = 0;              // alpha0 sqrt(rho)
    double g = 0;              // 1 / alpha0
    double div_N = 0;
    double nAn = 0;
    Complex alpha_m1 = 0;       // ODE-integrated
    Complex alpha_m1_quad = 0;  // g-weighted quadrature identity
};

struct AmplitudeTrace {
    std::vector<AmplitudeSample> samples;
    const AmplitudeSample& back() const { return samples.back(); }
};

// Leading-amplitude transport along a caustic-free single-branch ray.
// init_curvature: initial wavefront curvature (0 planar, 1/r0 spherical).
AmplitudeTrace transport_alpha0(const RayPath& path, const Medium& m, double alpha0_init,
                                double init_curvature = 0.0);

// Next-to-leading transport with the gravitational source G built from
// tensor_A over the family's jets. The family must match the traced ray.
AmplitudeTrace transport_alpha_minus1(const RayPath& path, const Medium& m,
                                      const GravityField& g, const WavefrontFamily& family,
                                      double alpha0_init, Complex alpha_m1_init, bool selfgrav);

struct DivNSample {
    double s;
    double div_N;
};

std::vector<DivNSample> spreading_divN(const RayPath& path, const Medium& m,
                                       double init_curvature = 0.0);

// Geometric spreading exp(int divN) from a traced 4-ray bundle, for the
// finite-difference cross-check of the paraxial route.
double bundle_spreading_fd(const Medium& m, const PhasePoint& start, double s_target,
                           double offset, double init_curvature = 0.0);

// grad H / H by transverse ray-bundle differencing at arclength s.
Vec3 grad_H_over_H_bundle(const Medium& m, const WavefrontFamily& family,
                          const PhasePoint& start, double s, double offset);

}  // namespace gravac
