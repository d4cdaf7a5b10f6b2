#pragma once

#include <functional>
#include <random>
#include <vector>

#include "gravac/amplitudes.hpp"
#include "gravac/interface_symbols.hpp"

namespace gravac {

struct ReflectionSample {
    double tau = 1.0;
    Eigen::Vector2d eta = Eigen::Vector2d::Zero();  // tangential covector
    int order = 0;                                  // 0 or -1
    Complex value = 0.0;
    CovectorClass cls = CovectorClass::HH;
    double slowness() const { return eta.norm() / tau; }
};

struct InterfaceJet {
    double rho_p = 0, c_p = 0;
    double dnu_log_c_p = 0, dnu_log_sqrt_rho_p = 0;
    Vec3 grad_phi = Vec3::Zero();
};

struct Order0Result {
    double rho_p = 0, c_p = 0;
    double max_residual = 0;
};

// Impedance from the normal-incidence sample plus a bracketed 1-D root solve
// on an oblique sample; least_squares refines over all samples (used with
// noisy data).
Order0Result recover_order0(const std::vector<ReflectionSample>& samples, double rho_m,
                            double c_m, bool least_squares = false);

struct Order1Result {
    double dnu_log_c_p = 0, dnu_log_sqrt_rho_p = 0;
    Vec3 grad_phi = Vec3::Zero();
    double condition = 0;
    int rank = 0;
};

Order1Result recover_order1(const std::vector<ReflectionSample>& samples,
                            const InterfaceSides& sides);

// Design matrix of the order-1 recovery (columns: dnu log c, dnu log sqrt rho,
// d1 Phi, d2 Phi, d3 Phi), exposed for rank diagnostics.
Eigen::MatrixXd order1_design(const std::vector<ReflectionSample>& samples,
                              const InterfaceSides& sides);

struct RayTransformDatum {
    Vec3 entry_x, entry_dir;
    Vec3 exit_x, exit_dir;
    double value = 0;
};

using TensorField = std::function<Mat3(const Vec3&)>;
using VectorField = std::function<Vec3(const Vec3&)>;

// Quadrature of N^t B N ds along traced geodesics of c^-2 dx^2.
std::vector<RayTransformDatum> ray_transform_forward(const Medium& m, const TensorField& B,
                                                     const std::vector<PhasePoint>& starts,
                                                     double max_s = 20.0);

// Symmetrized differential with the conformal correction, built so that
// (dv)(N,N) = d/ds (v . N) along every ray: integrates to the endpoint
// difference, hence invisible to the ray transform.
TensorField symmetrized_differential(const VectorField& v, const Medium& m, double fd_h = 1e-5);

// ---------------------------------------------------------------------------
// Grids and the Saint-Venant machinery.
// ---------------------------------------------------------------------------

struct FdGrid {
    int n = 64;          // nodes per dimension
    double extent = 1.0; // box [-extent, extent]^3
    double h() const { return 2.0 * extent / (n - 1); }
    Vec3 node(int i, int j, int k) const {
        return Vec3(-extent + i * h(), -extent + j * h(), -extent + k * h());
    }
    size_t idx(int i, int j, int k) const {
        return (static_cast<size_t>(i) * n + j) * n + k;
    }
    size_t size() const { return static_cast<size_t>(n) * n * n; }
};

struct ScalarGrid {
    FdGrid g;
    std::vector<double> v;

    static ScalarGrid sample(const FdGrid& g, const std::function<double(const Vec3&)>& f);
    double at(int i, int j, int k) const { return v[g.idx(i, j, k)]; }
    // Fourth-order central first/second derivatives; valid 2 nodes from faces.
    double d1(int i, int j, int k, int axis) const;
    double d2(int i, int j, int k, int a, int b) const;
    double lap(int i, int j, int k) const;
};

struct TensorGrid {
    FdGrid g;
    std::array<std::vector<double>, 9> comp;  // row-major 3x3 per node

    static TensorGrid sample(const FdGrid& g, const TensorField& f);
    Mat3 at(int i, int j, int k) const;
};

// Saint-Venant operator by finite differences, evaluated lazily per node.
class SaintVenantField {
  public:
    explicit SaintVenantField(TensorGrid B) : grid_(B.g) {
        for (int c = 0; c < 9; ++c) comp_[c] = ScalarGrid{B.g, std::move(B.comp[c])};
    }
    Tensor4 at(int i, int j, int k) const;
    // sum_{ij} (WB)[e_i, e_i, e_j, e_j]
    double contraction(int i, int j, int k) const;
    const FdGrid& grid() const { return grid_; }

  private:
    FdGrid grid_;
    std::array<ScalarGrid, 9> comp_;
};

SaintVenantField saint_venant_W(TensorGrid B);

struct MediaPair {
    const Medium* m = nullptr;
    const Medium* m_tilde = nullptr;
    const GravityField* grav = nullptr;
    const GravityField* grav_tilde = nullptr;
    double k0 = 1.0;
};

// Difference tensor (A - A_tilde)/c of a media pair sharing one wavefront
// family; the rho,Phi-free remainder cancels in the difference. Vanishes
// identically for equal pairs and feeds the ray transform.
TensorField pair_difference_tensor(const MediaPair& pair, const FamilyPtr& family,
                                   bool selfgrav);

// Scalar field whose W-contraction reproduces the elliptic equation's
// Delta^2-expression for the pair; includes the Hessian block that W must
// annihilate.
ScalarGrid contraction_T4(const MediaPair& pair, const FdGrid& grid);

struct EllipticResidual {
    ScalarGrid r1;  // Delta^2 beta_- + Delta(grad beta_+ . grad beta_-) + k0 Delta(g(e^b - 1)) - Delta(h . grad Y)
    ScalarGrid r2;  // Delta^2 Y - k0 Delta(g(e^b - 1))
    int margin = 4; // nodes from the faces where the stencils are valid
};

EllipticResidual elliptic_residual(const ScalarGrid& beta_minus, const ScalarGrid& Y,
                                   const std::function<double(const Vec3&)>& beta_plus,
                                   const std::function<double(const Vec3&)>& g_coeff,
                                   const std::function<Vec3(const Vec3&)>& h_coeff, double k0);

// ---------------------------------------------------------------------------
// Layer stripping.
// ---------------------------------------------------------------------------

struct InterfaceData {
    int truth_interface = 0;  // index into the source medium's interface list
    double two_way_time = 0;  // normal-incidence round trip from the surface
    std::vector<ReflectionSample> order0;
    std::vector<ReflectionSample> order1;
};

struct SyntheticData {
    double surface_radius = 1.0;
    double rho_outside = 1.0, c_outside = 1.0;
    std::vector<InterfaceData> interfaces;  // outermost (the surface) first
};

// Forward-model the measurements for a piecewise-constant radial ball,
// using the traced two-way times, the principal symbols and the order -1
// reflection value with the true gravity. noise = multiplicative sigma on
// order-0 values (seeded, deterministic).
SyntheticData synthesize_layered(const Medium& m, double k0, double tau,
                                 const std::vector<double>& slownesses0,
                                 double noise = 0.0, uint64_t seed = 0);

struct LayerEstimate {
    double radius_true = 0, radius_est = 0;
    double rho_true = 0, rho_est = 0;
    double c_true = 0, c_est = 0;
    Vec3 grad_phi_est = Vec3::Zero();
    double grad_phi_consistency = 0;  // |order-1 estimate - forward solve| at the interface
    double order1_condition = 0;
};

struct LayerStripReport {
    std::vector<LayerEstimate> layers;
    double max_rel_error = 0;
    bool converged = true;
};

LayerStripReport layer_strip(const SyntheticData& data, const Medium& truth, double k0);

}  // namespace gravac
