#pragma once

#include <optional>
#include <vector>

#include "gravac/gravity.hpp"
#include "gravac/media.hpp"

namespace gravac {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// Point on the characteristic set tau^2 = c^2 |xi|^2.
struct PhasePoint {
    double t = 0;
    Vec3 x = Vec3::Zero();
    double tau = 1;
    Vec3 xi = Vec3::UnitX();
};

// On-shell start state with xi = (tau/c) * dir.
PhasePoint make_onshell(const Medium& m, const Vec3& x, const Vec3& direction, double tau,
                        double t0 = 0.0);

enum class EventKind { Reflection, Transmission, Glancing, Brewster, Exit };

struct RayEvent {
    EventKind kind = EventKind::Exit;
    int interface_id = -1;
    PhasePoint incident;
    std::optional<PhasePoint> reflected;
    std::optional<PhasePoint> transmitted;
    Mat6 reflected_map = Mat6::Identity();    // equal-parameter paraxial transfer
    Mat6 transmitted_map = Mat6::Identity();
};

struct RaySample {
    double s = 0;
    PhasePoint p;
    Mat6 propagator = Mat6::Identity();  // d(state at s) / d(state at segment start)
};

struct RaySegment {
    std::vector<RaySample> samples;
    int region = 0;
    double s_begin = 0, s_end = 0;
    // Composition of all event maps and propagators from the path start to
    // the beginning of this segment.
    Mat6 from_path_start = Mat6::Identity();

    const RaySample& front() const { return samples.front(); }
    const RaySample& back() const { return samples.back(); }
};

enum class RayStatus { Ok, Glancing, StepLimit };

struct RayPath {
    std::vector<RaySegment> segments;
    std::vector<RayEvent> events;
    RayStatus status = RayStatus::Ok;

    double length() const { return segments.empty() ? 0.0 : segments.back().s_end; }
    const PhasePoint& start() const { return segments.front().samples.front().p; }
    const PhasePoint& end() const { return segments.back().samples.back().p; }
    // Interpolated phase point at arclength s (linear between stored samples).
    PhasePoint at(double s) const;
    Mat6 propagator_at(double s) const;
};

enum class BranchPolicy { Transmitted, Reflected };

struct TraceOptions {
    double max_s = 20.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double event_tol_s = 1e-10;
    double glancing_tol = 1e-3;  // |xi.nu|/|xi| below this aborts the branch
    int max_events = 16;
    BranchPolicy branch = BranchPolicy::Transmitted;
    bool stop_at_domain = true;
    double sample_ds = 0.02;  // densify stored samples for later quadrature
};

// Bicharacteristic through piecewise-smooth media: dx/ds = xi/|xi|,
// dxi/ds = -|xi| grad log c, dt/ds = 1/c, with interface events located by
// sign change + bracketing on psi(x(s)). Gravity never bends rays; the
// parameter is accepted for call-site uniformity with the amplitude stage.
RayPath trace(const Medium& m, const GravityField* gravity, const PhasePoint& start,
              const TraceOptions& opt = {});

struct SnellResult {
    PhasePoint reflected;
    std::optional<PhasePoint> transmitted;
};

SnellResult snell_refract(const PhasePoint& state, const InterfaceFrame& frame,
                          double glancing_tol = 1e-3);

enum class CovectorClass { HH, PostCriticalMinus, PostCriticalPlus, GlancingMinus, GlancingPlus, Brewster };

// Brewster slowness |eta'/tau| for the sides, if the formula's denominator
// does not degenerate (rho_+ == rho_-).
std::optional<double> brewster_slowness(double rho_m, double c_m, double rho_p, double c_p);

CovectorClass classify_covector(const MediumEval& minus, const MediumEval& plus, double tau,
                                double slowness, double tol = 1e-9);

double travel_time(const RayPath& path);

// Distance in the metric c^-2 dx^2 between x and y, by shooting a purely
// transmitted ray. Throws NoConnectingRay when the shooting fails.
double geodesic_distance(const Medium& m, const Vec3& x, const Vec3& y, double tau = 1.0,
                         double tol = 1e-9);

}  // namespace gravac
