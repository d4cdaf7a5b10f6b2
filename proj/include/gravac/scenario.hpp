#pragma once

#include <optional>
#include <string>

#include "gravac/gravity.hpp"
#include "gravac/media.hpp"

namespace gravac {

// Scenario file: JSON with a medium block (regions with closed-form fields,
// nested sphere/plane interfaces), gravity settings, ray fans and the task
// blocks consumed by the CLI subcommands. The full schema is documented in
// the README and mirrored by the named files under scenarios/.
struct RayFan {
    Vec3 x = Vec3(1.5, 0, 0);
    Vec3 dir = Vec3(-1, 0, 0);
    double tau = 1.0;
    double max_s = 6.0;
    // "none" | "planar" | "spherical": runs the amplitude transport along
    // the first ray branch (constant-c media) and exports a CSV.
    std::string transport = "none";
    bool selfgrav = true;
};

struct ReflectivityTask {
    int interface_index = 0;
    double tau = 1.0;
    double slowness_max = 0.95;  // fraction of the tighter critical slowness
    int count = 256;
};

struct SynthesizeTask {
    double tau = 1.0;
    std::vector<double> slownesses{0.0, 0.4};
    double noise = 0.0;
};

struct InvertTask {
    double noise = 0.0;
    int seeds = 100;
    std::vector<double> slownesses{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.55, 0.6};
};

struct CarlemanTask {
    double a = 0.35, b = 0.8;
    double beta0 = 4.0;
    int sweep = 8;
    double s0 = 0.0, c_tilde = 1.0, r0 = 0.9;
};

struct GravityTask {
    std::string solver = "radial";  // or "grid"
    GridSpec grid;
};

struct Scenario {
    std::string name = "scenario";
    uint64_t seed = 1;
    double k0 = 1.0;
    std::optional<Medium> medium;
    GravityTask gravity;
    std::vector<RayFan> rays;
    ReflectivityTask reflectivity;
    SynthesizeTask synthesize;
    InvertTask invert;
    CarlemanTask carleman;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

// CLI entry point; argv without the program name. Returns the exit code.
int cli_run(const std::vector<std::string>& args);

}  // namespace gravac
