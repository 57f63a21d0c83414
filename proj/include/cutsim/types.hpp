#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cutsim/math_types.hpp"

namespace cutsim {

// Lagrangian material sample.
struct Particle {
    Vec3 x{Vec3::Zero()};        // position (m)
    Vec3 v{Vec3::Zero()};        // velocity (m/s)
    Mat3 F{Mat3::Identity()};    // deformation gradient
    Mat3 C{Mat3::Zero()};        // affine velocity matrix (1/s)
    double m = 0.0;              // mass (kg)
    double V0 = 0.0;             // initial volume (m^3)
    double alpha = 0.0;          // accumulated plastic strain, >= 0
    double D = 0.0;              // damage in [0,1], non-decreasing
    int mat = 0;                 // material index
    int seg = 0;                 // segment label, owned by the cutting module
};

// Continuum parameters. sigma_y = +inf means purely elastic.
struct Material {
    double rho = 1000.0;     // density (kg/m^3)
    double E = 1.0e5;        // Young's modulus (Pa)
    double nu = 0.3;         // Poisson ratio, in (-1, 0.5)
    double sigma_y = std::numeric_limits<double>::infinity();  // yield stress (Pa)
    double k2_ref = 40.0;    // speed-resistance coefficient at reference stiffness
};

enum class JClampMode { NearestBound, UnitReset };
enum class DamageMode { Proportional, ConstantRate };
enum class ReductionMode { Deterministic, Fast };

struct SimConfig {
    // Grid over the cubic domain [0, domain_size]^3.
    double domain_size = 0.5;           // m
    int grid_cells = 64;                // cells per axis
    double dt = 0x1.0p-15;              // s (power of two keeps the force audit exact)
    double dt_acc = 0x1.0p-8;           // force output-accumulation window (s)
    Vec3 gravity{0.0, -9.8, 0.0};       // m/s^2
    double damping_grid = 0.5;          // 1/s
    double damping_particle = 0.1;      // 1/s
    double j_min = 0.4;
    double j_max = 1.4;
    JClampMode j_clamp_mode = JClampMode::NearestBound;
    double dx_ref = 0.5 / 64.0;         // reference spacing (m)
    double gamma = 1.0;                 // band-scaling exponent
    double band0 = 0.5 * (0.5 / 64.0);  // reference blade band half-width (m)
    double v_hat = 5.0e-4;              // normalized cutting speed threshold
    double c_min = 0.01;                // min contact strength that allows cutting
    double cfl_factor = 0.2;
    uint64_t seed = 0;
    ReductionMode reduction = ReductionMode::Deterministic;

    // Cutting-module knobs (exposed here so a config snapshot is complete).
    double damage_rate = 200.0;         // 1/s
    DamageMode damage_mode = DamageMode::Proportional;
    double eps_soft = 1.0e-3;           // residual stiffness factor at D = 1
    double tip_force = 5.0e-4;          // N
    double tip_band = 0.5 * (0.5 / 64.0);  // edge-band radius for the tip force (m)
    double visco_relax = 0.0;           // Perzyna-style relaxation, 0 = rate-independent
    bool approach_window_accum = false; // accumulate approach speed over the window
    double k2_exp_a = 0.5;              // k2 scaling exponent in E
    double k2_exp_b = 0.5;              // k2 scaling exponent in sigma_y
    double max_episode_time = 2.0;      // s

    double dx() const { return domain_size / grid_cells; }
    int nodes_per_axis() const { return grid_cells + 1; }
};

// Eulerian node state, stored as parallel arrays in MpmGrid; this view exists
// for tests and diagnostics.
struct GridNode {
    double mass = 0.0;
    Vec3 mom{Vec3::Zero()};
    Vec3 v_before{Vec3::Zero()};
    Vec3 v_after{Vec3::Zero()};
};

// Validates invariants shared by every entry point that consumes a config.
// Throws ConfigError.
void validate_config(const SimConfig& cfg, const std::vector<Material>& materials);

}  // namespace cutsim
