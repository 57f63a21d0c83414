#pragma once

#include <utility>
#include <vector>

#include "cutsim/math_types.hpp"
#include "cutsim/sdf.hpp"
#include "cutsim/types.hpp"

namespace cutsim {

// Kinematically driven blade with the normalized-speed resistance state.
struct KnifeTool {
    SdfShape shape;                  // wedge-blade
    Vec3 linear_velocity{Vec3::Zero()};   // of the blade origin (m/s), already u-scaled
    Vec3 angular_velocity{Vec3::Zero()};  // rad/s, world frame
    Vec3 stroke_dir{0.0, -1.0, 0.0};      // unit commanded motion direction
    double u = 1.0;                  // normalized speed
    double s0 = 0.0;                 // reference (commanded) speed (m/s)
    double k2 = 0.0;                 // resistance coefficient

    // Rigid velocity field of the tool at a world point.
    Vec3 velocity_at(const Vec3& x_world) const {
        return linear_velocity + angular_velocity.cross(x_world - shape.pose.translation);
    }
    double speed() const { return u * s0; }
};

struct CutThresholds {
    double band = 0.0;         // blade band half-width (m)
    double v_th = 0.0;         // approach-speed threshold (m/s)
    double c_norm = 0.0;       // contact-strength normalization (m/s equivalent)
    double damage_rate = 0.0;  // 1/s
};

// band = band0 (dx_ref/dx)^gamma; v_th = (dx/dt) v_hat; c_norm = 0.35 dx/dt.
CutThresholds resolution_scaled_thresholds(const SimConfig& cfg);

// Damage growth gated on: |phi| < band, c_hat >= c_min, v_n <= -v_th, and a
// downward stroke. Monotone, saturates at 1.
double damage_update(double D, double phi, double c_hat, double v_n, const Vec3& stroke_dir,
                     const CutThresholds& thresholds, const SimConfig& cfg, double dt);

// (1 - D)-scaled Lame moduli with the residual floor eps_soft.
std::pair<double, double> effective_moduli(double mu, double lambda, double D,
                                           double eps_soft = 1.0e-3);

// u' = u / (1 + k2 c_hat u dt).
double speed_resistance(double u, double c_hat, double k2, double dt);

// k2 = k2_ref (E/E_ref)^a (sigma_y/sigma_y_ref)^b. Infinite yield stresses
// cancel only when both sides are infinite.
double k2_scale(const Material& mat, const Material& ref, double a = 0.5, double b = 0.5);

// Lateral separation impulse for particles within `band` of the cutting
// edge; sign picked per side of the blade mid-plane. Returns per-particle
// velocity deltas (zero away from the edge band).
std::vector<Vec3> tip_force(const std::vector<Particle>& particles, const SdfShape& blade,
                            double band, double magnitude, double dt);

// Single-particle form used on the engine's hot path.
Vec3 tip_force_delta(const Particle& p, const SdfShape& blade, double band, double magnitude,
                     double dt);

struct SegmentationResult {
    int segment_count = 0;
    std::vector<int> labels;  // one per particle
};

// Connected components over particles within link_radius, excluding
// particles with D >= damage_cut as connectors. Labels are ordered by the
// smallest contained particle index. Damaged particles adopt the label of
// the nearest connector within link_radius (else keep prev_labels/0).
SegmentationResult segment_connectivity(const std::vector<Particle>& particles,
                                        double link_radius, double damage_cut,
                                        const std::vector<int>* prev_labels = nullptr);

}  // namespace cutsim
