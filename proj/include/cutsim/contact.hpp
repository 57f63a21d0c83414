#pragma once

#include <vector>

#include "cutsim/math_types.hpp"
#include "cutsim/types.hpp"

namespace cutsim {

struct ContactParams {
    double restitution = 0.0;    // in [0,1]; 0 = inelastic normal response
    double friction_mu = 0.4;    // Coulomb coefficient, >= 0
    double query_aabb_pad = 0.01;  // m, padding for tool AABB culling
};

// Average-force record over one output-accumulation window.
struct ForceRecord {
    double t = 0.0;                    // window end time (s)
    Vec3 F_avg{Vec3::Zero()};          // window_impulse / dt_acc
    double magnitude = 0.0;            // |F_avg|
    Vec3 window_impulse{Vec3::Zero()}; // kg m/s
};

// Velocity-level contact response with an inelastic/restitution normal part
// and a Coulomb-capped tangential part. v_tool is the rigid tool velocity at
// the node; n is the unit outward SDF normal. Returns the corrected node
// velocity; separating nodes pass through unchanged.
Vec3 resolve_node_contact(const Vec3& v_node, const Vec3& v_tool, const Vec3& n,
                          const ContactParams& params);

// Builds the window force record from the impulse accumulated over dt_acc.
// Throws ConfigError if dt_acc <= 0.
ForceRecord accumulate_force(const Vec3& window_impulse, double dt_acc, double t_window_end);

// c_hat = min(1, accumulator / c_norm), c_norm = 0.35 dx / dt.
double contact_strength(double approach_accumulator, const SimConfig& cfg);

}  // namespace cutsim
