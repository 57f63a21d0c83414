#include "cutsim/contact.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cutsim/errors.hpp"

namespace cutsim {

Vec3 resolve_node_contact(const Vec3& v_node, const Vec3& v_tool, const Vec3& n,
                          const ContactParams& params) {
    const double n_len = n.norm();
    if (std::abs(n_len - 1.0) > 1e-6) {
        throw ParameterDomainError("contact normal must be unit length, |n| = " +
                                   std::to_string(n_len));
    }
    const Vec3 u = v_node - v_tool;
    const double u_n = u.dot(n);
    if (u_n >= 0.0) {
        return v_node;  // separating
    }
    const double u_n_new = -params.restitution * u_n;
    const double delta_un = std::abs(u_n_new - u_n);

    Vec3 u_t = u - u_n * n;
    const double u_t_len = u_t.norm();
    if (u_t_len > 0.0) {
        const double scale = std::max(0.0, 1.0 - params.friction_mu * delta_un / u_t_len);
        u_t *= scale;
    }
    return v_tool + u_n_new * n + u_t;
}

ForceRecord accumulate_force(const Vec3& window_impulse, double dt_acc, double t_window_end) {
    if (!(dt_acc > 0.0)) {
        throw ConfigError("dt_acc must be positive, got " + std::to_string(dt_acc));
    }
    ForceRecord rec;
    rec.t = t_window_end;
    rec.window_impulse = window_impulse;
    rec.F_avg = window_impulse / dt_acc;
    rec.magnitude = rec.F_avg.norm();
    return rec;
}

double contact_strength(double approach_accumulator, const SimConfig& cfg) {
    const double c_norm = 0.35 * cfg.dx() / cfg.dt;
    return std::min(1.0, approach_accumulator / c_norm);
}

}  // namespace cutsim
