#pragma once

#include <string>
#include <vector>

#include "cutsim/planner.hpp"
#include "cutsim/types.hpp"

namespace cutsim {

struct SafetySample {
    double v = 0.0;        // approach speed (m/s)
    double E = 0.0;        // material feature (Pa)
    double sigma_y = 0.0;  // material feature (Pa)
    double F = 0.0;        // observed peak force magnitude (N)
    bool valid = true;     // false when the episode diverged
};

enum class ForceModelClass { Linear, Quadratic };

// Regression surface F_hat(v, E, sigma_y); quadratic in v with linear
// material features by default.
struct ForceModel {
    ForceModelClass model_class = ForceModelClass::Quadratic;
    // Quadratic: [1, v, v^2, E, sigma_y, v E]; Linear: [1, v, E, sigma_y].
    std::vector<double> coeffs;
    // Fit diagnostics.
    int sample_count = 0;
    double residual_norm = 0.0;
    double residual_max = 0.0;   // max |F_hat - F| over samples (N)
    double residual_band = 0.0;  // residual_max / max observed F

    double predict(double v, double E, double sigma_y) const;
};

// Least-squares fit with a monotonicity check in v over the sampled range;
// violations are rejected with diagnostics. Throws FitError on rank
// deficiency (naming the degenerate feature) or insufficient samples.
ForceModel fit_model(const std::vector<SafetySample>& samples,
                     ForceModelClass model_class = ForceModelClass::Quadratic);

// Largest v in [v_range_min, v_range_max] with F_hat <= F_max, bisected to
// 1e-6 m/s. Throws FitError when even v_range_min is unsafe.
double safe_velocity(const ForceModel& model, double E, double sigma_y, double F_max,
                     double v_range_min, double v_range_max);

// Caps every waypoint's commanded speed at v_safe, re-spacing timestamps so
// the spatial polyline is unchanged.
Trajectory clamp_trajectory(const Trajectory& traj, double v_safe);

}  // namespace cutsim
