#include "cutsim/safety.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cutsim/errors.hpp"

namespace cutsim {

namespace {

constexpr const char* kQuadraticFeatures[] = {"1", "v", "v^2", "E", "sigma_y", "v*E"};
constexpr const char* kLinearFeatures[] = {"1", "v", "E", "sigma_y"};

Eigen::VectorXd features(ForceModelClass cls, double v, double E, double sy) {
    if (cls == ForceModelClass::Quadratic) {
        Eigen::VectorXd f(6);
        f << 1.0, v, v * v, E, sy, v * E;
        return f;
    }
    Eigen::VectorXd f(4);
    f << 1.0, v, E, sy;
    return f;
}

}  // namespace

double ForceModel::predict(double v, double E, double sigma_y) const {
    const Eigen::VectorXd f = features(model_class, v, E, sigma_y);
    double out = 0.0;
    for (int i = 0; i < f.size(); ++i) out += coeffs[i] * f[i];
    return out;
}

ForceModel fit_model(const std::vector<SafetySample>& samples, ForceModelClass model_class) {
    std::vector<const SafetySample*> used;
    for (const SafetySample& s : samples) {
        if (s.valid) used.push_back(&s);
    }
    const int ncoef = model_class == ForceModelClass::Quadratic ? 6 : 4;
    if (static_cast<int>(used.size()) < ncoef) {
        throw FitError("need at least " + std::to_string(ncoef) + " samples, got " +
                       std::to_string(used.size()));
    }

    Eigen::MatrixXd A(used.size(), ncoef);
    Eigen::VectorXd y(used.size());
    for (size_t i = 0; i < used.size(); ++i) {
        if (!std::isfinite(used[i]->sigma_y) || !std::isfinite(used[i]->E) ||
            !std::isfinite(used[i]->v) || !std::isfinite(used[i]->F)) {
            throw FitError(
                "sample features must be finite; safety sweeps need finite yield stresses");
        }
        A.row(i) = features(model_class, used[i]->v, used[i]->E, used[i]->sigma_y);
        y[i] = used[i]->F;
    }

    // Column scaling keeps the QR well conditioned with Pa-scale features.
    Eigen::VectorXd scale(ncoef);
    for (int c = 0; c < ncoef; ++c) {
        scale[c] = std::max(A.col(c).cwiseAbs().maxCoeff(), 1e-300);
    }
    Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    qr.setThreshold(1e-10);
    if (qr.rank() < ncoef) {
        // Name the feature pivoted out last (the most redundant column).
        const auto perm = qr.colsPermutation().indices();
        const int degenerate = perm[ncoef - 1];
        const char* name = model_class == ForceModelClass::Quadratic
                               ? kQuadraticFeatures[degenerate]
                               : kLinearFeatures[degenerate];
        throw FitError(std::string("rank-deficient design; degenerate feature: ") + name);
    }
    const Eigen::VectorXd cs = qr.solve(y);
    const Eigen::VectorXd c = cs.cwiseQuotient(scale);

    ForceModel model;
    model.model_class = model_class;
    model.coeffs.assign(c.data(), c.data() + ncoef);
    model.sample_count = static_cast<int>(used.size());

    const Eigen::VectorXd resid = A * c - y;
    model.residual_norm = resid.norm();
    model.residual_max = resid.cwiseAbs().maxCoeff();
    const double f_max_obs = y.cwiseAbs().maxCoeff();
    model.residual_band = f_max_obs > 0.0 ? model.residual_max / f_max_obs : 0.0;

    // Reject fits that are not non-decreasing in v anywhere on the sampled
    // velocity range, per material.
    double v_lo = used[0]->v, v_hi = used[0]->v;
    for (const SafetySample* s : used) {
        v_lo = std::min(v_lo, s->v);
        v_hi = std::max(v_hi, s->v);
    }
    for (const SafetySample* s : used) {
        const int steps = 64;
        for (int i = 0; i < steps; ++i) {
            const double v0 = v_lo + (v_hi - v_lo) * i / steps;
            const double v1 = v_lo + (v_hi - v_lo) * (i + 1) / steps;
            const double d = model.predict(v1, s->E, s->sigma_y) -
                             model.predict(v0, s->E, s->sigma_y);
            if (d < -1e-9 * std::max(1.0, std::abs(model.predict(v0, s->E, s->sigma_y)))) {
                throw FitError("fitted surface is decreasing in v near v = " +
                               std::to_string(v0) + " for E = " + std::to_string(s->E) +
                               "; refusing non-monotone force model");
            }
        }
    }
    return model;
}

double safe_velocity(const ForceModel& model, double E, double sigma_y, double F_max,
                     double v_range_min, double v_range_max) {
    if (!(F_max > 0.0)) {
        throw ParameterDomainError("F_max must be positive");
    }
    if (!(v_range_min <= v_range_max)) {
        throw ParameterDomainError("empty velocity range");
    }
    if (model.predict(v_range_min, E, sigma_y) > F_max) {
        throw FitError("no safe velocity: F_hat(v_min) = " +
                       std::to_string(model.predict(v_range_min, E, sigma_y)) + " exceeds " +
                       std::to_string(F_max));
    }
    if (model.predict(v_range_max, E, sigma_y) <= F_max) {
        return v_range_max;
    }
    double lo = v_range_min, hi = v_range_max;
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        if (model.predict(mid, E, sigma_y) <= F_max) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

Trajectory clamp_trajectory(const Trajectory& traj, double v_safe) {
    if (!(v_safe > 0.0)) {
        throw ParameterDomainError("v_safe must be positive");
    }
    Trajectory out = traj;
    double t = out.waypoints.empty() ? 0.0 : out.waypoints.front().t;
    for (size_t i = 0; i + 1 < out.waypoints.size(); ++i) {
        Waypoint& wp = out.waypoints[i];
        const double seg_dt = traj.waypoints[i + 1].t - traj.waypoints[i].t;
        wp.t = t;
        if (wp.v_cmd > v_safe) {
            t += seg_dt * (wp.v_cmd / v_safe);
            wp.v_cmd = v_safe;
        } else {
            t += seg_dt;
        }
    }
    if (!out.waypoints.empty()) {
        out.waypoints.back().t = t;
    }
    return out;
}

}  // namespace cutsim
