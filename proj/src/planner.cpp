#include "cutsim/planner.hpp"

#include <algorithm>
#include <cmath>

#include "cutsim/errors.hpp"
#include "cutsim/objects.hpp"

namespace cutsim {

const char* to_string(CutStyle s) {
    switch (s) {
        case CutStyle::Normal: return "normal";
        case CutStyle::Bias: return "bias";
        case CutStyle::Guillotine: return "guillotine";
        case CutStyle::Saw: return "saw";
    }
    return "?";
}

const char* to_string(ObjectKind k) {
    switch (k) {
        case ObjectKind::Orange: return "orange";
        case ObjectKind::Strawberry: return "strawberry";
        case ObjectKind::Melon: return "melon";
        case ObjectKind::Cucumber: return "cucumber";
        case ObjectKind::Banana: return "banana";
        case ObjectKind::Apple: return "apple";
        case ObjectKind::Peach: return "peach";
    }
    return "?";
}

const char* to_string(TrajPhase p) {
    switch (p) {
        case TrajPhase::Approach: return "approach";
        case TrajPhase::Contact: return "contact";
        case TrajPhase::Retract: return "retract";
    }
    return "?";
}

std::optional<CutStyle> style_from_string(const std::string& s) {
    if (s == "normal") return CutStyle::Normal;
    if (s == "bias") return CutStyle::Bias;
    if (s == "guillotine") return CutStyle::Guillotine;
    if (s == "saw") return CutStyle::Saw;
    return std::nullopt;
}

std::optional<ObjectKind> object_from_string(const std::string& s) {
    if (s == "orange") return ObjectKind::Orange;
    if (s == "strawberry") return ObjectKind::Strawberry;
    if (s == "melon") return ObjectKind::Melon;
    if (s == "cucumber") return ObjectKind::Cucumber;
    if (s == "banana") return ObjectKind::Banana;
    if (s == "apple") return ObjectKind::Apple;
    if (s == "peach") return ObjectKind::Peach;
    return std::nullopt;
}

PrimitiveSpec object_primitive(ObjectKind kind) {
    PrimitiveSpec p;
    switch (kind) {
        case ObjectKind::Banana:
            p.type = PrimitiveSpec::Type::Capsule;
            p.cyl_len = 0.13;
            p.radius = 0.018;
            break;
        case ObjectKind::Cucumber:
            p.type = PrimitiveSpec::Type::Capsule;
            p.cyl_len = 0.16;
            p.radius = 0.02;
            break;
        case ObjectKind::Orange:
            p.type = PrimitiveSpec::Type::Sphere;
            p.radius = 0.038;
            break;
        case ObjectKind::Apple:
            p.type = PrimitiveSpec::Type::Sphere;
            p.radius = 0.04;
            break;
        case ObjectKind::Peach:
            p.type = PrimitiveSpec::Type::Sphere;
            p.radius = 0.036;
            break;
        case ObjectKind::Melon:
            p.type = PrimitiveSpec::Type::Sphere;
            p.radius = 0.06;
            break;
        case ObjectKind::Strawberry:
            p.type = PrimitiveSpec::Type::Ellipsoid;
            p.semi_axes = Vec3(0.014, 0.018, 0.014);
            break;
    }
    return p;
}

bool primitive_contains(const PrimitiveSpec& prim, const Vec3& local, double scale) {
    const Vec3 q = local / scale;
    switch (prim.type) {
        case PrimitiveSpec::Type::Sphere:
            return q.norm() <= prim.radius;
        case PrimitiveSpec::Type::Capsule: {
            const double half = 0.5 * prim.cyl_len;
            const double ax = std::clamp(q.x(), -half, half);
            return (q - Vec3(ax, 0.0, 0.0)).norm() <= prim.radius;
        }
        case PrimitiveSpec::Type::Ellipsoid:
            return (q.array() / prim.semi_axes.array()).matrix().squaredNorm() <= 1.0;
    }
    return false;
}

Aabb compute_aabb(std::span<const Vec3> points) {
    if (points.empty()) {
        throw PlanningError("compute_aabb needs at least one point");
    }
    Aabb box{points[0], points[0]};
    for (const Vec3& p : points) {
        box.min = box.min.cwiseMin(p);
        box.max = box.max.cwiseMax(p);
    }
    return box;
}

std::vector<double> cut_planes(const Aabb& aabb, const CutState& state, int cut_axis) {
    const double lo = aabb.min[cut_axis];
    const double hi = aabb.max[cut_axis];
    const double L = hi - lo;
    if (!(L > 0.0)) {
        throw PlanningError("degenerate object extent along the cut axis");
    }
    std::vector<double> planes;
    if (std::holds_alternative<MiddleState>(state)) {
        planes.push_back(lo + 0.5 * L);
    } else if (const auto* ratio = std::get_if<RatioState>(&state)) {
        if (!(ratio->r > 0.0 && ratio->r < 1.0)) {
            throw PlanningError("ratio must lie strictly inside (0,1)");
        }
        planes.push_back(ratio->side == CutSide::Left ? lo + ratio->r * L
                                                      : hi - ratio->r * L);
    } else {
        const auto& split = std::get<SplitState>(state);
        if (split.k < 2) {
            throw PlanningError("split requires k >= 2 pieces");
        }
        for (int i = 1; i < split.k; ++i) {
            planes.push_back(lo + (static_cast<double>(i) / split.k) * L);
        }
    }
    return planes;
}

int pick_cut_axis(const Aabb& aabb) {
    const Vec3 e = aabb.extent();
    return e.x() >= e.z() ? 0 : 2;
}

Aabb object_aabb_for_scene(const SceneSpec& scene) {
    const PrimitiveSpec prim = object_primitive(scene.object_kind);
    const double s = scene.object_scale;
    const double c = std::abs(std::cos(scene.object_rotation));
    const double sn = std::abs(std::sin(scene.object_rotation));
    Vec3 half;
    switch (prim.type) {
        case PrimitiveSpec::Type::Sphere:
            half = Vec3::Constant(prim.radius * s);
            break;
        case PrimitiveSpec::Type::Capsule: {
            const double hl = 0.5 * prim.cyl_len * s;
            const double r = prim.radius * s;
            half = Vec3(hl * c + r, r, hl * sn + r);
            break;
        }
        case PrimitiveSpec::Type::Ellipsoid: {
            const Vec3 a = prim.semi_axes * s;
            half = Vec3(std::sqrt(a.x() * a.x() * c * c + a.z() * a.z() * sn * sn), a.y(),
                        std::sqrt(a.x() * a.x() * sn * sn + a.z() * a.z() * c * c));
            break;
        }
    }
    // The object sits on its base plane: min.y is the base position exactly.
    const Vec3& p = scene.object_position;
    return {Vec3(p.x() - half.x(), p.y(), p.z() - half.z()),
            Vec3(p.x() + half.x(), p.y() + 2.0 * half.y(), p.z() + half.z())};
}

namespace {

// Base orientation: blade edge along the lateral axis, lateral normal along
// the cut axis, blade up along +y.
Quat base_orientation(const CutFrame& frame) {
    if (frame.cut_axis == 0) {
        return Quat::Identity();
    }
    return Quat(Eigen::AngleAxisd(-M_PI / 2.0, Vec3::UnitY()));
}

Vec3 make_pos(const CutFrame& frame, double along_cut, double y, double lateral) {
    Vec3 p;
    p[frame.cut_axis] = along_cut;
    p[1] = y;
    p[frame.lateral_axis] = lateral;
    return p;
}

struct Builder {
    Trajectory traj;
    double t = 0.0;
    Vec3 last_pos{Vec3::Zero()};
    bool has_last = false;

    void add(const Vec3& pos, const Quat& q, double speed, TrajPhase phase) {
        if (has_last) {
            const double dist = (pos - last_pos).norm();
            const double dt = dist / std::max(speed, 1e-9);
            // Retag the previous waypoint's commanded speed toward this one.
            if (!traj.waypoints.empty()) {
                traj.waypoints.back().v_cmd = speed;
            }
            t += std::max(dt, 1e-9);
        }
        Waypoint wp;
        wp.t = t;
        wp.pose.rotation = q;
        wp.pose.translation = pos;
        wp.v_cmd = 0.0;
        wp.phase = phase;
        traj.waypoints.push_back(wp);
        last_pos = pos;
        has_last = true;
    }
};

// Contact + retract for one plane, appended to the builder. `entry` is the
// contact-entry position of the knife origin (edge midpoint).
void append_contact_and_retract(Builder& b, CutStyle style, const CutFrame& frame,
                                const StyleParams& sp, double plane, double speed,
                                double start_y) {
    const Quat q0 = base_orientation(frame);
    const double lat_c = 0.5 * (frame.object_aabb.min[frame.lateral_axis] +
                                frame.object_aabb.max[frame.lateral_axis]);
    const double y_top = frame.object_aabb.max.y() + frame.contact_margin;
    const double y_bot = frame.board_top + frame.bottom_margin;
    const double depth = y_top - y_bot;
    if (depth <= 0.0) {
        throw PlanningError("contact depth is non-positive; board above the object top");
    }

    switch (style) {
        case CutStyle::Normal: {
            b.add(make_pos(frame, plane, y_top, lat_c), q0, speed, TrajPhase::Contact);
            b.add(make_pos(frame, plane, y_bot, lat_c), q0, speed, TrajPhase::Retract);
            break;
        }
        case CutStyle::Bias: {
            const double drift = depth * std::tan(sp.bias_angle);
            b.add(make_pos(frame, plane, y_top, lat_c - 0.5 * drift), q0, speed,
                  TrajPhase::Contact);
            b.add(make_pos(frame, plane, y_bot, lat_c + 0.5 * drift), q0, speed,
                  TrajPhase::Retract);
            break;
        }
        case CutStyle::Saw: {
            const double duration = depth / speed;
            const int steps =
                std::max(8, static_cast<int>(std::ceil(duration * sp.saw_frequency * 12.0)));
            for (int i = 0; i <= steps; ++i) {
                const double s = static_cast<double>(i) / steps;
                const double tl = s * duration;
                const double lat =
                    lat_c + sp.saw_amplitude * std::sin(2.0 * M_PI * sp.saw_frequency * tl);
                const TrajPhase phase = i == steps ? TrajPhase::Retract : TrajPhase::Contact;
                b.add(make_pos(frame, plane, y_top - s * depth, lat), q0, speed, phase);
            }
            break;
        }
        case CutStyle::Guillotine: {
            // Tip fixed horizontally beyond the object's far side; the blade
            // rotates level while the tip descends to the board.
            const Vec3 edge_dir_world = q0 * Vec3::UnitZ();
            const double sign_l = edge_dir_world[frame.lateral_axis] >= 0.0 ? 1.0 : -1.0;
            const double margin = 0.01;
            const double tip_l =
                lat_c + sign_l * (0.5 * (frame.object_aabb.max[frame.lateral_axis] -
                                         frame.object_aabb.min[frame.lateral_axis]) +
                                  margin);
            Vec3 tilt_axis = Vec3::Zero();
            tilt_axis[frame.cut_axis] = 1.0;
            const double tilt0 = sp.guillotine_tilt * sign_l *
                                 (frame.cut_axis == 0 ? 1.0 : -1.0);
            const double half_len = 0.5 * frame.blade_length;
            const int steps = 12;
            const double tip_y0 = y_top;
            for (int i = 0; i <= steps; ++i) {
                const double s = static_cast<double>(i) / steps;
                const double theta = tilt0 * (1.0 - s);
                const Quat q = Quat(Eigen::AngleAxisd(theta, tilt_axis)) * q0;
                const Vec3 tip = make_pos(frame, plane, tip_y0 + s * (y_bot - tip_y0), tip_l);
                const Vec3 origin = tip - q * Vec3(0.0, 0.0, half_len);
                const TrajPhase phase = i == steps ? TrajPhase::Retract : TrajPhase::Contact;
                b.add(origin, q, speed, phase);
            }
            break;
        }
    }
    // Retract straight up at the final lateral/orientation.
    Waypoint last = b.traj.waypoints.back();
    Vec3 up = last.pose.translation;
    up[1] = start_y;
    b.add(up, last.pose.rotation, speed, TrajPhase::Retract);
}

double guillotine_tip_sign(const CutFrame& frame) {
    const Quat q0 = base_orientation(frame);
    const Vec3 edge_dir_world = q0 * Vec3::UnitZ();
    return edge_dir_world[frame.lateral_axis] >= 0.0 ? 1.0 : -1.0;
}

// Approach waypoints down to the contact entry of the given style.
void append_approach(Builder& b, CutStyle style, const CutFrame& frame, const StyleParams& sp,
                     double plane, double speed, double start_y) {
    const Quat q0 = base_orientation(frame);
    const double lat_c = 0.5 * (frame.object_aabb.min[frame.lateral_axis] +
                                frame.object_aabb.max[frame.lateral_axis]);
    const double y_top = frame.object_aabb.max.y() + frame.contact_margin;

    switch (style) {
        case CutStyle::Normal:
        case CutStyle::Saw:
            b.add(make_pos(frame, plane, start_y, lat_c), q0, speed, TrajPhase::Approach);
            break;
        case CutStyle::Bias: {
            const double y_bot = frame.board_top + frame.bottom_margin;
            const double drift = (y_top - y_bot) * std::tan(sp.bias_angle);
            b.add(make_pos(frame, plane, start_y, lat_c - 0.5 * drift), q0, speed,
                  TrajPhase::Approach);
            break;
        }
        case CutStyle::Guillotine: {
            const double sign_l = guillotine_tip_sign(frame);
            const double margin = 0.01;
            const double tip_l =
                lat_c + sign_l * (0.5 * (frame.object_aabb.max[frame.lateral_axis] -
                                         frame.object_aabb.min[frame.lateral_axis]) +
                                  margin);
            const double tilt0 = sp.guillotine_tilt * sign_l *
                                 (frame.cut_axis == 0 ? 1.0 : -1.0);
            Vec3 tilt_axis = Vec3::Zero();
            tilt_axis[frame.cut_axis] = 1.0;
            const Quat q = Quat(Eigen::AngleAxisd(tilt0, tilt_axis)) * q0;
            const Vec3 tip = make_pos(frame, plane, start_y, tip_l);
            b.add(tip - q * Vec3(0.0, 0.0, 0.5 * frame.blade_length), q, speed,
                  TrajPhase::Approach);
            break;
        }
    }
}

}  // namespace

Trajectory generate_trajectory(const CutTask& task, const std::vector<double>& planes,
                               const CutFrame& frame, const StyleParams& style) {
    if (planes.empty()) {
        throw PlanningError("generate_trajectory needs at least one cut plane");
    }
    for (double plane : planes) {
        if (plane < frame.object_aabb.min[frame.cut_axis] - 1e-12 ||
            plane > frame.object_aabb.max[frame.cut_axis] + 1e-12) {
            throw PlanningError("cut plane " + std::to_string(plane) +
                                " lies outside the object AABB");
        }
    }
    std::vector<double> ordered = planes;
    std::sort(ordered.begin(), ordered.end());

    const double start_y = frame.object_aabb.max.y() + task.cut_height;
    Builder b;
    b.traj.style = task.style;
    for (double plane : ordered) {
        append_approach(b, task.style, frame, style, plane, task.approach_speed, start_y);
        append_contact_and_retract(b, task.style, frame, style, plane, task.approach_speed,
                                   start_y);
    }
    return b.traj;
}

Trajectory style_transfer(const Trajectory& traj, CutStyle target_style, size_t contact_start,
                          const CutFrame& frame, const StyleParams& style) {
    if (traj.style != CutStyle::Normal) {
        throw PlanningError("style_transfer requires a Normal source trajectory");
    }
    if (contact_start >= traj.waypoints.size()) {
        throw PlanningError("contact_start index out of range");
    }
    if (target_style == CutStyle::Normal) {
        return traj;
    }

    Trajectory out;
    out.style = target_style;
    out.waypoints.assign(traj.waypoints.begin(),
                         traj.waypoints.begin() + static_cast<long>(contact_start));

    // Planes remaining in the suffix: contact-phase waypoints grouped by
    // their cut-axis coordinate, falling back to the hand-off waypoint.
    std::vector<double> planes;
    for (size_t i = contact_start; i < traj.waypoints.size(); ++i) {
        if (traj.waypoints[i].phase != TrajPhase::Contact) continue;
        const double c = traj.waypoints[i].pose.translation[frame.cut_axis];
        if (planes.empty() || std::abs(planes.back() - c) > 1e-12) planes.push_back(c);
    }
    if (planes.empty()) {
        planes.push_back(traj.waypoints[contact_start].pose.translation[frame.cut_axis]);
    }

    double speed = traj.waypoints[contact_start].v_cmd;
    if (speed <= 0.0) {
        for (size_t i = 0; i < traj.waypoints.size(); ++i) {
            speed = std::max(speed, traj.waypoints[i].v_cmd);
        }
    }
    const double start_y = traj.waypoints.empty()
                               ? frame.object_aabb.max.y() + 0.03
                               : traj.waypoints.front().pose.translation.y();

    Builder b;
    b.traj.style = target_style;
    if (contact_start > 0) {
        const Waypoint& pivot = traj.waypoints[contact_start - 1];
        b.t = pivot.t;
        b.last_pos = pivot.pose.translation;
        b.has_last = true;
    }
    bool first = true;
    for (double plane : planes) {
        if (!first) {
            append_approach(b, target_style, frame, style, plane, speed, start_y);
        } else if (contact_start == 0) {
            append_approach(b, target_style, frame, style, plane, speed, start_y);
        }
        append_contact_and_retract(b, target_style, frame, style, plane, speed, start_y);
        first = false;
    }
    if (contact_start > 0) {
        // Builder seeded from the pivot; drop nothing, splice its output.
        out.waypoints.insert(out.waypoints.end(), b.traj.waypoints.begin(),
                             b.traj.waypoints.end());
        // Commanded speed of the hand-off waypoint now points at the new suffix.
        if (contact_start >= 1 && !b.traj.waypoints.empty()) {
            out.waypoints[contact_start - 1].v_cmd = speed;
        }
    } else {
        out.waypoints = std::move(b.traj.waypoints);
    }
    return out;
}

std::optional<size_t> detect_contact_phase(const Trajectory& traj, const SdfShape& blade_proto,
                                           std::span<const Vec3> object_samples) {
    SdfShape blade = blade_proto;
    for (size_t i = 0; i < traj.waypoints.size(); ++i) {
        blade.pose = traj.waypoints[i].pose;
        const Aabb box = blade.world_aabb(0.0, 1.0);
        for (const Vec3& s : object_samples) {
            if (!box.contains(s)) continue;
            if (sdf_sample(blade, s).phi < 0.0) {
                return i;
            }
        }
    }
    return std::nullopt;
}

SuccessVerdict evaluate_success(const std::vector<double>& achieved_planes,
                                const std::vector<double>& target_planes, double object_len,
                                const Vec3& blade_normal, const Vec3& target_normal,
                                double tol_frac) {
    if (!(object_len > 0.0)) {
        throw PlanningError("degenerate object length");
    }
    SuccessVerdict v;
    if (achieved_planes.size() != target_planes.size()) {
        v.success = false;
        v.reason = "count mismatch: achieved " + std::to_string(achieved_planes.size()) +
                   " vs target " + std::to_string(target_planes.size());
        return v;
    }
    std::vector<double> a = achieved_planes;
    std::vector<double> t = target_planes;
    std::sort(a.begin(), a.end());
    std::sort(t.begin(), t.end());

    const double pos_tol = tol_frac * object_len;
    bool ok = true;
    for (size_t i = 0; i < a.size(); ++i) {
        const double err = std::abs(a[i] - t[i]);
        v.plane_errors.push_back(err);
        if (err > pos_tol) ok = false;
    }
    const double cosang =
        std::abs(blade_normal.normalized().dot(target_normal.normalized()));
    v.angular_error = std::acos(std::clamp(cosang, 0.0, 1.0));
    if (v.angular_error > tol_frac * (M_PI / 2.0)) ok = false;

    v.success = ok;
    if (!ok) v.reason = "tolerance exceeded";
    return v;
}

std::pair<SceneSpec, CutTask> augment(const CutTask& base_task, const AugmentRanges& ranges,
                                      uint64_t seed) {
    const auto check = [](double lo, double hi, const char* name) {
        if (lo > hi) throw PlanningError(std::string("range ") + name + " has min > max");
    };
    for (int a = 0; a < 3; ++a) check(ranges.position_min[a], ranges.position_max[a], "position");
    check(ranges.scale_min, ranges.scale_max, "scale");
    check(ranges.rotation_min, ranges.rotation_max, "rotation");
    check(ranges.height_min, ranges.height_max, "height");
    check(ranges.speed_min, ranges.speed_max, "speed");
    check(ranges.saw_freq_min, ranges.saw_freq_max, "saw_frequency");

    Rng rng(seed);
    SceneSpec scene;
    scene.seed = seed;
    for (int a = 0; a < 3; ++a) {
        scene.object_position[a] = rng.uniform(ranges.position_min[a], ranges.position_max[a]);
    }
    scene.object_scale = rng.uniform(ranges.scale_min, ranges.scale_max);
    scene.object_rotation = rng.uniform(ranges.rotation_min, ranges.rotation_max);
    scene.object_kind = ranges.object_pool.empty()
                            ? base_task.object_kind
                            : ranges.object_pool[rng.below(ranges.object_pool.size())];
    CutTask task = base_task;
    task.object_kind = scene.object_kind;
    task.cut_height = rng.uniform(ranges.height_min, ranges.height_max);
    task.approach_speed = rng.uniform(ranges.speed_min, ranges.speed_max);
    scene.style.saw_frequency = rng.uniform(ranges.saw_freq_min, ranges.saw_freq_max);

    const Aabb box = object_aabb_for_scene(scene);
    const double m = ranges.workspace_margin - 1e-12;
    const double s = ranges.workspace_size;
    if ((box.min.array() < m).any() || (box.max.array() > s - m).any()) {
        throw PlanningError("sampled object does not fit the workspace (seed " +
                            std::to_string(seed) + ")");
    }
    return {scene, task};
}

}  // namespace cutsim
