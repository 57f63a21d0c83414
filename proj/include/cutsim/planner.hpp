#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cutsim/math_types.hpp"
#include "cutsim/rng.hpp"
#include "cutsim/sdf.hpp"

namespace cutsim {

enum class CutStyle { Normal, Bias, Guillotine, Saw };
enum class CutSide { Left, Right };
enum class ObjectKind { Orange, Strawberry, Melon, Cucumber, Banana, Apple, Peach };

const char* to_string(CutStyle s);
const char* to_string(ObjectKind k);
std::optional<CutStyle> style_from_string(const std::string& s);
std::optional<ObjectKind> object_from_string(const std::string& s);

// Continuous cut state: a fractional position from one side, the midpoint,
// or a k-way equal split.
struct RatioState {
    double r = 0.5;  // strictly inside (0,1)
    CutSide side = CutSide::Left;
};
struct MiddleState {};
struct SplitState {
    int k = 3;  // >= 2 pieces
};
using CutState = std::variant<RatioState, MiddleState, SplitState>;

struct CutTask {
    CutStyle style = CutStyle::Normal;
    CutState state = MiddleState{};
    ObjectKind object_kind = ObjectKind::Cucumber;
    double cut_height = 0.03;     // knife start height above the object top (m)
    double approach_speed = 0.5;  // commanded speed (m/s)
};

// Style shape parameters, sampled once per episode so planning is pure.
struct StyleParams {
    double bias_angle = 30.0 * M_PI / 180.0;
    double saw_amplitude = 0.01;       // m
    double saw_frequency = 4.0;        // Hz
    double guillotine_tilt = 15.0 * M_PI / 180.0;
};

struct SceneSpec {
    Vec3 object_position{0.25, 0.05, 0.25};  // base-center position on the board (m)
    double object_scale = 1.0;
    double object_rotation = 0.0;  // about vertical (rad)
    ObjectKind object_kind = ObjectKind::Cucumber;
    int material = 0;
    uint64_t seed = 0;
    StyleParams style;
};

enum class TrajPhase { Approach, Contact, Retract };
const char* to_string(TrajPhase p);

struct Waypoint {
    double t = 0.0;
    RigidTransform pose;
    double v_cmd = 0.0;  // commanded speed into the *next* waypoint (m/s)
    TrajPhase phase = TrajPhase::Approach;
};

struct Trajectory {
    CutStyle style = CutStyle::Normal;
    std::vector<Waypoint> waypoints;
};

// Geometry the trajectory generators operate against.
struct CutFrame {
    int cut_axis = 0;       // world axis index of the cut normal
    int lateral_axis = 2;   // horizontal in-plane axis
    Aabb object_aabb;
    double board_top = 0.05;       // m
    double bottom_margin = 0.002;  // final edge height above the board (m)
    double contact_margin = 0.005; // approach hand-off height above the object (m)
    double blade_length = 0.12;    // m, for Guillotine pivot placement
};

// Componentwise min/max over a nonempty point set. Throws PlanningError when
// empty.
Aabb compute_aabb(std::span<const Vec3> points);

// Plane offsets along cut_axis. Middle -> midpoint; Ratio(r,left) ->
// min + r L; Ratio(r,right) -> max - r L; Split(k) -> k-1 equal planes
// ascending. Throws PlanningError on a degenerate extent.
std::vector<double> cut_planes(const Aabb& aabb, const CutState& state, int cut_axis);

// Full approach/contact/retract trajectory over all planes.
Trajectory generate_trajectory(const CutTask& task, const std::vector<double>& planes,
                               const CutFrame& frame, const StyleParams& style);

// Replaces everything from contact_start onward with the target style's
// contact generator fitted to the same plane and depth. Source must be
// Normal. Target Normal is the identity.
Trajectory style_transfer(const Trajectory& traj, CutStyle target_style, size_t contact_start,
                          const CutFrame& frame, const StyleParams& style);

// First waypoint index at which the blade overlaps the sampled object
// region; nullopt when the path never touches it.
std::optional<size_t> detect_contact_phase(const Trajectory& traj, const SdfShape& blade_proto,
                                           std::span<const Vec3> object_samples);

struct SuccessVerdict {
    bool success = false;
    std::string reason;
    std::vector<double> plane_errors;  // |achieved - target| per plane (m)
    double angular_error = 0.0;        // rad
};

// Positional tolerance tol_frac * L per plane and angular tolerance
// tol_frac * (pi/2) between blade and target plane normals.
SuccessVerdict evaluate_success(const std::vector<double>& achieved_planes,
                                const std::vector<double>& target_planes, double object_len,
                                const Vec3& blade_normal, const Vec3& target_normal,
                                double tol_frac = 0.1);

struct AugmentRanges {
    Vec3 position_min{0.22, 0.05, 0.22};
    Vec3 position_max{0.28, 0.05, 0.28};
    double scale_min = 0.9, scale_max = 1.1;
    double rotation_min = 0.0, rotation_max = 0.0;
    double height_min = 0.02, height_max = 0.04;
    double speed_min = 0.4, speed_max = 0.7;
    double saw_freq_min = 2.0, saw_freq_max = 6.0;
    std::vector<ObjectKind> object_pool;  // empty = keep the base task's kind
    double workspace_size = 0.5;
    double workspace_margin = 0.05;
};

// Deterministic scene + task sample for a given seed. Throws PlanningError
// when the sampled object cannot fit the workspace.
std::pair<SceneSpec, CutTask> augment(const CutTask& base_task, const AugmentRanges& ranges,
                                      uint64_t seed);

// Extent-based object AABB for a scene (analytic primitive dimensions).
Aabb object_aabb_for_scene(const SceneSpec& scene);

// Longest horizontal AABB axis (x vs z; ties pick x).
int pick_cut_axis(const Aabb& aabb);

}  // namespace cutsim
