#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cutsim/contact.hpp"
#include "cutsim/cutting.hpp"
#include "cutsim/planner.hpp"
#include "cutsim/textio.hpp"
#include "cutsim/types.hpp"

namespace cutsim {

// Interpolates the planned trajectory; progress advances at u * dt so the
// speed-resistance model slows the blade along its path rather than warping
// the path itself.
class TrajectoryExecutor {
public:
    explicit TrajectoryExecutor(const Trajectory& traj);

    bool done() const;
    TrajPhase phase() const;
    void advance(double dtau);
    // Poses the knife at the current progress point; velocities scaled by u.
    void apply_to(KnifeTool& knife, double u) const;

private:
    const Trajectory* traj_;
    double tau_ = 0.0;
    size_t seg_ = 0;
};

struct EpisodeSetup {
    SimConfig sim;
    std::vector<Material> materials;
    Material k2_reference;  // datum for the k2 material scaling
    SceneSpec scene;
    CutTask task;
    ContactParams contact;

    double blade_length = 0.12;
    double blade_height = 0.05;
    double blade_spine = 0.01;
    double blade_half_angle = 10.0 * M_PI / 180.0;
    double board_top = 0.05;

    double particle_spacing = 0.0;  // 0 = dx/2
    double link_radius = 0.0;       // 0 = 1.6 * spacing
    double damage_cut = 0.5;
    int seg_every_windows = 10;

    bool use_safety = false;
    double v_safe = 0.0;  // applied when use_safety is set

    std::string instruction;
    bool keep_final_particles = false;  // retain the end-state cloud in the record

    EpisodeSetup();
};

struct EpisodeRecord {
    KeyValueMap config_snapshot;

    std::vector<ForceRecord> knife_force;  // per window
    std::vector<ForceRecord> board_force;  // per window

    struct KnifeSample {
        double t, speed, u, c_hat;
    };
    std::vector<KnifeSample> knife_series;  // per step

    struct JStat {
        double t, j_min, j_max;
        int clamps;
    };
    std::vector<JStat> j_stats;  // per window

    struct SegSample {
        double t;
        int count;
    };
    std::vector<SegSample> segments;

    Trajectory trajectory;
    SuccessVerdict verdict;
    std::string instruction;
    uint64_t seed = 0;

    bool diverged = false;
    std::string failure;

    // Summary statistics.
    double peak_force = 0.0;            // max |F_avg| over knife windows (N)
    int t_peak_index = -1;              // window index of the peak
    double v_post = 0.0;                // min knife speed after first contact (m/s)
    int t_vmin_index = -1;              // step index of that minimum
    double max_speed = 0.0;             // max knife speed over the episode
    int first_contact_step = -1;
    int final_segment_count = 0;
    std::vector<int> final_segment_sizes;  // particles per segment label
    std::vector<double> target_planes;
    std::vector<double> achieved_planes;

    // Momentum-change audit terms, summed in window order over both tools.
    Vec3 total_impulse{Vec3::Zero()};
    Vec3 total_favg_dtacc{Vec3::Zero()};

    // Populated only when the setup asks for it (visualization/debugging).
    std::vector<Particle> final_particles;
};

// Full pipeline: sample particles, plan, (optionally) clamp, simulate with
// damage-gated cutting, segment, evaluate. Divergence is reported in the
// record rather than thrown.
EpisodeRecord run_episode(const EpisodeSetup& setup);

// Structured-text serialization of a complete, replayable setup snapshot.
KeyValueMap setup_to_key_values(const EpisodeSetup& setup);
EpisodeSetup setup_from_key_values(const KeyValueMap& kv);

// One directory per episode: meta.cfg, force.csv, board_force.csv,
// knife.csv, jstats.csv, segments.csv, trajectory.csv, verdict.csv,
// instruction.txt.
void write_episode(const EpisodeRecord& record, const std::filesystem::path& dir);

}  // namespace cutsim
