#pragma once

#include <filesystem>
#include <vector>

#include "cutsim/episode.hpp"
#include "cutsim/safety.hpp"

namespace cutsim {

struct SweepRow {
    double E = 0.0;
    double F_peak = 0.0;
    double v_post = 0.0;
    int t_peak_index = -1;
    int t_vmin_index = -1;
    bool diverged = false;
};

// Young's-modulus sweep over a fixed scene/seed; one Normal/Middle episode
// per E value. Diverged rows are flagged and the sweep continues.
std::vector<SweepRow> sweep_youngs(const std::vector<double>& E_values,
                                   const EpisodeSetup& base);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

// One (v, material) sample per grid point; F is the episode's peak force.
// Diverged episodes are flagged invalid and excluded from fitting.
std::vector<SafetySample> collect_samples(const std::vector<double>& velocity_grid,
                                          const std::vector<Material>& materials,
                                          const EpisodeSetup& base);
void write_samples_csv(const std::vector<SafetySample>& samples,
                       const std::filesystem::path& path);
void write_model_csv(const ForceModel& model, const std::filesystem::path& path);

struct AblationResult {
    double off_avg_max_speed = 0.0;
    double off_peak_force = 0.0;
    double on_avg_max_speed = 0.0;
    double on_peak_force = 0.0;
    double v_safe = 0.0;
    double budget = 0.0;  // F_max minus the model's residual margin
    ForceModel model;
};

// Paired aggressive runs with the limiter off/on. The clamping threshold is
// solved against F_max reduced by the fitted model's max residual so the
// re-simulated peak stays under F_max.
AblationResult safety_ablation(const EpisodeSetup& base, double F_max,
                               const std::vector<double>& sample_velocities,
                               const std::vector<double>& aggressive_speeds,
                               ForceModelClass model_class = ForceModelClass::Quadratic);
void write_ablation_csv(const AblationResult& result, const std::filesystem::path& path);

struct ManifestEntry {
    std::string task_id;
    std::string dir;
    uint64_t seed = 0;
    bool success = false;
    bool diverged = false;
    double peak_force = 0.0;
    int final_segments = 0;
};

// `count` augmented episodes per task, one directory each, plus paired
// instructions and a manifest. Seeds are derived from base.sim.seed and must
// be distinct.
std::vector<ManifestEntry> gen_dataset(const std::vector<CutTask>& tasks, int count,
                                       const std::filesystem::path& out_dir,
                                       const EpisodeSetup& base, const AugmentRanges& ranges);

}  // namespace cutsim
