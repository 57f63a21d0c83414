#include "cutsim/experiments.hpp"

#include <algorithm>
#include <set>

#include "cutsim/errors.hpp"
#include "cutsim/instructions.hpp"

namespace cutsim {

std::vector<SweepRow> sweep_youngs(const std::vector<double>& E_values,
                                   const EpisodeSetup& base) {
    if (E_values.size() < 2) {
        throw ConfigError("sweep needs at least two Young's modulus values");
    }
    std::vector<SweepRow> rows;
    for (double E : E_values) {
        EpisodeSetup setup = base;
        setup.materials[setup.scene.material].E = E;
        SweepRow row;
        row.E = E;
        const EpisodeRecord rec = run_episode(setup);
        row.diverged = rec.diverged;
        if (!rec.diverged) {
            row.F_peak = rec.peak_force;
            row.v_post = rec.v_post;
            row.t_peak_index = rec.t_peak_index;
            row.t_vmin_index = rec.t_vmin_index;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
    CsvWriter w(path, {"E", "F_peak", "v_post", "t_peak_index", "t_vmin_index", "diverged"});
    for (const SweepRow& r : rows) {
        w.row_mixed({format_double(r.E), format_double(r.F_peak), format_double(r.v_post),
                     std::to_string(r.t_peak_index), std::to_string(r.t_vmin_index),
                     r.diverged ? "true" : "false"});
    }
    w.flush();
}

std::vector<SafetySample> collect_samples(const std::vector<double>& velocity_grid,
                                          const std::vector<Material>& materials,
                                          const EpisodeSetup& base) {
    if (velocity_grid.empty()) {
        throw ConfigError("empty velocity grid");
    }
    if (materials.empty()) {
        throw ConfigError("empty material set");
    }
    std::vector<SafetySample> samples;
    for (const Material& m : materials) {
        for (double v : velocity_grid) {
            EpisodeSetup setup = base;
            setup.materials[setup.scene.material] = m;
            setup.task.style = CutStyle::Normal;
            setup.task.state = MiddleState{};
            setup.task.approach_speed = v;
            SafetySample s;
            s.v = v;
            s.E = m.E;
            s.sigma_y = m.sigma_y;
            const EpisodeRecord rec = run_episode(setup);
            if (rec.diverged) {
                s.valid = false;
            } else {
                s.F = rec.peak_force;
            }
            samples.push_back(s);
        }
    }
    return samples;
}

void write_samples_csv(const std::vector<SafetySample>& samples,
                       const std::filesystem::path& path) {
    CsvWriter w(path, {"v", "E", "sigma_y", "F", "valid"});
    for (const SafetySample& s : samples) {
        w.row_mixed({format_double(s.v), format_double(s.E), format_double(s.sigma_y),
                     format_double(s.F), s.valid ? "true" : "false"});
    }
    w.flush();
}

void write_model_csv(const ForceModel& model, const std::filesystem::path& path) {
    CsvWriter w(path, {"term", "coefficient"});
    const char* quad_names[] = {"1", "v", "v2", "E", "sigma_y", "vE"};
    const char* lin_names[] = {"1", "v", "E", "sigma_y"};
    for (size_t i = 0; i < model.coeffs.size(); ++i) {
        const char* name = model.model_class == ForceModelClass::Quadratic
                               ? quad_names[i]
                               : lin_names[i];
        w.row_mixed({name, format_double(model.coeffs[i])});
    }
    w.row_mixed({"samples", std::to_string(model.sample_count)});
    w.row_mixed({"residual_norm", format_double(model.residual_norm)});
    w.row_mixed({"residual_max", format_double(model.residual_max)});
    w.row_mixed({"residual_band", format_double(model.residual_band)});
    w.flush();
}

AblationResult safety_ablation(const EpisodeSetup& base, double F_max,
                               const std::vector<double>& sample_velocities,
                               const std::vector<double>& aggressive_speeds,
                               ForceModelClass model_class) {
    AblationResult out;
    const Material& mat = base.materials[base.scene.material];

    // Three materials with non-proportional (E, sigma_y) keep the constant
    // features {1, E, sigma_y} full rank.
    Material stiffer = mat;
    stiffer.E = mat.E * 1.5;
    stiffer.sigma_y = mat.sigma_y * 1.2;
    Material softer = mat;
    softer.E = mat.E * 0.75;
    softer.sigma_y = mat.sigma_y * 1.6;
    const std::vector<SafetySample> samples =
        collect_samples(sample_velocities, {mat, stiffer, softer}, base);
    out.model = fit_model(samples, model_class);

    double v_lo = sample_velocities.front(), v_hi = sample_velocities.front();
    for (double v : sample_velocities) {
        v_lo = std::min(v_lo, v);
        v_hi = std::max(v_hi, v);
    }
    out.budget = std::max(F_max - out.model.residual_max, 0.5 * F_max);
    out.v_safe = safe_velocity(out.model, mat.E, mat.sigma_y, out.budget, v_lo, v_hi);

    double off_speed_sum = 0.0, on_speed_sum = 0.0;
    for (double v_cmd : aggressive_speeds) {
        EpisodeSetup off = base;
        off.task.approach_speed = v_cmd;
        off.use_safety = false;
        const EpisodeRecord rec_off = run_episode(off);
        off_speed_sum += rec_off.max_speed;
        out.off_peak_force = std::max(out.off_peak_force, rec_off.peak_force);

        EpisodeSetup on = off;
        on.use_safety = true;
        on.v_safe = out.v_safe;
        const EpisodeRecord rec_on = run_episode(on);
        on_speed_sum += rec_on.max_speed;
        out.on_peak_force = std::max(out.on_peak_force, rec_on.peak_force);
    }
    out.off_avg_max_speed = off_speed_sum / aggressive_speeds.size();
    out.on_avg_max_speed = on_speed_sum / aggressive_speeds.size();
    return out;
}

void write_ablation_csv(const AblationResult& r, const std::filesystem::path& path) {
    CsvWriter w(path, {"safety_module", "avg_max_speed", "peak_force"});
    w.row_mixed({"off", format_double(r.off_avg_max_speed), format_double(r.off_peak_force)});
    w.row_mixed({"on", format_double(r.on_avg_max_speed), format_double(r.on_peak_force)});
    w.row_mixed({"v_safe", format_double(r.v_safe), format_double(r.budget)});
    w.flush();
}

std::vector<ManifestEntry> gen_dataset(const std::vector<CutTask>& tasks, int count,
                                       const std::filesystem::path& out_dir,
                                       const EpisodeSetup& base, const AugmentRanges& ranges) {
    std::filesystem::create_directories(out_dir);
    std::vector<ManifestEntry> manifest;
    std::set<uint64_t> seen_seeds;
    Rng seeder(base.sim.seed ^ 0xda7a5e7ULL);

    for (size_t ti = 0; ti < tasks.size(); ++ti) {
        const CutTask& task = tasks[ti];
        const std::string task_id =
            std::string(to_string(task.style)) + "_" + std::to_string(ti);
        for (int c = 0; c < count; ++c) {
            const uint64_t seed = seeder.next_u64();
            if (!seen_seeds.insert(seed).second) {
                throw ConfigError("duplicate episode seed " + std::to_string(seed));
            }
            auto [scene, aug_task] = augment(task, ranges, seed);

            EpisodeSetup setup = base;
            setup.scene = scene;
            setup.scene.material = base.scene.material;
            setup.task = aug_task;

            CutSpec spec;
            spec.object = aug_task.object_kind;
            spec.style = aug_task.style;
            spec.state = aug_task.state;
            Rng lang_rng(seed ^ 0x1a46ULL);
            setup.instruction = generate_instruction(resolve_defaults(spec), lang_rng);

            const EpisodeRecord rec = run_episode(setup);
            const std::string dir_name =
                task_id + "_ep" + std::to_string(c) + "_seed" + std::to_string(seed);
            write_episode(rec, out_dir / dir_name);

            ManifestEntry e;
            e.task_id = task_id;
            e.dir = dir_name;
            e.seed = seed;
            e.success = rec.verdict.success;
            e.diverged = rec.diverged;
            e.peak_force = rec.peak_force;
            e.final_segments = rec.final_segment_count;
            manifest.push_back(e);
        }
    }

    CsvWriter w(out_dir / "manifest.csv",
                {"task", "dir", "seed", "success", "diverged", "peak_force", "segments"});
    for (const ManifestEntry& e : manifest) {
        w.row_mixed({e.task_id, e.dir, std::to_string(e.seed), e.success ? "true" : "false",
                     e.diverged ? "true" : "false", format_double(e.peak_force),
                     std::to_string(e.final_segments)});
    }
    w.flush();
    return manifest;
}

}  // namespace cutsim
