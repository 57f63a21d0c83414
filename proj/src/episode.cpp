#include "cutsim/episode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "cutsim/constitutive.hpp"
#include "cutsim/engine.hpp"
#include "cutsim/errors.hpp"
#include "cutsim/safety.hpp"
#include "cutsim/scene.hpp"

namespace cutsim {

TrajectoryExecutor::TrajectoryExecutor(const Trajectory& traj) : traj_(&traj) {
    if (traj.waypoints.empty()) {
        throw PlanningError("cannot execute an empty trajectory");
    }
    tau_ = traj.waypoints.front().t;
}

bool TrajectoryExecutor::done() const {
    return tau_ >= traj_->waypoints.back().t || traj_->waypoints.size() < 2;
}

TrajPhase TrajectoryExecutor::phase() const {
    return traj_->waypoints[std::min(seg_, traj_->waypoints.size() - 1)].phase;
}

void TrajectoryExecutor::advance(double dtau) {
    tau_ += dtau;
    while (seg_ + 2 < traj_->waypoints.size() && tau_ >= traj_->waypoints[seg_ + 1].t) {
        ++seg_;
    }
}

void TrajectoryExecutor::apply_to(KnifeTool& knife, double u) const {
    const auto& wps = traj_->waypoints;
    if (done()) {
        knife.shape.pose = wps.back().pose;
        knife.linear_velocity.setZero();
        knife.angular_velocity.setZero();
        knife.u = u;
        knife.s0 = 0.0;
        return;
    }
    const Waypoint& a = wps[seg_];
    const Waypoint& b = wps[seg_ + 1];
    const double seg_dt = std::max(b.t - a.t, 1e-12);
    const double alpha = std::clamp((tau_ - a.t) / seg_dt, 0.0, 1.0);

    knife.shape.pose.translation =
        (1.0 - alpha) * a.pose.translation + alpha * b.pose.translation;
    knife.shape.pose.rotation = a.pose.rotation.slerp(alpha, b.pose.rotation);

    const Vec3 lin = (b.pose.translation - a.pose.translation) / seg_dt;
    const Quat rel = b.pose.rotation * a.pose.rotation.conjugate();
    const Eigen::AngleAxisd aa(rel);
    const Vec3 ang = aa.axis() * (aa.angle() / seg_dt);

    knife.linear_velocity = u * lin;
    knife.angular_velocity = u * ang;
    knife.stroke_dir = lin.norm() > 1e-12 ? Vec3(lin.normalized()) : Vec3(0.0, -1.0, 0.0);
    knife.u = u;
    knife.s0 = a.v_cmd;
}

EpisodeSetup::EpisodeSetup() {
    Material food;
    food.rho = 1000.0;
    food.E = 2.0e5;
    food.nu = 0.3;
    food.sigma_y = 2.0e4;
    food.k2_ref = 40.0;
    materials = {food};
    k2_reference = food;
}

namespace {

SdfShape make_blade(const EpisodeSetup& setup) {
    return SdfShape::wedge_blade(RigidTransform{}, setup.blade_length, setup.blade_height,
                                 setup.blade_spine, setup.blade_half_angle);
}

double spacing_of(const EpisodeSetup& setup) {
    return setup.particle_spacing > 0.0 ? setup.particle_spacing : 0.5 * setup.sim.dx();
}

// Achieved planes from the final segmentation: midpoints between adjacent
// segments' connector-particle extents along the cut axis.
std::vector<double> achieved_planes_from_segments(const std::vector<Particle>& particles,
                                                  const std::vector<int>& labels,
                                                  int segment_count, int axis,
                                                  double damage_cut) {
    struct Extent {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        double centroid = 0.0;
        int n = 0;
    };
    std::vector<Extent> ext(segment_count);
    for (size_t i = 0; i < particles.size(); ++i) {
        if (particles[i].D >= damage_cut) continue;
        const int lab = labels[i];
        if (lab < 0 || lab >= segment_count) continue;
        const double c = particles[i].x[axis];
        ext[lab].lo = std::min(ext[lab].lo, c);
        ext[lab].hi = std::max(ext[lab].hi, c);
        ext[lab].centroid += c;
        ++ext[lab].n;
    }
    std::vector<Extent> used;
    for (const Extent& e : ext) {
        if (e.n > 0) used.push_back(e);
    }
    std::sort(used.begin(), used.end(),
              [](const Extent& a, const Extent& b) { return a.centroid / a.n < b.centroid / b.n; });
    std::vector<double> planes;
    for (size_t i = 0; i + 1 < used.size(); ++i) {
        planes.push_back(0.5 * (used[i].hi + used[i + 1].lo));
    }
    return planes;
}

}  // namespace

EpisodeRecord run_episode(const EpisodeSetup& setup) {
    EpisodeRecord rec;
    rec.seed = setup.scene.seed;
    rec.instruction = setup.instruction;
    rec.config_snapshot = setup_to_key_values(setup);

    const double spacing = spacing_of(setup);
    const double link_radius = setup.link_radius > 0.0 ? setup.link_radius : 1.6 * spacing;

    std::vector<Particle> seeds = sample_object_particles(
        setup.scene, spacing, setup.scene.material, setup.materials[setup.scene.material]);
    if (seeds.empty()) {
        rec.diverged = true;
        rec.failure = "object sampling produced no particles";
        return rec;
    }

    std::vector<Vec3> positions;
    positions.reserve(seeds.size());
    for (const Particle& p : seeds) positions.push_back(p.x);
    const Aabb aabb = compute_aabb(positions);

    CutFrame frame;
    frame.cut_axis = pick_cut_axis(aabb);
    frame.lateral_axis = frame.cut_axis == 0 ? 2 : 0;
    frame.object_aabb = aabb;
    frame.board_top = setup.board_top;
    frame.blade_length = setup.blade_length;

    rec.target_planes = cut_planes(aabb, setup.task.state, frame.cut_axis);
    Trajectory traj =
        generate_trajectory(setup.task, rec.target_planes, frame, setup.scene.style);
    if (setup.use_safety && setup.v_safe > 0.0) {
        traj = clamp_trajectory(traj, setup.v_safe);
    }
    rec.trajectory = traj;

    Engine engine(setup.sim, setup.materials);
    engine.particles() = std::move(seeds);
    engine.contact_params = setup.contact;

    const SdfShape board = SdfShape::halfspace(Vec3::UnitY(), setup.board_top);
    engine.set_board(&board);

    KnifeTool knife;
    knife.shape = make_blade(setup);
    knife.k2 = k2_scale(setup.materials[setup.scene.material], setup.k2_reference,
                        setup.sim.k2_exp_a, setup.sim.k2_exp_b);
    engine.set_knife(&knife);

    TrajectoryExecutor exec(traj);
    const double dt = setup.sim.dt;
    const int window_steps = static_cast<int>(std::round(setup.sim.dt_acc / dt));
    const int max_steps = static_cast<int>(std::ceil(setup.sim.max_episode_time / dt));

    double u = 1.0;
    TrajPhase prev_phase = exec.phase();
    Vec3 knife_window_impulse = Vec3::Zero();
    Vec3 board_window_impulse = Vec3::Zero();
    double window_jmin = std::numeric_limits<double>::infinity();
    double window_jmax = -std::numeric_limits<double>::infinity();
    int window_clamps = 0;
    int step_in_window = 0;
    int window_count = 0;
    std::vector<int> seg_labels(engine.particles().size(), 0);

    Vec3 blade_normal_sum = Vec3::Zero();
    Vec3 cut_normal = Vec3::Zero();
    cut_normal[frame.cut_axis] = 1.0;

    try {
        for (int step = 0; step < max_steps; ++step) {
            const TrajPhase phase = exec.phase();
            // The commanded speed re-establishes whenever the blade leaves
            // the cutting stroke (fresh approach or pull-out).
            if (phase != TrajPhase::Contact && prev_phase == TrajPhase::Contact) {
                u = 1.0;
            }
            if (phase == TrajPhase::Approach && prev_phase != TrajPhase::Approach) {
                u = 1.0;
            }
            prev_phase = phase;

            exec.apply_to(knife, u);
            engine.step();
            const StepDiagnostics& diag = engine.diagnostics();

            u = speed_resistance(u, diag.c_hat, knife.k2, dt);
            exec.advance(u * dt);

            const double speed = knife.speed();
            rec.knife_series.push_back({engine.time(), speed, u, diag.c_hat});
            rec.max_speed = std::max(rec.max_speed, speed);
            const bool contact_now =
                diag.c_hat > 0.0 || diag.knife_impulse.squaredNorm() > 0.0;
            if (contact_now && rec.first_contact_step < 0) {
                rec.first_contact_step = step;
            }
            if (contact_now) {
                Vec3 n = knife.shape.pose.rotate(Vec3::UnitX());
                if (n.dot(cut_normal) < 0.0) n = -n;
                blade_normal_sum += n;
            }

            knife_window_impulse += diag.knife_impulse;
            board_window_impulse += diag.board_impulse;
            window_jmin = std::min(window_jmin, diag.j_min);
            window_jmax = std::max(window_jmax, diag.j_max);
            window_clamps += diag.clamp_count;

            if (++step_in_window == window_steps) {
                const double t = engine.time();
                rec.knife_force.push_back(
                    accumulate_force(knife_window_impulse, setup.sim.dt_acc, t));
                rec.board_force.push_back(
                    accumulate_force(board_window_impulse, setup.sim.dt_acc, t));
                rec.j_stats.push_back({t, window_jmin, window_jmax, window_clamps});
                knife_window_impulse.setZero();
                board_window_impulse.setZero();
                window_jmin = std::numeric_limits<double>::infinity();
                window_jmax = -std::numeric_limits<double>::infinity();
                window_clamps = 0;
                step_in_window = 0;
                ++window_count;
                if (setup.sim.approach_window_accum) {
                    engine.reset_approach_accumulator();
                }

                if (window_count % setup.seg_every_windows == 0) {
                    const SegmentationResult sr = segment_connectivity(
                        engine.particles(), link_radius, setup.damage_cut, &seg_labels);
                    seg_labels = sr.labels;
                    for (size_t i = 0; i < seg_labels.size(); ++i) {
                        engine.particles()[i].seg = seg_labels[i];
                    }
                    rec.segments.push_back({t, sr.segment_count});
                }
                // Stop on whole-window boundaries so the audit covers every
                // contact impulse of the episode.
                if (exec.done()) break;
            }
        }
    } catch (const std::exception& e) {
        rec.diverged = true;
        rec.failure = e.what();
        return rec;
    }

    // Final segmentation and verdict.
    const SegmentationResult sr = segment_connectivity(engine.particles(), link_radius,
                                                       setup.damage_cut, &seg_labels);
    seg_labels = sr.labels;
    rec.final_segment_count = sr.segment_count;
    rec.final_segment_sizes.assign(sr.segment_count, 0);
    for (size_t i = 0; i < sr.labels.size(); ++i) {
        if (sr.labels[i] >= 0 && sr.labels[i] < sr.segment_count) {
            ++rec.final_segment_sizes[sr.labels[i]];
        }
    }
    rec.segments.push_back({engine.time(), sr.segment_count});
    rec.achieved_planes = achieved_planes_from_segments(
        engine.particles(), sr.labels, sr.segment_count, frame.cut_axis, setup.damage_cut);

    const double L = aabb.extent()[frame.cut_axis];
    const Vec3 blade_normal =
        blade_normal_sum.norm() > 0.0 ? Vec3(blade_normal_sum.normalized()) : cut_normal;
    rec.verdict = evaluate_success(rec.achieved_planes, rec.target_planes, L, blade_normal,
                                   cut_normal);

    for (size_t w = 0; w < rec.knife_force.size(); ++w) {
        rec.total_impulse += rec.knife_force[w].window_impulse;
        rec.total_impulse += rec.board_force[w].window_impulse;
        rec.total_favg_dtacc += rec.knife_force[w].F_avg * setup.sim.dt_acc;
        rec.total_favg_dtacc += rec.board_force[w].F_avg * setup.sim.dt_acc;
        if (rec.knife_force[w].magnitude > rec.peak_force) {
            rec.peak_force = rec.knife_force[w].magnitude;
            rec.t_peak_index = static_cast<int>(w);
        }
    }
    if (setup.keep_final_particles) {
        rec.final_particles = engine.particles();
    }
    if (rec.first_contact_step >= 0) {
        // Minimum commanded-motion speed after first contact; the parked
        // blade at the end of the trajectory does not count.
        rec.v_post = std::numeric_limits<double>::infinity();
        for (size_t i = rec.first_contact_step; i < rec.knife_series.size(); ++i) {
            if (rec.knife_series[i].speed <= 0.0) continue;
            if (rec.knife_series[i].speed < rec.v_post) {
                rec.v_post = rec.knife_series[i].speed;
                rec.t_vmin_index = static_cast<int>(i);
            }
        }
        if (!std::isfinite(rec.v_post)) rec.v_post = 0.0;
    }
    return rec;
}

namespace {

std::string state_to_string(const CutState& state) {
    if (std::holds_alternative<MiddleState>(state)) return "middle";
    if (const auto* r = std::get_if<RatioState>(&state)) {
        return "ratio:" + format_double(r->r) + ":" +
               (r->side == CutSide::Left ? "left" : "right");
    }
    return "split:" + std::to_string(std::get<SplitState>(state).k);
}

CutState state_from_string(const std::string& s) {
    if (s == "middle") return MiddleState{};
    if (s.rfind("ratio:", 0) == 0) {
        const size_t c2 = s.rfind(':');
        RatioState r;
        r.r = std::strtod(s.substr(6, c2 - 6).c_str(), nullptr);
        r.side = s.substr(c2 + 1) == "right" ? CutSide::Right : CutSide::Left;
        return r;
    }
    if (s.rfind("split:", 0) == 0) {
        return SplitState{std::atoi(s.c_str() + 6)};
    }
    throw ConfigError("bad cut state: " + s);
}

void put(KeyValueMap& kv, const std::string& key, double v) { kv[key] = format_double(v); }
void put(KeyValueMap& kv, const std::string& key, int v) { kv[key] = std::to_string(v); }
void put(KeyValueMap& kv, const std::string& key, uint64_t v) { kv[key] = std::to_string(v); }
void put(KeyValueMap& kv, const std::string& key, bool v) { kv[key] = v ? "true" : "false"; }
void put(KeyValueMap& kv, const std::string& key, const std::string& v) { kv[key] = v; }

double get_d(const KeyValueMap& kv, const std::string& key, double dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : std::strtod(it->second.c_str(), nullptr);
}
int get_i(const KeyValueMap& kv, const std::string& key, int dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : std::atoi(it->second.c_str());
}
uint64_t get_u64(const KeyValueMap& kv, const std::string& key, uint64_t dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : std::strtoull(it->second.c_str(), nullptr, 10);
}
bool get_b(const KeyValueMap& kv, const std::string& key, bool dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second == "true";
}
std::string get_s(const KeyValueMap& kv, const std::string& key, const std::string& dflt) {
    auto it = kv.find(key);
    return it == kv.end() ? dflt : it->second;
}

}  // namespace

KeyValueMap setup_to_key_values(const EpisodeSetup& s) {
    KeyValueMap kv;
    put(kv, "sim.domain_size", s.sim.domain_size);
    put(kv, "sim.grid_cells", s.sim.grid_cells);
    put(kv, "sim.dt", s.sim.dt);
    put(kv, "sim.dt_acc", s.sim.dt_acc);
    put(kv, "sim.gravity_y", s.sim.gravity.y());
    put(kv, "sim.damping_grid", s.sim.damping_grid);
    put(kv, "sim.damping_particle", s.sim.damping_particle);
    put(kv, "sim.j_min", s.sim.j_min);
    put(kv, "sim.j_max", s.sim.j_max);
    put(kv, "sim.j_clamp_mode",
        std::string(s.sim.j_clamp_mode == JClampMode::NearestBound ? "nearest" : "unit"));
    put(kv, "sim.dx_ref", s.sim.dx_ref);
    put(kv, "sim.gamma", s.sim.gamma);
    put(kv, "sim.band0", s.sim.band0);
    put(kv, "sim.v_hat", s.sim.v_hat);
    put(kv, "sim.c_min", s.sim.c_min);
    put(kv, "sim.cfl_factor", s.sim.cfl_factor);
    put(kv, "sim.seed", s.sim.seed);
    put(kv, "sim.deterministic",
        s.sim.reduction == ReductionMode::Deterministic ? true : false);
    put(kv, "sim.damage_rate", s.sim.damage_rate);
    put(kv, "sim.damage_mode",
        std::string(s.sim.damage_mode == DamageMode::Proportional ? "proportional"
                                                                  : "constant"));
    put(kv, "sim.eps_soft", s.sim.eps_soft);
    put(kv, "sim.tip_force", s.sim.tip_force);
    put(kv, "sim.tip_band", s.sim.tip_band);
    put(kv, "sim.visco_relax", s.sim.visco_relax);
    put(kv, "sim.approach_window_accum", s.sim.approach_window_accum);
    put(kv, "sim.k2_exp_a", s.sim.k2_exp_a);
    put(kv, "sim.k2_exp_b", s.sim.k2_exp_b);
    put(kv, "sim.max_episode_time", s.sim.max_episode_time);

    put(kv, "material.count", static_cast<int>(s.materials.size()));
    for (size_t i = 0; i < s.materials.size(); ++i) {
        const std::string p = "material." + std::to_string(i) + ".";
        put(kv, p + "rho", s.materials[i].rho);
        put(kv, p + "E", s.materials[i].E);
        put(kv, p + "nu", s.materials[i].nu);
        put(kv, p + "sigma_y", s.materials[i].sigma_y);
        put(kv, p + "k2_ref", s.materials[i].k2_ref);
    }
    put(kv, "k2_reference.E", s.k2_reference.E);
    put(kv, "k2_reference.sigma_y", s.k2_reference.sigma_y);

    put(kv, "scene.position_x", s.scene.object_position.x());
    put(kv, "scene.position_y", s.scene.object_position.y());
    put(kv, "scene.position_z", s.scene.object_position.z());
    put(kv, "scene.scale", s.scene.object_scale);
    put(kv, "scene.rotation", s.scene.object_rotation);
    put(kv, "scene.object", std::string(to_string(s.scene.object_kind)));
    put(kv, "scene.material", s.scene.material);
    put(kv, "scene.seed", s.scene.seed);
    put(kv, "scene.bias_angle", s.scene.style.bias_angle);
    put(kv, "scene.saw_amplitude", s.scene.style.saw_amplitude);
    put(kv, "scene.saw_frequency", s.scene.style.saw_frequency);
    put(kv, "scene.guillotine_tilt", s.scene.style.guillotine_tilt);

    put(kv, "task.style", std::string(to_string(s.task.style)));
    put(kv, "task.state", state_to_string(s.task.state));
    put(kv, "task.cut_height", s.task.cut_height);
    put(kv, "task.approach_speed", s.task.approach_speed);

    put(kv, "contact.restitution", s.contact.restitution);
    put(kv, "contact.friction_mu", s.contact.friction_mu);
    put(kv, "contact.query_aabb_pad", s.contact.query_aabb_pad);

    put(kv, "blade.length", s.blade_length);
    put(kv, "blade.height", s.blade_height);
    put(kv, "blade.spine", s.blade_spine);
    put(kv, "blade.half_angle", s.blade_half_angle);
    put(kv, "board.top", s.board_top);

    put(kv, "episode.particle_spacing", s.particle_spacing);
    put(kv, "episode.link_radius", s.link_radius);
    put(kv, "episode.damage_cut", s.damage_cut);
    put(kv, "episode.seg_every_windows", s.seg_every_windows);
    put(kv, "episode.use_safety", s.use_safety);
    put(kv, "episode.v_safe", s.v_safe);
    return kv;
}

EpisodeSetup setup_from_key_values(const KeyValueMap& kv) {
    EpisodeSetup s;
    s.sim.domain_size = get_d(kv, "sim.domain_size", s.sim.domain_size);
    s.sim.grid_cells = get_i(kv, "sim.grid_cells", s.sim.grid_cells);
    s.sim.dt = get_d(kv, "sim.dt", s.sim.dt);
    s.sim.dt_acc = get_d(kv, "sim.dt_acc", s.sim.dt_acc);
    s.sim.gravity = Vec3(0.0, get_d(kv, "sim.gravity_y", s.sim.gravity.y()), 0.0);
    s.sim.damping_grid = get_d(kv, "sim.damping_grid", s.sim.damping_grid);
    s.sim.damping_particle = get_d(kv, "sim.damping_particle", s.sim.damping_particle);
    s.sim.j_min = get_d(kv, "sim.j_min", s.sim.j_min);
    s.sim.j_max = get_d(kv, "sim.j_max", s.sim.j_max);
    s.sim.j_clamp_mode = get_s(kv, "sim.j_clamp_mode", "nearest") == "unit"
                             ? JClampMode::UnitReset
                             : JClampMode::NearestBound;
    s.sim.dx_ref = get_d(kv, "sim.dx_ref", s.sim.dx_ref);
    s.sim.gamma = get_d(kv, "sim.gamma", s.sim.gamma);
    s.sim.band0 = get_d(kv, "sim.band0", s.sim.band0);
    s.sim.v_hat = get_d(kv, "sim.v_hat", s.sim.v_hat);
    s.sim.c_min = get_d(kv, "sim.c_min", s.sim.c_min);
    s.sim.cfl_factor = get_d(kv, "sim.cfl_factor", s.sim.cfl_factor);
    s.sim.seed = get_u64(kv, "sim.seed", s.sim.seed);
    s.sim.reduction = get_b(kv, "sim.deterministic", true) ? ReductionMode::Deterministic
                                                           : ReductionMode::Fast;
    s.sim.damage_rate = get_d(kv, "sim.damage_rate", s.sim.damage_rate);
    s.sim.damage_mode = get_s(kv, "sim.damage_mode", "proportional") == "constant"
                            ? DamageMode::ConstantRate
                            : DamageMode::Proportional;
    s.sim.eps_soft = get_d(kv, "sim.eps_soft", s.sim.eps_soft);
    s.sim.tip_force = get_d(kv, "sim.tip_force", s.sim.tip_force);
    s.sim.tip_band = get_d(kv, "sim.tip_band", s.sim.tip_band);
    s.sim.visco_relax = get_d(kv, "sim.visco_relax", s.sim.visco_relax);
    s.sim.approach_window_accum =
        get_b(kv, "sim.approach_window_accum", s.sim.approach_window_accum);
    s.sim.k2_exp_a = get_d(kv, "sim.k2_exp_a", s.sim.k2_exp_a);
    s.sim.k2_exp_b = get_d(kv, "sim.k2_exp_b", s.sim.k2_exp_b);
    s.sim.max_episode_time = get_d(kv, "sim.max_episode_time", s.sim.max_episode_time);

    const int nmat = get_i(kv, "material.count", 1);
    s.materials.clear();
    for (int i = 0; i < nmat; ++i) {
        const std::string p = "material." + std::to_string(i) + ".";
        Material m;
        m.rho = get_d(kv, p + "rho", m.rho);
        m.E = get_d(kv, p + "E", m.E);
        m.nu = get_d(kv, p + "nu", m.nu);
        m.sigma_y = get_d(kv, p + "sigma_y", m.sigma_y);
        m.k2_ref = get_d(kv, p + "k2_ref", m.k2_ref);
        s.materials.push_back(m);
    }
    s.k2_reference = s.materials[0];
    s.k2_reference.E = get_d(kv, "k2_reference.E", s.k2_reference.E);
    s.k2_reference.sigma_y = get_d(kv, "k2_reference.sigma_y", s.k2_reference.sigma_y);

    s.scene.object_position =
        Vec3(get_d(kv, "scene.position_x", 0.25), get_d(kv, "scene.position_y", 0.05),
             get_d(kv, "scene.position_z", 0.25));
    s.scene.object_scale = get_d(kv, "scene.scale", 1.0);
    s.scene.object_rotation = get_d(kv, "scene.rotation", 0.0);
    if (auto k = object_from_string(get_s(kv, "scene.object", "cucumber"))) {
        s.scene.object_kind = *k;
    }
    s.scene.material = get_i(kv, "scene.material", 0);
    s.scene.seed = get_u64(kv, "scene.seed", 0);
    s.scene.style.bias_angle = get_d(kv, "scene.bias_angle", s.scene.style.bias_angle);
    s.scene.style.saw_amplitude = get_d(kv, "scene.saw_amplitude", s.scene.style.saw_amplitude);
    s.scene.style.saw_frequency = get_d(kv, "scene.saw_frequency", s.scene.style.saw_frequency);
    s.scene.style.guillotine_tilt =
        get_d(kv, "scene.guillotine_tilt", s.scene.style.guillotine_tilt);

    if (auto st = style_from_string(get_s(kv, "task.style", "normal"))) {
        s.task.style = *st;
    }
    s.task.state = state_from_string(get_s(kv, "task.state", "middle"));
    s.task.object_kind = s.scene.object_kind;
    s.task.cut_height = get_d(kv, "task.cut_height", s.task.cut_height);
    s.task.approach_speed = get_d(kv, "task.approach_speed", s.task.approach_speed);

    s.contact.restitution = get_d(kv, "contact.restitution", s.contact.restitution);
    s.contact.friction_mu = get_d(kv, "contact.friction_mu", s.contact.friction_mu);
    s.contact.query_aabb_pad = get_d(kv, "contact.query_aabb_pad", s.contact.query_aabb_pad);

    s.blade_length = get_d(kv, "blade.length", s.blade_length);
    s.blade_height = get_d(kv, "blade.height", s.blade_height);
    s.blade_spine = get_d(kv, "blade.spine", s.blade_spine);
    s.blade_half_angle = get_d(kv, "blade.half_angle", s.blade_half_angle);
    s.board_top = get_d(kv, "board.top", s.board_top);

    s.particle_spacing = get_d(kv, "episode.particle_spacing", s.particle_spacing);
    s.link_radius = get_d(kv, "episode.link_radius", s.link_radius);
    s.damage_cut = get_d(kv, "episode.damage_cut", s.damage_cut);
    s.seg_every_windows = get_i(kv, "episode.seg_every_windows", s.seg_every_windows);
    s.use_safety = get_b(kv, "episode.use_safety", s.use_safety);
    s.v_safe = get_d(kv, "episode.v_safe", s.v_safe);
    return s;
}

void write_episode(const EpisodeRecord& rec, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_key_values(dir / "meta.cfg", rec.config_snapshot);

    {
        CsvWriter w(dir / "force.csv", {"t", "Fx", "Fy", "Fz", "Fmag", "Jx", "Jy", "Jz"});
        for (const ForceRecord& r : rec.knife_force) {
            w.row({r.t, r.F_avg.x(), r.F_avg.y(), r.F_avg.z(), r.magnitude,
                   r.window_impulse.x(), r.window_impulse.y(), r.window_impulse.z()});
        }
        w.flush();
    }
    {
        CsvWriter w(dir / "board_force.csv", {"t", "Fx", "Fy", "Fz", "Fmag", "Jx", "Jy", "Jz"});
        for (const ForceRecord& r : rec.board_force) {
            w.row({r.t, r.F_avg.x(), r.F_avg.y(), r.F_avg.z(), r.magnitude,
                   r.window_impulse.x(), r.window_impulse.y(), r.window_impulse.z()});
        }
        w.flush();
    }
    {
        CsvWriter w(dir / "knife.csv", {"t", "speed", "u", "c_hat"});
        for (const auto& k : rec.knife_series) {
            w.row({k.t, k.speed, k.u, k.c_hat});
        }
        w.flush();
    }
    {
        CsvWriter w(dir / "jstats.csv", {"t", "Jmin", "Jmax", "clamps"});
        for (const auto& j : rec.j_stats) {
            w.row({j.t, j.j_min, j.j_max, static_cast<double>(j.clamps)});
        }
        w.flush();
    }
    {
        CsvWriter w(dir / "segments.csv", {"t", "count"});
        for (const auto& sg : rec.segments) {
            w.row({sg.t, static_cast<double>(sg.count)});
        }
        w.flush();
    }
    {
        CsvWriter w(dir / "trajectory.csv",
                    {"t", "px", "py", "pz", "qw", "qx", "qy", "qz", "v_cmd", "phase", "style"});
        for (const Waypoint& wp : rec.trajectory.waypoints) {
            w.row_mixed({format_double(wp.t), format_double(wp.pose.translation.x()),
                         format_double(wp.pose.translation.y()),
                         format_double(wp.pose.translation.z()),
                         format_double(wp.pose.rotation.w()),
                         format_double(wp.pose.rotation.x()),
                         format_double(wp.pose.rotation.y()),
                         format_double(wp.pose.rotation.z()), format_double(wp.v_cmd),
                         to_string(wp.phase), to_string(rec.trajectory.style)});
        }
        w.flush();
    }
    {
        std::vector<std::string> header{"success", "reason", "angular_error",
                                        "final_segments",
                                        "peak_force", "v_post", "max_speed", "diverged"};
        CsvWriter w(dir / "verdict.csv", header);
        w.row_mixed({rec.verdict.success ? "true" : "false",
                     rec.verdict.reason.empty() ? "ok" : rec.verdict.reason,
                     format_double(rec.verdict.angular_error),
                     std::to_string(rec.final_segment_count), format_double(rec.peak_force),
                     format_double(rec.v_post), format_double(rec.max_speed),
                     rec.diverged ? "true" : "false"});
        w.flush();
    }
    {
        CsvWriter w(dir / "planes.csv", {"target", "achieved", "error"});
        for (size_t i = 0; i < rec.target_planes.size(); ++i) {
            const double achieved =
                i < rec.achieved_planes.size() ? rec.achieved_planes[i] : std::nan("");
            const double err =
                i < rec.verdict.plane_errors.size() ? rec.verdict.plane_errors[i] : std::nan("");
            w.row({rec.target_planes[i], achieved, err});
        }
        w.flush();
    }
    write_file(dir / "instruction.txt", rec.instruction + "\n");
}

}  // namespace cutsim
