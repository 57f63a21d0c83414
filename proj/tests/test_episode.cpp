#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "cutsim/episode.hpp"
#include "cutsim/errors.hpp"
#include "cutsim/experiments.hpp"

using namespace cutsim;
namespace fs = std::filesystem;

namespace {

// Desk-scale scene with a small object so the integration tests stay quick.
EpisodeSetup small_setup() {
    EpisodeSetup s;
    s.sim.domain_size = 0.5;
    s.sim.grid_cells = 64;
    s.sim.dt = 0x1.0p-15;
    s.sim.dt_acc = 0x1.0p-8;
    s.sim.dx_ref = s.sim.dx();
    s.sim.band0 = 1.2 * (0.5 * s.sim.dx());
    s.sim.tip_band = s.sim.band0;
    s.sim.damage_rate = 2000.0;
    s.sim.damage_mode = DamageMode::ConstantRate;
    s.sim.max_episode_time = 1.5;
    s.sim.seed = 42;

    Material food;
    food.E = 2.0e5;
    food.nu = 0.3;
    food.rho = 1000.0;
    food.sigma_y = 2.0e4;
    food.k2_ref = 40.0;
    s.materials = {food};
    s.k2_reference = food;

    s.scene.object_kind = ObjectKind::Strawberry;
    s.scene.object_scale = 2.0;
    s.scene.object_position = Vec3(0.25, 0.05, 0.25);
    s.scene.seed = 42;
    s.contact.friction_mu = 0.5;

    s.task.style = CutStyle::Normal;
    s.task.state = MiddleState{};
    s.task.object_kind = ObjectKind::Strawberry;
    s.task.approach_speed = 0.5;
    s.task.cut_height = 0.02;
    return s;
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cutsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("trajectory executor mechanics") {
    Trajectory traj;
    traj.style = CutStyle::Normal;
    Waypoint a;
    a.t = 0.0;
    a.pose.translation = Vec3(0.0, 1.0, 0.0);
    a.v_cmd = 2.0;
    a.phase = TrajPhase::Approach;
    Waypoint b = a;
    b.t = 0.5;
    b.pose.translation = Vec3(0.0, 0.0, 0.0);
    b.v_cmd = 2.0;
    b.phase = TrajPhase::Contact;
    Waypoint c = b;
    c.t = 1.0;
    c.pose.translation = Vec3(0.0, 0.0, 1.0);
    c.v_cmd = 0.0;
    c.phase = TrajPhase::Retract;
    traj.waypoints = {a, b, c};

    TrajectoryExecutor exec(traj);
    KnifeTool knife;
    CHECK(exec.phase() == TrajPhase::Approach);
    exec.apply_to(knife, 1.0);
    CHECK((knife.linear_velocity - Vec3(0.0, -2.0, 0.0)).norm() <= 1e-12);
    CHECK(knife.stroke_dir.y() == doctest::Approx(-1.0));
    CHECK(knife.speed() == doctest::Approx(2.0));

    // Half-speed execution covers half the arc in the same wall time.
    exec.advance(0.25);
    exec.apply_to(knife, 0.5);
    CHECK(knife.shape.pose.translation.y() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK((knife.linear_velocity - Vec3(0.0, -1.0, 0.0)).norm() <= 1e-12);
    CHECK(knife.speed() == doctest::Approx(1.0));

    exec.advance(0.3);
    CHECK(exec.phase() == TrajPhase::Contact);
    exec.advance(10.0);
    CHECK(exec.done());
    exec.apply_to(knife, 1.0);
    CHECK(knife.linear_velocity.norm() == 0.0);
    CHECK((knife.shape.pose.translation - Vec3(0.0, 0.0, 1.0)).norm() <= 1e-12);
}

TEST_CASE("executor reports angular velocity on rotating segments") {
    Trajectory traj;
    Waypoint a;
    a.t = 0.0;
    a.pose.rotation = Quat::Identity();
    a.v_cmd = 1.0;
    Waypoint b = a;
    b.t = 1.0;
    b.pose.rotation = Quat(Eigen::AngleAxisd(0.5, Vec3::UnitX()));
    traj.waypoints = {a, b};
    TrajectoryExecutor exec(traj);
    KnifeTool knife;
    exec.apply_to(knife, 1.0);
    CHECK((knife.angular_velocity - Vec3(0.5, 0.0, 0.0)).norm() <= 1e-9);
    // The rigid velocity field includes the omega x r term.
    const Vec3 at_offset = knife.velocity_at(knife.shape.pose.translation + Vec3(0, 0, 1));
    CHECK((at_offset - Vec3(0.5, 0.0, 0.0).cross(Vec3(0, 0, 1))).norm() <= 1e-9);
}

TEST_CASE("a middle cut episode severs the object into two segments") {
    const EpisodeSetup setup = small_setup();
    const EpisodeRecord rec = run_episode(setup);
    REQUIRE(!rec.diverged);
    CHECK(rec.final_segment_count == 2);
    CHECK(rec.peak_force > 0.0);
    CHECK(rec.first_contact_step >= 0);
    CHECK(rec.verdict.success);
    REQUIRE(rec.achieved_planes.size() == 1);
    CHECK(std::abs(rec.achieved_planes[0] - rec.target_planes[0]) <= 0.1 * 0.057);

    SUBCASE("momentum-change audit is exactly zero") {
        CHECK(rec.total_impulse == rec.total_favg_dtacc);
        CHECK(rec.total_impulse.norm() > 0.0);
    }

    SUBCASE("damage is monotone along the episode and J stats populated") {
        CHECK(!rec.j_stats.empty());
        for (const auto& j : rec.j_stats) {
            CHECK(j.j_min >= setup.sim.j_min - 1e-9);
            CHECK(j.j_max <= setup.sim.j_max + 1e-9);
        }
        CHECK(!rec.knife_series.empty());
        CHECK(rec.v_post < setup.task.approach_speed);
    }
}

TEST_CASE("same seed twice reproduces the record bit for bit") {
    EpisodeSetup setup = small_setup();
    setup.sim.max_episode_time = 0.12;
    const EpisodeRecord a = run_episode(setup);
    const EpisodeRecord b = run_episode(setup);
    REQUIRE(a.knife_force.size() == b.knife_force.size());
    for (size_t i = 0; i < a.knife_force.size(); ++i) {
        CHECK(a.knife_force[i].F_avg == b.knife_force[i].F_avg);
        CHECK(a.knife_force[i].window_impulse == b.knife_force[i].window_impulse);
    }
    REQUIRE(a.knife_series.size() == b.knife_series.size());
    for (size_t i = 0; i < a.knife_series.size(); ++i) {
        CHECK(a.knife_series[i].speed == b.knife_series[i].speed);
        CHECK(a.knife_series[i].u == b.knife_series[i].u);
        CHECK(a.knife_series[i].c_hat == b.knife_series[i].c_hat);
    }
}

TEST_CASE("records replay bit-identically from their config snapshot") {
    EpisodeSetup setup = small_setup();
    setup.sim.max_episode_time = 0.12;
    const EpisodeRecord rec = run_episode(setup);
    const fs::path dir = temp_dir("replay");
    write_episode(rec, dir);

    const EpisodeSetup replayed_setup = setup_from_key_values(read_key_values(dir / "meta.cfg"));
    const EpisodeRecord replay = run_episode(replayed_setup);
    const fs::path dir2 = temp_dir("replay2");
    write_episode(replay, dir2);

    CHECK(read_file(dir / "force.csv") == read_file(dir2 / "force.csv"));
    CHECK(read_file(dir / "knife.csv") == read_file(dir2 / "knife.csv"));
    CHECK(read_file(dir / "jstats.csv") == read_file(dir2 / "jstats.csv"));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("setup serialization round-trips") {
    EpisodeSetup s = small_setup();
    s.task.style = CutStyle::Saw;
    s.task.state = RatioState{0.3, CutSide::Right};
    s.scene.style.saw_frequency = 5.5;
    s.use_safety = true;
    s.v_safe = 0.77;
    const EpisodeSetup t = setup_from_key_values(setup_to_key_values(s));
    CHECK(t.sim.dt == s.sim.dt);
    CHECK(t.sim.grid_cells == s.sim.grid_cells);
    CHECK(t.sim.band0 == s.sim.band0);
    CHECK(t.materials[0].E == s.materials[0].E);
    CHECK(t.materials[0].sigma_y == s.materials[0].sigma_y);
    CHECK(t.task.style == CutStyle::Saw);
    const auto* ratio = std::get_if<RatioState>(&t.task.state);
    REQUIRE(ratio != nullptr);
    CHECK(ratio->r == 0.3);
    CHECK(ratio->side == CutSide::Right);
    CHECK(t.scene.style.saw_frequency == 5.5);
    CHECK(t.use_safety);
    CHECK(t.v_safe == 0.77);
    CHECK(t.scene.object_kind == ObjectKind::Strawberry);
}

TEST_CASE("an episode that never reaches the object fails with zero force") {
    EpisodeSetup setup = small_setup();
    setup.task.cut_height = 0.2;        // plan far above the object
    setup.sim.max_episode_time = 0.02;  // and stop before the descent arrives
    const EpisodeRecord rec = run_episode(setup);
    REQUIRE(!rec.diverged);
    CHECK(rec.peak_force == 0.0);
    CHECK(rec.first_contact_step < 0);
    CHECK(!rec.verdict.success);
    CHECK(rec.final_segment_count == 1);
}

TEST_CASE("dataset generation writes episodes, instructions, and a manifest") {
    EpisodeSetup base = small_setup();
    base.sim.max_episode_time = 0.05;  // keep the smoke test fast
    CutTask task = base.task;
    AugmentRanges ranges;
    ranges.position_min = Vec3(0.24, 0.05, 0.24);
    ranges.position_max = Vec3(0.26, 0.05, 0.26);
    ranges.scale_min = 1.8;
    ranges.scale_max = 2.2;
    ranges.speed_min = 0.4;
    ranges.speed_max = 0.6;

    const fs::path dir = temp_dir("dataset");
    const auto manifest = gen_dataset({task}, 3, dir, base, ranges);
    CHECK(manifest.size() == 3);
    CHECK(fs::exists(dir / "manifest.csv"));
    for (const auto& e : manifest) {
        CHECK(fs::exists(dir / e.dir / "force.csv"));
        CHECK(fs::exists(dir / e.dir / "trajectory.csv"));
        const std::string instr = read_file(dir / e.dir / "instruction.txt");
        CHECK(instr.find("strawberry") != std::string::npos);
    }
    // Seeds are distinct by construction.
    CHECK(manifest[0].seed != manifest[1].seed);
    CHECK(manifest[1].seed != manifest[2].seed);
    fs::remove_all(dir);
}
