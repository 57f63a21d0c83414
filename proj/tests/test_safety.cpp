#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cutsim/errors.hpp"
#include "cutsim/planner.hpp"
#include "cutsim/rng.hpp"
#include "cutsim/safety.hpp"

using namespace cutsim;

namespace {

std::vector<SafetySample> synth_samples(const std::vector<double>& vs,
                                        const std::vector<std::pair<double, double>>& mats,
                                        double (*F)(double, double, double)) {
    std::vector<SafetySample> out;
    for (const auto& [E, sy] : mats) {
        for (double v : vs) {
            out.push_back({v, E, sy, F(v, E, sy), true});
        }
    }
    return out;
}

const std::vector<double> kVs = {0.2, 0.5, 0.8, 1.1, 1.5, 2.0, 2.6, 3.0};
const std::vector<std::pair<double, double>> kMats = {{1e5, 2e4}, {3e5, 3e4}, {6e5, 5e4}};

}  // namespace

TEST_CASE("fit recovers an exact quadratic") {
    const auto samples =
        synth_samples(kVs, kMats, [](double v, double, double) { return 3.0 + 2.0 * v * v; });
    const ForceModel m = fit_model(samples);
    CHECK(m.coeffs[0] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(m.coeffs[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(m.coeffs[2] == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::abs(m.coeffs[3]) * 6e5 <= 1e-6);
    CHECK(std::abs(m.coeffs[4]) * 5e4 <= 1e-6);
    CHECK(m.residual_max <= 1e-8);
    CHECK(m.sample_count == static_cast<int>(samples.size()));
}

TEST_CASE("fit of a constant surface") {
    const auto samples =
        synth_samples(kVs, kMats, [](double, double, double) { return 42.0; });
    const ForceModel m = fit_model(samples);
    CHECK(m.coeffs[0] == doctest::Approx(42.0).epsilon(1e-8));
    for (size_t i = 1; i < m.coeffs.size(); ++i) {
        CHECK(std::abs(m.coeffs[i]) * 1e6 <= 1e-4);
    }
}

TEST_CASE("fit recovers material coupling") {
    const auto samples = synth_samples(kVs, kMats, [](double v, double E, double sy) {
        return 1.0 + 0.5 * v + 2e-5 * E + 1e-4 * sy + 3e-6 * v * E;
    });
    const ForceModel m = fit_model(samples);
    CHECK(m.coeffs[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(m.coeffs[3] == doctest::Approx(2e-5).epsilon(1e-6));
    CHECK(m.coeffs[4] == doctest::Approx(1e-4).epsilon(1e-6));
    CHECK(m.coeffs[5] == doctest::Approx(3e-6).epsilon(1e-6));
    CHECK(m.predict(1.3, 2e5, 2.5e4) ==
          doctest::Approx(1.0 + 0.65 + 4.0 + 2.5 + 0.78).epsilon(1e-8));
}

TEST_CASE("fit errors") {
    SUBCASE("too few samples") {
        std::vector<SafetySample> few = {{0.5, 1e5, 2e4, 10.0, true},
                                         {1.0, 1e5, 2e4, 12.0, true}};
        CHECK_THROWS_AS(fit_model(few), FitError);
    }
    SUBCASE("single material is rank deficient and names a material feature") {
        const auto samples = synth_samples(
            kVs, {{2e5, 3e4}}, [](double v, double, double) { return 5.0 + v; });
        try {
            fit_model(samples);
            FAIL("expected FitError");
        } catch (const FitError& e) {
            const std::string what = e.what();
            CHECK((what.find("E") != std::string::npos ||
                   what.find("sigma_y") != std::string::npos));
        }
    }
    SUBCASE("decreasing force rejected as non-monotone") {
        const auto samples = synth_samples(kVs, kMats, [](double v, double, double) {
            return 50.0 - 10.0 * v;
        });
        CHECK_THROWS_AS(fit_model(samples), FitError);
    }
    SUBCASE("diverged samples are excluded") {
        auto samples = synth_samples(kVs, kMats,
                                     [](double v, double, double) { return 3.0 + v * v; });
        SafetySample bad{1.0, 1e5, 2e4, 1e9, false};
        samples.push_back(bad);
        const ForceModel m = fit_model(samples);
        CHECK(m.sample_count == static_cast<int>(samples.size()) - 1);
        CHECK(m.residual_max <= 1e-6);
    }
}

TEST_CASE("safe velocity solving") {
    // F_hat = 10 v^2 exactly, material-independent.
    std::vector<SafetySample> samples = synth_samples(
        kVs, kMats, [](double v, double, double) { return 10.0 * v * v; });
    const ForceModel m = fit_model(samples);

    SUBCASE("inverts the quadratic to 1e-6") {
        const double v = safe_velocity(m, 1e5, 2e4, 100.0, 0.0, 10.0);
        CHECK(v == doctest::Approx(std::sqrt(10.0)).epsilon(1e-5));
    }
    SUBCASE("uniformly safe range returns the max") {
        const double v = safe_velocity(m, 1e5, 2e4, 1e6, 0.0, 3.0);
        CHECK(v == 3.0);
    }
    SUBCASE("uniformly unsafe range is an error") {
        CHECK_THROWS_AS(safe_velocity(m, 1e5, 2e4, 1e-6, 1.0, 3.0), FitError);
    }
    SUBCASE("monotone in F_max") {
        double prev = 0.0;
        for (double fmax : {20.0, 40.0, 80.0, 160.0}) {
            const double v = safe_velocity(m, 1e5, 2e4, fmax, 0.0, 10.0);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

namespace {

Trajectory sample_trajectory() {
    CutFrame frame;
    frame.cut_axis = 0;
    frame.lateral_axis = 2;
    frame.object_aabb = {Vec3(0.2, 0.05, 0.22), Vec3(0.3, 0.1, 0.28)};
    frame.board_top = 0.05;
    CutTask task;
    task.approach_speed = 1.2;
    const auto planes = cut_planes(frame.object_aabb, MiddleState{}, frame.cut_axis);
    return generate_trajectory(task, planes, frame, StyleParams{});
}

double path_length(const Trajectory& t) {
    double len = 0.0;
    for (size_t i = 1; i < t.waypoints.size(); ++i) {
        len += (t.waypoints[i].pose.translation - t.waypoints[i - 1].pose.translation).norm();
    }
    return len;
}

}  // namespace

TEST_CASE("trajectory clamping") {
    const Trajectory traj = sample_trajectory();

    SUBCASE("speeds already under the limit are untouched") {
        const Trajectory out = clamp_trajectory(traj, 100.0);
        REQUIRE(out.waypoints.size() == traj.waypoints.size());
        for (size_t i = 0; i < out.waypoints.size(); ++i) {
            CHECK(out.waypoints[i].t == traj.waypoints[i].t);
            CHECK(out.waypoints[i].v_cmd == traj.waypoints[i].v_cmd);
        }
    }

    SUBCASE("halving the speed doubles segment durations, geometry unchanged") {
        const double v_safe = 0.6;  // all segments run at 1.2
        const Trajectory out = clamp_trajectory(traj, v_safe);
        REQUIRE(out.waypoints.size() == traj.waypoints.size());
        for (size_t i = 0; i < out.waypoints.size(); ++i) {
            CHECK((out.waypoints[i].pose.translation -
                   traj.waypoints[i].pose.translation).norm() <= 1e-12);
            CHECK(out.waypoints[i].v_cmd <= v_safe + 1e-9);
            CHECK(out.waypoints[i].phase == traj.waypoints[i].phase);
        }
        for (size_t i = 1; i < out.waypoints.size(); ++i) {
            const double d0 = traj.waypoints[i].t - traj.waypoints[i - 1].t;
            const double d1 = out.waypoints[i].t - out.waypoints[i - 1].t;
            CHECK(d1 == doctest::Approx(2.0 * d0).epsilon(1e-9));
        }
        CHECK(path_length(out) == doctest::Approx(path_length(traj)).epsilon(1e-12));
    }

    SUBCASE("infinite limit is the identity") {
        const Trajectory out =
            clamp_trajectory(traj, std::numeric_limits<double>::infinity());
        for (size_t i = 0; i < out.waypoints.size(); ++i) {
            CHECK(out.waypoints[i].t == traj.waypoints[i].t);
        }
    }

    SUBCASE("invalid limit rejected") {
        CHECK_THROWS_AS(clamp_trajectory(traj, 0.0), ParameterDomainError);
    }
}
