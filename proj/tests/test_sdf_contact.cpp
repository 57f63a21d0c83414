#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cutsim/contact.hpp"
#include "cutsim/engine.hpp"
#include "cutsim/errors.hpp"
#include "cutsim/rng.hpp"
#include "cutsim/sdf.hpp"

using namespace cutsim;

namespace {

Vec3 random_point(Rng& rng, double extent) {
    return Vec3(rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                rng.uniform(-extent, extent));
}

SdfShape default_blade() {
    return SdfShape::wedge_blade(RigidTransform{}, 0.12, 0.05, 0.01,
                                 10.0 * M_PI / 180.0);
}

// Brute-force nearest-face distance for an axis-aligned box at the origin.
double box_oracle(const Vec3& he, const Vec3& p) {
    const Vec3 q = p.cwiseAbs() - he;
    if ((q.array() <= 0.0).all()) {
        return q.maxCoeff();
    }
    return q.cwiseMax(0.0).norm();
}

}  // namespace

TEST_CASE("halfspace sample") {
    const SdfShape plane = SdfShape::halfspace(Vec3::UnitY(), 0.0);
    const SdfSample s = sdf_sample(plane, Vec3(0.0, 0.2, 0.0));
    CHECK(s.phi == doctest::Approx(0.2).epsilon(1e-12));
    CHECK((s.normal - Vec3::UnitY()).norm() <= 1e-12);

    const SdfSample inside = sdf_sample(plane, Vec3(0.3, -0.1, 0.0));
    CHECK(inside.phi == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("box sample center ties break by axis order") {
    const SdfShape box = SdfShape::box(RigidTransform{}, Vec3(1.0, 1.0, 1.0));
    const SdfSample s = sdf_sample(box, Vec3::Zero());
    CHECK(s.phi == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK((s.normal - Vec3::UnitX()).norm() <= 1e-12);
}

TEST_CASE("box sample matches the brute-force oracle") {
    Rng rng(211);
    const Vec3 he(0.4, 0.25, 0.6);
    const SdfShape box = SdfShape::box(RigidTransform{}, he);
    for (int i = 0; i < 2000; ++i) {
        const Vec3 p = random_point(rng, 1.5);
        const SdfSample s = sdf_sample(box, p);
        CHECK(s.phi == doctest::Approx(box_oracle(he, p)).epsilon(1e-10));
    }
}

TEST_CASE("wedge blade edge points lie on the surface") {
    const SdfShape blade = default_blade();
    Rng rng(223);
    for (int i = 0; i < 100; ++i) {
        const double z = rng.uniform(-0.5 * blade.blade_length, 0.5 * blade.blade_length);
        const double phi = sdf_sample(blade, Vec3(0.0, 0.0, z)).phi;
        CHECK(std::abs(phi) <= 1e-9);
    }
    // Inside the wedge body.
    CHECK(sdf_sample(blade, Vec3(0.0, 0.02, 0.0)).phi < 0.0);
    // Outside below the edge.
    CHECK(sdf_sample(blade, Vec3(0.0, -0.01, 0.0)).phi > 0.0);
}

TEST_CASE("sdf shapes are 1-Lipschitz with unit gradients") {
    Rng rng(227);
    const SdfShape shapes[] = {
        SdfShape::halfspace(Vec3(1.0, 2.0, -0.5).normalized(), 0.1),
        SdfShape::box(RigidTransform{Quat(Eigen::AngleAxisd(0.7, Vec3::UnitY())),
                                     Vec3(0.05, 0.02, -0.01)},
                      Vec3(0.1, 0.05, 0.2)),
        default_blade(),
    };
    for (const SdfShape& shape : shapes) {
        for (int i = 0; i < 3000; ++i) {
            const Vec3 a = random_point(rng, 0.3);
            const Vec3 b = a + random_point(rng, 0.02);
            const double fa = sdf_sample(shape, a).phi;
            const double fb = sdf_sample(shape, b).phi;
            CHECK(std::abs(fa - fb) <= (a - b).norm() * (1.0 + 1e-6));
        }
        for (int i = 0; i < 1000; ++i) {
            const Vec3 p = random_point(rng, 0.3);
            // Finite-difference gradient; skip samples near gradient
            // discontinuities (medial axis / face switches).
            const double h = 1e-7;
            Vec3 grad;
            bool smooth = true;
            for (int a = 0; a < 3; ++a) {
                Vec3 pp = p, pm = p;
                pp[a] += h;
                pm[a] -= h;
                grad[a] = (sdf_sample(shape, pp).phi - sdf_sample(shape, pm).phi) / (2.0 * h);
            }
            const SdfSample s = sdf_sample(shape, p);
            if ((grad - s.normal).norm() > 1e-4) smooth = false;  // switch surface
            if (smooth) {
                CHECK(std::abs(s.normal.norm() - 1.0) <= 1e-6);
                CHECK(std::abs(grad.norm() - 1.0) <= 1e-4);
            }
        }
    }
}

TEST_CASE("resolve_node_contact") {
    ContactParams params;
    params.restitution = 0.0;
    params.friction_mu = 0.0;
    const Vec3 n = Vec3::UnitY();

    SUBCASE("separating node passes through") {
        const Vec3 v(0.3, 1.0, 0.0);
        CHECK(resolve_node_contact(v, Vec3::Zero(), n, params) == v);
    }

    SUBCASE("inelastic normal kill") {
        const Vec3 v(0.0, -1.0, 0.0);
        const Vec3 out = resolve_node_contact(v, Vec3::Zero(), n, params);
        CHECK(out.norm() <= 1e-15);
    }

    SUBCASE("Coulomb cap gives full stick") {
        params.friction_mu = 2.0;
        const Vec3 v(1.0, -1.0, 0.0);  // |delta u_n| = 1, u_t = 1
        const Vec3 out = resolve_node_contact(v, Vec3::Zero(), n, params);
        CHECK(out.norm() <= 1e-15);
    }

    SUBCASE("partial friction scales the tangential part") {
        params.friction_mu = 0.25;
        const Vec3 v(1.0, -1.0, 0.0);
        const Vec3 out = resolve_node_contact(v, Vec3::Zero(), n, params);
        CHECK(out.y() == doctest::Approx(0.0));
        CHECK(out.x() == doctest::Approx(0.75).epsilon(1e-12));
    }

    SUBCASE("restitution reflects the normal component") {
        params.restitution = 1.0;
        const Vec3 v(0.0, -2.0, 0.0);
        const Vec3 out = resolve_node_contact(v, Vec3::Zero(), n, params);
        CHECK(out.y() == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("tool frame velocities compose") {
        const Vec3 v_tool(0.0, -0.5, 0.0);
        const Vec3 v(0.0, -1.0, 0.0);
        const Vec3 out = resolve_node_contact(v, v_tool, n, params);
        CHECK((out - v_tool).norm() <= 1e-15);
    }

    SUBCASE("non-unit normal is rejected") {
        CHECK_THROWS_AS(
            resolve_node_contact(Vec3::Zero(), Vec3::Zero(), Vec3(0.0, 2.0, 0.0), params),
            ParameterDomainError);
    }
}

TEST_CASE("friction never adds kinetic energy in the tool frame") {
    Rng rng(229);
    for (int i = 0; i < 2000; ++i) {
        ContactParams params;
        params.restitution = rng.uniform(0.0, 1.0);
        params.friction_mu = rng.uniform(0.0, 3.0);
        const Vec3 n =
            Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
        const Vec3 v_tool = random_point(rng, 1.0);
        const Vec3 v = random_point(rng, 2.0);
        const Vec3 out = resolve_node_contact(v, v_tool, n, params);
        CHECK((out - v_tool).squaredNorm() <= (v - v_tool).squaredNorm() + 1e-12);
    }
}

TEST_CASE("accumulate_force arithmetic and identity") {
    SUBCASE("zero impulse gives zero force") {
        const ForceRecord r = accumulate_force(Vec3::Zero(), 0.01, 1.0);
        CHECK(r.F_avg.norm() == 0.0);
        CHECK(r.magnitude == 0.0);
    }

    SUBCASE("one node arithmetic") {
        const ForceRecord r = accumulate_force(Vec3(0.0, -1.0, 0.0), 0.01, 1.0);
        CHECK(r.F_avg.y() == doctest::Approx(-100.0).epsilon(1e-14));
    }

    SUBCASE("definitional identity with a power-of-two window") {
        Rng rng(233);
        const double dt_acc = 0x1.0p-8;
        for (int i = 0; i < 500; ++i) {
            const Vec3 imp = random_point(rng, 0.37);
            const ForceRecord r = accumulate_force(imp, dt_acc, 0.5);
            CHECK(r.F_avg * dt_acc == imp);  // exact
        }
    }

    SUBCASE("non-positive window rejected") {
        CHECK_THROWS_AS(accumulate_force(Vec3::Zero(), 0.0, 0.0), ConfigError);
    }
}

TEST_CASE("contact strength normalization") {
    SimConfig cfg;
    cfg.domain_size = 0.5;
    cfg.grid_cells = 64;
    cfg.dt = 0x1.0p-15;
    const double c_norm = 0.35 * cfg.dx() / cfg.dt;
    CHECK(contact_strength(0.0, cfg) == 0.0);
    CHECK(contact_strength(c_norm, cfg) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(contact_strength(0.5 * c_norm, cfg) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(contact_strength(10.0 * c_norm, cfg) == 1.0);
}

namespace {

// A falling block squeezed against the board by a descending blade.
Engine contact_scene(bool with_cull, KnifeTool& knife, const SdfShape& board) {
    SimConfig cfg;
    cfg.domain_size = 0.5;
    cfg.grid_cells = 32;
    cfg.dt = 0x1.0p-14;
    cfg.dt_acc = cfg.dt * 64;
    Material m;
    m.E = 2.0e4;
    Engine eng(cfg, {m});
    eng.toggles.aabb_cull = with_cull;
    Rng rng(239);
    std::vector<Particle> ps;
    for (int i = 0; i < 600; ++i) {
        Particle p;
        p.x = Vec3(rng.uniform(0.22, 0.28), rng.uniform(0.12, 0.16), rng.uniform(0.22, 0.28));
        p.v = Vec3(0, rng.uniform(-0.5, 0.0), 0);
        p.m = 1e-3;
        p.V0 = 1e-6;
        ps.push_back(p);
    }
    eng.particles() = ps;
    eng.set_board(&board);
    eng.set_knife(&knife);
    return eng;
}

}  // namespace

TEST_CASE("AABB culling is conservative: identical trajectories either way") {
    const SdfShape board = SdfShape::halfspace(Vec3::UnitY(), 0.11);
    const auto run = [&](bool cull) {
        KnifeTool knife;
        knife.shape = default_blade();
        knife.shape.pose.translation = Vec3(0.25, 0.18, 0.25);
        knife.linear_velocity = Vec3(0.0, -0.4, 0.0);
        knife.stroke_dir = Vec3(0.0, -1.0, 0.0);
        Engine eng = contact_scene(cull, knife, board);
        for (int s = 0; s < 120; ++s) {
            eng.step();
            knife.shape.pose.translation += eng.config().dt * knife.linear_velocity;
        }
        return eng.particles();
    };
    const auto with_cull = run(true);
    const auto without_cull = run(false);
    REQUIRE(with_cull.size() == without_cull.size());
    for (size_t i = 0; i < with_cull.size(); ++i) {
        CHECK(with_cull[i].x == without_cull[i].x);
        CHECK(with_cull[i].v == without_cull[i].v);
    }
}

TEST_CASE("impulse bookkeeping matches node-by-node momentum changes") {
    const SdfShape board = SdfShape::halfspace(Vec3::UnitY(), 0.11);
    KnifeTool knife;
    knife.shape = default_blade();
    knife.shape.pose.translation = Vec3(0.25, 0.16, 0.25);
    knife.linear_velocity = Vec3(0.0, -0.4, 0.0);
    knife.stroke_dir = Vec3(0.0, -1.0, 0.0);
    Engine eng = contact_scene(true, knife, board);

    Vec3 sum_impulse = Vec3::Zero();
    for (int s = 0; s < 150; ++s) {
        eng.begin_step();
        eng.p2g();
        eng.grid_update();

        // Snapshot pre-contact node momenta over the active region.
        const auto& r = eng.grid().region();
        std::vector<std::pair<size_t, Vec3>> before;
        for (int i = r.lo[0]; i <= r.hi[0]; ++i) {
            for (int j = r.lo[1]; j <= r.hi[1]; ++j) {
                for (int k = r.lo[2]; k <= r.hi[2]; ++k) {
                    const size_t id = eng.grid().index(i, j, k);
                    if (eng.grid().mass(id) > 0.0) {
                        before.emplace_back(id, eng.grid().vel(id));
                    }
                }
            }
        }
        eng.resolve_contacts();
        Vec3 delta = Vec3::Zero();
        for (const auto& [id, v0] : before) {
            delta += eng.grid().mass(id) * (eng.grid().vel(id) - v0);
        }
        const Vec3 logged =
            eng.diagnostics().knife_impulse + eng.diagnostics().board_impulse;
        CHECK((delta - logged).norm() <= 1e-12 * std::max(1.0, logged.norm()));
        sum_impulse += logged;
        eng.g2p();
        knife.shape.pose.translation += eng.config().dt * knife.linear_velocity;
    }
    // The scene actually made contact.
    CHECK(sum_impulse.norm() > 0.0);
}

TEST_CASE("non-penetration tendency with zero restitution") {
    Rng rng(241);
    ContactParams params;
    params.restitution = 0.0;
    for (int i = 0; i < 1000; ++i) {
        params.friction_mu = rng.uniform(0.0, 2.0);
        const Vec3 n =
            Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
        const Vec3 v = random_point(rng, 2.0);
        const Vec3 v_tool = random_point(rng, 1.0);
        const Vec3 out = resolve_node_contact(v, v_tool, n, params);
        CHECK((out - v_tool).dot(n) >= -1e-12);
    }
}

TEST_CASE("blade edge query reports distance and side") {
    const SdfShape blade = default_blade();
    const EdgeQuery on_edge = blade_edge_query(blade, Vec3(0.0, 0.0, 0.01));
    CHECK(on_edge.distance <= 1e-12);

    const EdgeQuery right = blade_edge_query(blade, Vec3(0.004, -0.003, 0.0));
    CHECK(right.side == 1.0);
    CHECK(right.distance == doctest::Approx(0.005).epsilon(1e-9));

    const EdgeQuery left = blade_edge_query(blade, Vec3(-0.004, 0.003, 0.0));
    CHECK(left.side == -1.0);

    // Beyond the blade tip the distance includes the z overhang.
    const EdgeQuery past = blade_edge_query(blade, Vec3(0.0, 0.0, 0.08));
    CHECK(past.distance == doctest::Approx(0.02).epsilon(1e-9));
}
