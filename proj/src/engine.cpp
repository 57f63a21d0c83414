#include "cutsim/engine.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>

#include "cutsim/constitutive.hpp"
#include "cutsim/errors.hpp"

namespace cutsim {

void validate_config(const SimConfig& cfg, const std::vector<Material>& materials) {
    if (cfg.grid_cells < 8) throw ConfigError("grid_cells must be >= 8");
    if (!(cfg.domain_size > 0.0)) throw ConfigError("domain_size must be positive");
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.dt_acc > 0.0)) throw ConfigError("dt_acc must be positive");
    const double ratio = cfg.dt_acc / cfg.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
        throw ConfigError("dt_acc must be an integer multiple of dt");
    }
    if (!(cfg.j_min > 0.0 && cfg.j_min < cfg.j_max)) {
        throw ConfigError("J clamp interval must satisfy 0 < j_min < j_max");
    }
    if (!(cfg.cfl_factor > 0.0)) throw ConfigError("cfl_factor must be positive");
    if (!(cfg.v_hat > 0.0)) throw ConfigError("v_hat must be positive");
    if (!(cfg.band0 > 0.0)) throw ConfigError("band0 must be positive");
    if (!(cfg.dx_ref > 0.0)) throw ConfigError("dx_ref must be positive");
    if (!(cfg.c_min >= 0.0 && cfg.c_min <= 1.0)) throw ConfigError("c_min must lie in [0,1]");
    if (!(cfg.eps_soft > 0.0 && cfg.eps_soft <= 1.0)) {
        throw ConfigError("eps_soft must lie in (0,1]");
    }
    if (cfg.damping_grid < 0.0 || cfg.damping_particle < 0.0) {
        throw ConfigError("damping factors must be non-negative");
    }
    if (!materials.empty()) {
        const double dt_max = cfl_timestep(cfg, materials);
        if (cfg.dt > dt_max) {
            throw ConfigError("dt = " + std::to_string(cfg.dt) + " exceeds CFL bound " +
                              std::to_string(dt_max));
        }
    }
}

Engine::Engine(SimConfig cfg, std::vector<Material> materials)
    : cfg_(cfg), materials_(std::move(materials)) {
    validate_config(cfg_, materials_);
    for (const Material& m : materials_) {
        lame_.push_back(compute_lame(m.E, m.nu));
    }
    grid_.resize(cfg_.nodes_per_axis());
    thresholds_ = resolution_scaled_thresholds(cfg_);
}

void Engine::check_in_domain(size_t pi) const {
    const Vec3& x = particles_[pi].x;
    const double lo = 2.0 * cfg_.dx();
    const double hi = cfg_.domain_size - 2.0 * cfg_.dx();
    if ((x.array() < lo).any() || (x.array() > hi).any()) {
        throw OutOfDomainError("particle " + std::to_string(pi) + " at (" +
                               std::to_string(x.x()) + ", " + std::to_string(x.y()) + ", " +
                               std::to_string(x.z()) + ") breaches the 2-cell margin");
    }
}

void Engine::begin_step() {
    const double inv_dx = 1.0 / cfg_.dx();
    MpmGrid::Region region;
    if (!particles_.empty()) {
        Vec3 lo = particles_[0].x;
        Vec3 hi = particles_[0].x;
        for (const Particle& p : particles_) {
            lo = lo.cwiseMin(p.x);
            hi = hi.cwiseMax(p.x);
        }
        for (int a = 0; a < 3; ++a) {
            region.lo[a] = std::max(0, static_cast<int>(std::floor(lo[a] * inv_dx - 0.5)));
            region.hi[a] = std::min(grid_.n() - 1,
                                    static_cast<int>(std::floor(hi[a] * inv_dx - 0.5)) + 2);
        }
    }
    grid_.set_region(region);
    grid_.clear_region(region);
    diag_ = StepDiagnostics{};
    if (!cfg_.approach_window_accum) {
        approach_window_acc_ = 0.0;
    }
}

void Engine::scatter_particle(size_t pi, double dt) {
    const Particle& p = particles_[pi];
    const double inv_dx = 1.0 / cfg_.dx();
    const Vec3 xc = p.x * inv_dx;
    int base[3];
    std::array<double, 3> w[3];
    for (int a = 0; a < 3; ++a) {
        base[a] = static_cast<int>(std::floor(xc[a] - 0.5));
        w[a] = bspline_weights(xc[a] - base[a]);
    }

    Mat3 affine = p.m * p.C;
    if (toggles.stress) {
        const auto& [mu, lambda] = lame_[p.mat];
        const auto [mu_eff, lambda_eff] = effective_moduli(mu, lambda, p.D, cfg_.eps_soft);
        const double J = p.F.determinant();
        if (!(J > 0.0)) {
            throw InvertedElementError("particle " + std::to_string(pi) +
                                       " has det(F) = " + std::to_string(J));
        }
        const Mat3 R = polar_rotation(p.F).R;
        // Fused MLS-MPM stress term: P F^T with the corotated model reduces to
        // 2 mu (F - R) F^T + lambda (J-1) J I.
        const Mat3 PFt = 2.0 * mu_eff * (p.F - R) * p.F.transpose() +
                         lambda_eff * (J - 1.0) * J * Mat3::Identity();
        affine -= (4.0 * dt * p.V0 * inv_dx * inv_dx) * PFt;
    }

    const Vec3 mv = p.m * p.v;
    const bool fast = cfg_.reduction == ReductionMode::Fast;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double wij = w[0][i] * w[1][j];
            for (int k = 0; k < 3; ++k) {
                const double weight = wij * w[2][k];
                const Vec3 dpos =
                    (Vec3(base[0] + i, base[1] + j, base[2] + k) - xc) * cfg_.dx();
                const Vec3 dmom = weight * (mv + affine * dpos);
                const double dmass = weight * p.m;
                const size_t id = grid_.index(base[0] + i, base[1] + j, base[2] + k);
                if (fast) {
                    double* mass_ptr = &grid_.mass(id);
                    double* mom_ptr = grid_.mom(id).data();
#pragma omp atomic
                    *mass_ptr += dmass;
                    for (int c = 0; c < 3; ++c) {
#pragma omp atomic
                        mom_ptr[c] += dmom[c];
                    }
                } else {
                    grid_.mass(id) += dmass;
                    grid_.mom(id) += dmom;
                }
            }
        }
    }
}

void Engine::p2g() {
    const double dt = cfg_.dt;
    for (size_t pi = 0; pi < particles_.size(); ++pi) {
        check_in_domain(pi);
    }
    if (cfg_.reduction == ReductionMode::Fast) {
#pragma omp parallel for schedule(static)
        for (long pi = 0; pi < static_cast<long>(particles_.size()); ++pi) {
            scatter_particle(static_cast<size_t>(pi), dt);
        }
    } else {
        for (size_t pi = 0; pi < particles_.size(); ++pi) {
            scatter_particle(pi, dt);
        }
    }
}

void Engine::grid_update() {
    const double dt = cfg_.dt;
    const auto& r = grid_.region();
    const int bc_band = 2;
    const int n = grid_.n();
    const Vec3 g_dt = toggles.gravity ? Vec3(cfg_.gravity * dt) : Vec3(Vec3::Zero());
    const double damp = toggles.damping ? (1.0 - cfg_.damping_grid * dt) : 1.0;

#pragma omp parallel for schedule(static) collapse(2)
    for (int i = r.lo[0]; i <= r.hi[0]; ++i) {
        for (int j = r.lo[1]; j <= r.hi[1]; ++j) {
            for (int k = r.lo[2]; k <= r.hi[2]; ++k) {
                const size_t id = grid_.index(i, j, k);
                const double mass = grid_.mass(id);
                if (mass <= 0.0) continue;
                Vec3 v = grid_.mom(id) / mass + g_dt;
                v *= damp;
                // Sticky-normal, free-tangential walls.
                const int idx[3] = {i, j, k};
                for (int a = 0; a < 3; ++a) {
                    if (idx[a] < bc_band || idx[a] > n - 1 - bc_band) v[a] = 0.0;
                }
                grid_.v_before(id) = v;
                grid_.vel(id) = v;
            }
        }
    }
}

void Engine::resolve_contacts() {
    if (!toggles.contact) return;
    const auto& r = grid_.region();
    const double dx = cfg_.dx();
    const double activation = 0.5 * dx;

    struct ToolRef {
        const SdfShape* shape;
        bool is_knife;
    };
    std::vector<ToolRef> tools;
    if (knife_ != nullptr) tools.push_back({&knife_->shape, true});
    if (board_ != nullptr) tools.push_back({board_, false});

    double approach = cfg_.approach_window_accum ? approach_window_acc_ : 0.0;
    for (const ToolRef& tool : tools) {
        int lo[3] = {r.lo[0], r.lo[1], r.lo[2]};
        int hi[3] = {r.hi[0], r.hi[1], r.hi[2]};
        if (toggles.aabb_cull) {
            const Aabb box = tool.shape->world_aabb(contact_params.query_aabb_pad + activation,
                                                    cfg_.domain_size);
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::max(lo[a], static_cast<int>(std::floor(box.min[a] / dx)));
                hi[a] = std::min(hi[a], static_cast<int>(std::ceil(box.max[a] / dx)));
            }
        }
        Vec3 impulse = Vec3::Zero();
        for (int i = lo[0]; i <= hi[0]; ++i) {
            for (int j = lo[1]; j <= hi[1]; ++j) {
                for (int k = lo[2]; k <= hi[2]; ++k) {
                    const size_t id = grid_.index(i, j, k);
                    const double mass = grid_.mass(id);
                    if (mass <= 0.0) continue;
                    const Vec3 xn = Vec3(i, j, k) * dx;
                    const SdfSample s = sdf_sample(*tool.shape, xn);
                    if (s.phi >= activation) continue;
                    const Vec3 v_tool =
                        tool.is_knife ? knife_->velocity_at(xn) : Vec3(Vec3::Zero());
                    const Vec3 v_old = grid_.vel(id);
                    if (tool.is_knife) {
                        const double u_n = s.normal.dot(v_old - v_tool);
                        if (u_n < 0.0) approach -= u_n;
                    }
                    const Vec3 v_new =
                        resolve_node_contact(v_old, v_tool, s.normal, contact_params);
                    impulse += mass * (v_new - v_old);
                    grid_.vel(id) = v_new;
                }
            }
        }
        if (tool.is_knife) {
            diag_.knife_impulse = impulse;
        } else {
            diag_.board_impulse = impulse;
        }
    }
    approach_window_acc_ = approach;
    diag_.c_hat = contact_strength(approach, cfg_);
}

void Engine::g2p() {
    const double dt = cfg_.dt;
    const double inv_dx = 1.0 / cfg_.dx();
    const double damp = toggles.damping ? (1.0 - cfg_.damping_particle * dt) : 1.0;
    const bool do_damage = toggles.damage && knife_ != nullptr;
    const bool do_tip = toggles.tip_force && knife_ != nullptr && cfg_.tip_force > 0.0;
    const Aabb blade_box = knife_ != nullptr
                               ? knife_->shape.world_aabb(
                                     std::max(thresholds_.band, cfg_.tip_band), cfg_.domain_size)
                               : Aabb{};

    double j_min_all = std::numeric_limits<double>::infinity();
    double j_max_all = -std::numeric_limits<double>::infinity();
    int clamp_count = 0;
    std::atomic<long> bad_particle{-1};

#pragma omp parallel for schedule(static) reduction(min : j_min_all) \
    reduction(max : j_max_all) reduction(+ : clamp_count)
    for (long pil = 0; pil < static_cast<long>(particles_.size()); ++pil) {
        const size_t pi = static_cast<size_t>(pil);
        Particle& p = particles_[pi];
        const Vec3 xc = p.x * inv_dx;
        int base[3];
        std::array<double, 3> w[3];
        for (int a = 0; a < 3; ++a) {
            base[a] = static_cast<int>(std::floor(xc[a] - 0.5));
            w[a] = bspline_weights(xc[a] - base[a]);
        }
        Vec3 v_new = Vec3::Zero();
        Mat3 B = Mat3::Zero();
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double wij = w[0][i] * w[1][j];
                for (int k = 0; k < 3; ++k) {
                    const double weight = wij * w[2][k];
                    const size_t id = grid_.index(base[0] + i, base[1] + j, base[2] + k);
                    const Vec3 dpos = (Vec3(base[0] + i, base[1] + j, base[2] + k) - xc) *
                                      cfg_.dx();
                    const Vec3 gv = grid_.vel(id);
                    v_new += weight * gv;
                    B += weight * outer(gv, dpos);
                }
            }
        }
        p.v = v_new * damp;
        p.C = 4.0 * inv_dx * inv_dx * B;

        Mat3 F_new = (Mat3::Identity() + dt * p.C) * p.F;
        double J = F_new.determinant();
        if (J < cfg_.j_min || J > cfg_.j_max) {
            const double target = cfg_.j_clamp_mode == JClampMode::NearestBound
                                      ? std::clamp(J, cfg_.j_min, cfg_.j_max)
                                      : 1.0;
            F_new *= std::cbrt(target / J);
            J = target;
            ++clamp_count;
        }
        if (toggles.plasticity && std::isfinite(materials_[p.mat].sigma_y)) {
            const RadialReturnResult rr =
                j2_radial_return(F_new, materials_[p.mat], p.alpha, cfg_.visco_relax);
            F_new = rr.F;
            p.alpha = rr.alpha;
        }
        p.F = F_new;
        j_min_all = std::min(j_min_all, J);
        j_max_all = std::max(j_max_all, J);

        if ((do_damage || do_tip) && blade_box.contains(p.x)) {
            if (do_damage) {
                const SdfSample s = sdf_sample(knife_->shape, p.x);
                if (std::abs(s.phi) < thresholds_.band) {
                    const double v_n = s.normal.dot(p.v - knife_->velocity_at(p.x));
                    p.D = damage_update(p.D, s.phi, diag_.c_hat, v_n, knife_->stroke_dir,
                                        thresholds_, cfg_, dt);
                }
            }
            if (do_tip) {
                p.v += tip_force_delta(p, knife_->shape, cfg_.tip_band, cfg_.tip_force, dt);
            }
        }

        p.x += dt * p.v;
        if (!p.x.allFinite() || !p.v.allFinite() || !p.F.allFinite()) {
            bad_particle.store(pil);
        }
    }
    if (bad_particle.load() >= 0) {
        throw DivergenceError("particle " + std::to_string(bad_particle.load()) +
                              " produced non-finite state at t = " + std::to_string(time_));
    }
    diag_.j_min = particles_.empty() ? 1.0 : j_min_all;
    diag_.j_max = particles_.empty() ? 1.0 : j_max_all;
    diag_.clamp_count = clamp_count;
}

void Engine::step() {
    begin_step();
    p2g();
    grid_update();
    resolve_contacts();
    g2p();
    time_ += cfg_.dt;
}

}  // namespace cutsim
