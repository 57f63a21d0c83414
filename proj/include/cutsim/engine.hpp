#pragma once

#include <optional>
#include <vector>

#include "cutsim/contact.hpp"
#include "cutsim/cutting.hpp"
#include "cutsim/grid.hpp"
#include "cutsim/math_types.hpp"
#include "cutsim/sdf.hpp"
#include "cutsim/types.hpp"

namespace cutsim {

// Per-step summary used for force accounting and reproducibility logging.
struct StepDiagnostics {
    Vec3 knife_impulse{Vec3::Zero()};  // sum of m (v_after - v_before) on knife contacts
    Vec3 board_impulse{Vec3::Zero()};
    double c_hat = 0.0;
    double j_min = 1.0;
    double j_max = 1.0;
    int clamp_count = 0;
};

// MLS-MPM stepper: P2G scatter with fused stress force, grid momentum
// update, SDF contact resolution, and G2P gather with the F update, J clamp,
// plasticity, damage, and tip separation.
class Engine {
public:
    struct Toggles {
        bool stress = true;
        bool gravity = true;
        bool damping = true;
        bool contact = true;
        bool plasticity = true;
        bool damage = true;
        bool tip_force = true;
        bool aabb_cull = true;
    };

    Engine(SimConfig cfg, std::vector<Material> materials);

    std::vector<Particle>& particles() { return particles_; }
    const std::vector<Particle>& particles() const { return particles_; }
    MpmGrid& grid() { return grid_; }
    const MpmGrid& grid() const { return grid_; }
    const SimConfig& config() const { return cfg_; }
    const std::vector<Material>& materials() const { return materials_; }
    const CutThresholds& thresholds() const { return thresholds_; }

    void set_knife(KnifeTool* knife) { knife_ = knife; }
    void set_board(const SdfShape* board) { board_ = board; }
    KnifeTool* knife() { return knife_; }

    Toggles toggles;

    // One full timestep at cfg.dt.
    void step();

    // Individual phases, exposed for the transfer/contact test suites.
    void begin_step();          // active region + clear
    void p2g();
    void grid_update();
    void resolve_contacts();
    void g2p();

    const StepDiagnostics& diagnostics() const { return diag_; }
    double time() const { return time_; }

    // Window-accumulation mode: the harness resets the approach accumulator
    // at output-window boundaries.
    void reset_approach_accumulator() { approach_window_acc_ = 0.0; }

private:
    void scatter_particle(size_t pi, double dt);
    void check_in_domain(size_t pi) const;

    SimConfig cfg_;
    std::vector<Material> materials_;
    std::vector<std::pair<double, double>> lame_;  // (mu, lambda) per material
    std::vector<Particle> particles_;
    MpmGrid grid_;
    KnifeTool* knife_ = nullptr;
    const SdfShape* board_ = nullptr;

public:
    ContactParams contact_params;

private:
    CutThresholds thresholds_;
    StepDiagnostics diag_;
    double approach_window_acc_ = 0.0;
    double time_ = 0.0;
};

}  // namespace cutsim
