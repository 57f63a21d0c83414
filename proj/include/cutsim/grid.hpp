#pragma once

#include <vector>

#include "cutsim/math_types.hpp"
#include "cutsim/types.hpp"

namespace cutsim {

// Dense background grid, SoA layout. Only the active region (particle AABB
// padded by the stencil radius) is cleared and traversed each step.
class MpmGrid {
public:
    MpmGrid() = default;
    explicit MpmGrid(int nodes_per_axis) { resize(nodes_per_axis); }

    void resize(int nodes_per_axis);

    int n() const { return n_; }
    size_t node_count() const { return mass_.size(); }

    size_t index(int i, int j, int k) const {
        return (static_cast<size_t>(i) * n_ + j) * n_ + k;
    }

    double& mass(size_t id) { return mass_[id]; }
    Vec3& mom(size_t id) { return mom_[id]; }
    Vec3& vel(size_t id) { return vel_[id]; }
    Vec3& v_before(size_t id) { return v_before_[id]; }
    double mass(size_t id) const { return mass_[id]; }
    const Vec3& mom(size_t id) const { return mom_[id]; }
    const Vec3& vel(size_t id) const { return vel_[id]; }
    const Vec3& v_before(size_t id) const { return v_before_[id]; }
    // Post-contact velocity; identical storage to vel(), named for the
    // GridNode contract.
    const Vec3& v_after(size_t id) const { return vel_[id]; }

    GridNode node(int i, int j, int k) const {
        const size_t id = index(i, j, k);
        return {mass_[id], mom_[id], v_before_[id], vel_[id]};
    }

    // Active region in node indices, inclusive bounds.
    struct Region {
        int lo[3] = {0, 0, 0};
        int hi[3] = {-1, -1, -1};
        bool empty() const { return hi[0] < lo[0]; }
    };

    const Region& region() const { return region_; }
    void set_region(const Region& r) { region_ = r; }

    // Zeroes mass/momentum (and velocity bookkeeping) over the given region.
    void clear_region(const Region& r);

    // Sums over the current active region.
    double total_mass() const;
    Vec3 total_momentum() const;

private:
    int n_ = 0;
    Region region_;
    std::vector<double> mass_;
    std::vector<Vec3> mom_;
    std::vector<Vec3> vel_;
    std::vector<Vec3> v_before_;
};

}  // namespace cutsim
