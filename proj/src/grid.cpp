#include "cutsim/grid.hpp"

namespace cutsim {

void MpmGrid::resize(int nodes_per_axis) {
    n_ = nodes_per_axis;
    const size_t total = static_cast<size_t>(n_) * n_ * n_;
    mass_.assign(total, 0.0);
    mom_.assign(total, Vec3::Zero());
    vel_.assign(total, Vec3::Zero());
    v_before_.assign(total, Vec3::Zero());
    region_ = Region{};
}

void MpmGrid::clear_region(const Region& r) {
    for (int i = r.lo[0]; i <= r.hi[0]; ++i) {
        for (int j = r.lo[1]; j <= r.hi[1]; ++j) {
            const size_t base = index(i, j, r.lo[2]);
            for (size_t id = base; id <= base + (r.hi[2] - r.lo[2]); ++id) {
                mass_[id] = 0.0;
                mom_[id].setZero();
                vel_[id].setZero();
                v_before_[id].setZero();
            }
        }
    }
}

double MpmGrid::total_mass() const {
    double total = 0.0;
    for (int i = region_.lo[0]; i <= region_.hi[0]; ++i) {
        for (int j = region_.lo[1]; j <= region_.hi[1]; ++j) {
            const size_t base = index(i, j, region_.lo[2]);
            for (size_t id = base; id <= base + (region_.hi[2] - region_.lo[2]); ++id) {
                total += mass_[id];
            }
        }
    }
    return total;
}

Vec3 MpmGrid::total_momentum() const {
    Vec3 total = Vec3::Zero();
    for (int i = region_.lo[0]; i <= region_.hi[0]; ++i) {
        for (int j = region_.lo[1]; j <= region_.hi[1]; ++j) {
            const size_t base = index(i, j, region_.lo[2]);
            for (size_t id = base; id <= base + (region_.hi[2] - region_.lo[2]); ++id) {
                total += mom_[id];
            }
        }
    }
    return total;
}

}  // namespace cutsim
