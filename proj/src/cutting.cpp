#include "cutsim/cutting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "cutsim/errors.hpp"

namespace cutsim {

CutThresholds resolution_scaled_thresholds(const SimConfig& cfg) {
    CutThresholds t;
    t.band = cfg.band0 * std::pow(cfg.dx_ref / cfg.dx(), cfg.gamma);
    t.v_th = (cfg.dx() / cfg.dt) * cfg.v_hat;
    t.c_norm = 0.35 * cfg.dx() / cfg.dt;
    t.damage_rate = cfg.damage_rate;
    return t;
}

double damage_update(double D, double phi, double c_hat, double v_n, const Vec3& stroke_dir,
                     const CutThresholds& thresholds, const SimConfig& cfg, double dt) {
    const bool in_band = std::abs(phi) < thresholds.band;
    const bool strong_contact = c_hat >= cfg.c_min;
    const bool fast_approach = v_n <= -thresholds.v_th;
    const bool downward = stroke_dir.dot(Vec3(0.0, -1.0, 0.0)) > 0.1;
    if (!(in_band && strong_contact && fast_approach && downward)) {
        return D;
    }
    const double rate = cfg.damage_mode == DamageMode::Proportional
                            ? thresholds.damage_rate * c_hat
                            : thresholds.damage_rate;
    return std::min(1.0, D + rate * dt);
}

std::pair<double, double> effective_moduli(double mu, double lambda, double D, double eps_soft) {
    const double factor = std::max(1.0 - D, eps_soft);
    return {factor * mu, factor * lambda};
}

double speed_resistance(double u, double c_hat, double k2, double dt) {
    return u / (1.0 + k2 * c_hat * u * dt);
}

double k2_scale(const Material& mat, const Material& ref, double a, double b) {
    if (!(ref.E > 0.0) || !(ref.sigma_y > 0.0) || !(mat.E > 0.0) || !(mat.sigma_y > 0.0)) {
        throw ConfigError("k2_scale requires positive E and sigma_y");
    }
    double yield_ratio;
    if (std::isinf(mat.sigma_y) && std::isinf(ref.sigma_y)) {
        yield_ratio = 1.0;
    } else if (std::isinf(mat.sigma_y) || std::isinf(ref.sigma_y)) {
        throw ConfigError("k2_scale cannot mix finite and infinite yield stresses");
    } else {
        yield_ratio = mat.sigma_y / ref.sigma_y;
    }
    return mat.k2_ref * std::pow(mat.E / ref.E, a) * std::pow(yield_ratio, b);
}

Vec3 tip_force_delta(const Particle& p, const SdfShape& blade, double band, double magnitude,
                     double dt) {
    if (magnitude <= 0.0) return Vec3::Zero();
    const EdgeQuery q = blade_edge_query(blade, p.x);
    if (q.distance >= band) return Vec3::Zero();
    return q.side * (magnitude * dt / p.m) * q.lateral_normal;
}

std::vector<Vec3> tip_force(const std::vector<Particle>& particles, const SdfShape& blade,
                            double band, double magnitude, double dt) {
    std::vector<Vec3> deltas(particles.size(), Vec3::Zero());
    if (magnitude <= 0.0) {
        return deltas;
    }
    const Aabb cull = blade.world_aabb(band, 0.0);
    for (size_t i = 0; i < particles.size(); ++i) {
        if (!cull.contains(particles[i].x)) continue;
        deltas[i] = tip_force_delta(particles[i], blade, band, magnitude, dt);
    }
    return deltas;
}

namespace {

// Uniform hash grid over particle positions for radius queries.
class HashGrid {
public:
    HashGrid(const std::vector<Particle>& particles, double cell) : cell_(cell) {
        buckets_.reserve(particles.size());
        for (size_t i = 0; i < particles.size(); ++i) {
            buckets_[key(particles[i].x)].push_back(static_cast<int>(i));
        }
    }

    template <typename Fn>
    void for_neighbors(const Vec3& x, Fn&& fn) const {
        const int cx = coord(x.x());
        const int cy = coord(x.y());
        const int cz = coord(x.z());
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dz = -1; dz <= 1; ++dz) {
                    const auto it = buckets_.find(pack(cx + dx, cy + dy, cz + dz));
                    if (it == buckets_.end()) continue;
                    for (int j : it->second) fn(j);
                }
            }
        }
    }

private:
    int coord(double v) const { return static_cast<int>(std::floor(v / cell_)); }
    int64_t pack(int x, int y, int z) const {
        return (static_cast<int64_t>(x) & 0x1fffff) |
               ((static_cast<int64_t>(y) & 0x1fffff) << 21) |
               ((static_cast<int64_t>(z) & 0x1fffff) << 42);
    }
    int64_t key(const Vec3& p) const { return pack(coord(p.x()), coord(p.y()), coord(p.z())); }

    double cell_;
    std::unordered_map<int64_t, std::vector<int>> buckets_;
};

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

SegmentationResult segment_connectivity(const std::vector<Particle>& particles,
                                        double link_radius, double damage_cut,
                                        const std::vector<int>* prev_labels) {
    if (!(link_radius > 0.0)) {
        throw ParameterDomainError("link_radius must be positive");
    }
    if (!(damage_cut > 0.0 && damage_cut <= 1.0)) {
        throw ParameterDomainError("damage_cut must lie in (0, 1]");
    }
    const size_t n = particles.size();
    SegmentationResult out;
    out.labels.assign(n, 0);
    if (n == 0) {
        return out;
    }

    const auto connector = [&](size_t i) { return particles[i].D < damage_cut; };
    const auto prev = [&](size_t i) { return prev_labels ? (*prev_labels)[i] : 0; };

    HashGrid hash(particles, link_radius);
    const double r2 = link_radius * link_radius;
    UnionFind uf(n);
    for (size_t i = 0; i < n; ++i) {
        if (!connector(i)) continue;
        hash.for_neighbors(particles[i].x, [&](int j) {
            if (static_cast<size_t>(j) <= i || !connector(j)) return;
            // Labels never merge once split: only link within a previous segment.
            if (prev(i) != prev(j)) return;
            if ((particles[i].x - particles[j].x).squaredNorm() <= r2) {
                uf.unite(static_cast<int>(i), j);
            }
        });
    }

    // Damaged particles adopt the nearest connector's component (within the
    // link radius and the same previous segment), else keep their old label.
    std::vector<int> attach(n, -1);
    for (size_t i = 0; i < n; ++i) {
        if (connector(i)) continue;
        double best = r2;
        int best_j = -1;
        hash.for_neighbors(particles[i].x, [&](int j) {
            if (!connector(j) || prev(i) != prev(j)) return;
            const double d2 = (particles[i].x - particles[j].x).squaredNorm();
            if (d2 <= best) {
                best = d2;
                best_j = j;
            }
        });
        attach[i] = best_j;
    }

    // Stable labels: components ordered by smallest contained particle index;
    // distinct previous labels stay distinct even if spatially adjacent.
    std::unordered_map<int64_t, int> label_of_root;
    int next_label = 0;
    for (size_t i = 0; i < n; ++i) {
        int root;
        if (connector(i)) {
            root = uf.find(static_cast<int>(i));
        } else if (attach[i] >= 0) {
            root = uf.find(attach[i]);
        } else {
            out.labels[i] = prev(i);
            continue;
        }
        const int64_t key = (static_cast<int64_t>(prev(root)) << 32) | root;
        auto it = label_of_root.find(key);
        if (it == label_of_root.end()) {
            it = label_of_root.emplace(key, next_label++).first;
        }
        out.labels[i] = it->second;
    }
    out.segment_count = next_label;
    return out;
}

}  // namespace cutsim
