#include "cutsim/scene.hpp"

#include <cmath>

#include "cutsim/objects.hpp"
#include "cutsim/rng.hpp"

namespace cutsim {

std::vector<Particle> sample_object_particles(const SceneSpec& scene, double spacing,
                                              int material_index, const Material& mat) {
    const PrimitiveSpec prim = object_primitive(scene.object_kind);
    const double s = scene.object_scale;

    // Local-frame half extents before rotation.
    Vec3 half;
    switch (prim.type) {
        case PrimitiveSpec::Type::Sphere:
            half = Vec3::Constant(prim.radius * s);
            break;
        case PrimitiveSpec::Type::Capsule:
            half = Vec3(0.5 * prim.cyl_len * s + prim.radius * s, prim.radius * s,
                        prim.radius * s);
            break;
        case PrimitiveSpec::Type::Ellipsoid:
            half = prim.semi_axes * s;
            break;
    }

    const double c = std::cos(scene.object_rotation);
    const double sn = std::sin(scene.object_rotation);
    const Vec3 world_center = scene.object_position + Vec3(0.0, half.y(), 0.0);

    Rng rng(scene.seed ^ 0x5eedfeedULL);
    const double jitter = 0.2 * spacing;
    const double volume = spacing * spacing * spacing;

    std::vector<Particle> particles;
    const int nx = static_cast<int>(std::floor(2.0 * half.x() / spacing)) + 1;
    const int ny = static_cast<int>(std::floor(2.0 * half.y() / spacing)) + 1;
    const int nz = static_cast<int>(std::floor(2.0 * half.z() / spacing)) + 1;
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            for (int k = 0; k < nz; ++k) {
                Vec3 local(-half.x() + (i + 0.5) * spacing, -half.y() + (j + 0.5) * spacing,
                           -half.z() + (k + 0.5) * spacing);
                local += Vec3(rng.uniform(-jitter, jitter), rng.uniform(-jitter, jitter),
                              rng.uniform(-jitter, jitter));
                if (!primitive_contains(prim, local, s)) continue;
                Particle p;
                // Rotate about vertical, then place on the board.
                p.x = world_center + Vec3(c * local.x() + sn * local.z(), local.y(),
                                          -sn * local.x() + c * local.z());
                p.m = mat.rho * volume;
                p.V0 = volume;
                p.mat = material_index;
                particles.push_back(p);
            }
        }
    }
    return particles;
}

}  // namespace cutsim
