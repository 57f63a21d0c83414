#pragma once

#include "cutsim/math_types.hpp"

namespace cutsim {

// Signed-distance shapes for the knife blade and the cutting board.
// phi < 0 inside, > 0 outside; the normal points outward.
struct SdfShape {
    enum class Kind { Halfspace, Box, WedgeBlade };

    Kind kind = Kind::Halfspace;
    RigidTransform pose;

    // Halfspace: solid fills n . x_local <= offset (n is +y in local frame).
    double halfspace_offset = 0.0;

    // Box: half extents in the local frame.
    Vec3 box_half_extents{0.1, 0.1, 0.1};

    // Wedge blade in the local frame: cutting edge along z through the
    // origin, blade rising in +y, faces opening at edge_half_angle from the
    // vertical mid-plane, spine capped at +/- spine_thickness/2 and y = height.
    double blade_length = 0.12;
    double blade_height = 0.05;
    double spine_thickness = 0.01;
    double edge_half_angle = 10.0 * M_PI / 180.0;

    static SdfShape halfspace(const Vec3& normal_world, double offset);
    static SdfShape box(const RigidTransform& pose, const Vec3& half_extents);
    static SdfShape wedge_blade(const RigidTransform& pose, double length, double height,
                                double spine, double half_angle);

    // World-space AABB padded enough to cover the shape's contact band.
    // Halfspaces are unbounded; their AABB spans the given domain extent.
    Aabb world_aabb(double pad, double domain_size) const;
};

struct SdfSample {
    double phi = 0.0;
    Vec3 normal{Vec3::UnitY()};
};

// Signed distance and outward normal at a world point.
SdfSample sdf_sample(const SdfShape& shape, const Vec3& x_world);

// Distance from a world point to the blade's cutting edge segment, plus the
// side of the blade mid-plane the point lies on (+1 for local +x, -1 else).
// Only meaningful for WedgeBlade shapes.
struct EdgeQuery {
    double distance = 0.0;
    double side = 1.0;
    Vec3 lateral_normal{Vec3::UnitX()};  // world direction of local +x
};
EdgeQuery blade_edge_query(const SdfShape& blade, const Vec3& x_world);

}  // namespace cutsim
