#include "cutsim/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cutsim {

SdfShape SdfShape::halfspace(const Vec3& normal_world, double offset) {
    SdfShape s;
    s.kind = Kind::Halfspace;
    // Local +y maps to the requested normal.
    s.pose.rotation = Quat::FromTwoVectors(Vec3::UnitY(), normal_world);
    s.pose.translation = Vec3::Zero();
    s.halfspace_offset = offset;
    return s;
}

SdfShape SdfShape::box(const RigidTransform& pose, const Vec3& half_extents) {
    SdfShape s;
    s.kind = Kind::Box;
    s.pose = pose;
    s.box_half_extents = half_extents;
    return s;
}

SdfShape SdfShape::wedge_blade(const RigidTransform& pose, double length, double height,
                               double spine, double half_angle) {
    SdfShape s;
    s.kind = Kind::WedgeBlade;
    s.pose = pose;
    s.blade_length = length;
    s.blade_height = height;
    s.spine_thickness = spine;
    s.edge_half_angle = half_angle;
    return s;
}

namespace {

SdfSample sample_halfspace(const SdfShape& s, const Vec3& x_local) {
    return {x_local.y() - s.halfspace_offset, Vec3::UnitY()};
}

SdfSample sample_box(const SdfShape& s, const Vec3& x_local) {
    const Vec3 q = x_local.cwiseAbs() - s.box_half_extents;
    SdfSample out;
    if ((q.array() > 0.0).any()) {
        const Vec3 qp = q.cwiseMax(0.0);
        out.phi = qp.norm();
        Vec3 n = qp / out.phi;
        for (int a = 0; a < 3; ++a) {
            if (x_local[a] < 0.0) n[a] = -n[a];
        }
        out.normal = n;
    } else {
        // Inside: nearest face, ties broken by axis order x, y, z.
        int axis = 0;
        for (int a = 1; a < 3; ++a) {
            if (q[a] > q[axis]) axis = a;
        }
        out.phi = q[axis];
        Vec3 n = Vec3::Zero();
        n[axis] = x_local[axis] >= 0.0 ? 1.0 : -1.0;
        out.normal = n;
    }
    return out;
}

// Exact signed distance to the blade's convex cross-section polygon in the
// local xy-plane. Returns the outward 2D direction alongside the distance.
struct Profile2d {
    double d;
    double nx, ny;
};

Profile2d wedge_profile(const SdfShape& s, double px, double py) {
    const double tan_a = std::tan(s.edge_half_angle);
    const double half_spine = 0.5 * s.spine_thickness;
    const double y_spine = std::min(half_spine / tan_a, s.blade_height);
    const double x_top = std::min(half_spine, s.blade_height * tan_a);

    // CCW: edge vertex, right face, spine corners, top, back down the left.
    // Degenerates to a triangle when the faces meet the top before the spine.
    double vx[5], vy[5];
    int n = 0;
    vx[n] = 0.0;
    vy[n++] = 0.0;
    if (y_spine < s.blade_height) {
        vx[n] = half_spine;
        vy[n++] = y_spine;
        vx[n] = half_spine;
        vy[n++] = s.blade_height;
        vx[n] = -half_spine;
        vy[n++] = s.blade_height;
        vx[n] = -half_spine;
        vy[n++] = y_spine;
    } else {
        vx[n] = x_top;
        vy[n++] = s.blade_height;
        vx[n] = -x_top;
        vy[n++] = s.blade_height;
    }

    double best = std::numeric_limits<double>::infinity();
    double bnx = 0.0, bny = 1.0;
    bool inside = true;
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        const double ex = vx[j] - vx[i];
        const double ey = vy[j] - vy[i];
        const double qx = px - vx[i];
        const double qy = py - vy[i];
        const double len2 = ex * ex + ey * ey;
        const double h = len2 > 0.0 ? std::clamp((qx * ex + qy * ey) / len2, 0.0, 1.0) : 0.0;
        const double dx = qx - ex * h;
        const double dy = qy - ey * h;
        const double dist = std::sqrt(dx * dx + dy * dy);
        if (ex * qy - ey * qx < 0.0) inside = false;  // right of a CCW edge
        if (dist < best) {
            best = dist;
            if (dist > 1e-14) {
                bnx = dx / dist;
                bny = dy / dist;
            } else {
                // On the boundary: fall back to the edge outward normal.
                const double inv = len2 > 0.0 ? 1.0 / std::sqrt(len2) : 0.0;
                bnx = ey * inv;
                bny = -ex * inv;
            }
        }
    }
    if (inside) {
        // Outward direction is the nearest edge normal; dvec points inward.
        return {-best, -bnx, -bny};
    }
    return {best, bnx, bny};
}

// Exact extrusion of the profile along z with end caps.
SdfSample sample_wedge(const SdfShape& s, const Vec3& x_local) {
    const Profile2d p = wedge_profile(s, x_local.x(), x_local.y());
    const double dz = std::abs(x_local.z()) - 0.5 * s.blade_length;
    const double sz = x_local.z() >= 0.0 ? 1.0 : -1.0;

    SdfSample out;
    if (p.d > 0.0 && dz > 0.0) {
        out.phi = std::sqrt(p.d * p.d + dz * dz);
        out.normal = Vec3(p.d * p.nx, p.d * p.ny, dz * sz) / out.phi;
    } else if (p.d >= dz) {
        out.phi = p.d;
        out.normal = Vec3(p.nx, p.ny, 0.0);
    } else {
        out.phi = dz;
        out.normal = Vec3(0.0, 0.0, sz);
    }
    return out;
}

}  // namespace

SdfSample sdf_sample(const SdfShape& shape, const Vec3& x_world) {
    const Vec3 x_local = shape.pose.apply_inverse(x_world);
    SdfSample s;
    switch (shape.kind) {
        case SdfShape::Kind::Halfspace:
            s = sample_halfspace(shape, x_local);
            break;
        case SdfShape::Kind::Box:
            s = sample_box(shape, x_local);
            break;
        case SdfShape::Kind::WedgeBlade:
            s = sample_wedge(shape, x_local);
            break;
    }
    s.normal = shape.pose.rotate(s.normal);
    return s;
}

Aabb SdfShape::world_aabb(double pad, double domain_size) const {
    if (kind == Kind::Halfspace) {
        return {Vec3::Constant(-pad), Vec3::Constant(domain_size + pad)};
    }
    Vec3 he;
    Vec3 center_local = Vec3::Zero();
    if (kind == Kind::Box) {
        he = box_half_extents;
    } else {
        const double half_width =
            std::max(0.5 * spine_thickness, blade_height * std::tan(edge_half_angle));
        he = Vec3(half_width, 0.5 * blade_height, 0.5 * blade_length);
        center_local = Vec3(0.0, 0.5 * blade_height, 0.0);
    }
    // Conservative rotated-box bound.
    const Mat3 R = pose.rotation.toRotationMatrix();
    const Vec3 world_he = R.cwiseAbs() * he;
    const Vec3 c = pose.apply(center_local);
    return {c - world_he - Vec3::Constant(pad), c + world_he + Vec3::Constant(pad)};
}

EdgeQuery blade_edge_query(const SdfShape& blade, const Vec3& x_world) {
    const Vec3 p = blade.pose.apply_inverse(x_world);
    const double half_len = 0.5 * blade.blade_length;
    const double z_clamped = std::clamp(p.z(), -half_len, half_len);
    EdgeQuery q;
    q.distance = Vec3(p.x(), p.y(), p.z() - z_clamped).norm();
    q.side = p.x() >= 0.0 ? 1.0 : -1.0;
    q.lateral_normal = blade.pose.rotate(Vec3::UnitX());
    return q;
}

}  // namespace cutsim
