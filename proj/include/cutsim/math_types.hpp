#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace cutsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

// Rigid transform x_world = R * x_local + p.
struct RigidTransform {
    Quat rotation{Quat::Identity()};
    Vec3 translation{Vec3::Zero()};

    Vec3 apply(const Vec3& x_local) const { return rotation * x_local + translation; }
    Vec3 apply_inverse(const Vec3& x_world) const {
        return rotation.conjugate() * (x_world - translation);
    }
    Vec3 rotate(const Vec3& v_local) const { return rotation * v_local; }
    Vec3 rotate_inverse(const Vec3& v_world) const { return rotation.conjugate() * v_world; }
};

struct Aabb {
    Vec3 min{Vec3::Zero()};
    Vec3 max{Vec3::Zero()};

    Vec3 extent() const { return max - min; }
    Vec3 center() const { return 0.5 * (min + max); }
    bool contains(const Vec3& x) const {
        return (x.array() >= min.array()).all() && (x.array() <= max.array()).all();
    }
    Aabb padded(double pad) const { return {min.array() - pad, max.array() + pad}; }
};

inline Mat3 outer(const Vec3& a, const Vec3& b) { return a * b.transpose(); }

}  // namespace cutsim
