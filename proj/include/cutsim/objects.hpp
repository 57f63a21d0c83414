#pragma once

#include "cutsim/math_types.hpp"
#include "cutsim/planner.hpp"

namespace cutsim {

// Analytic primitive stand-ins for the food categories, desk scale.
struct PrimitiveSpec {
    enum class Type { Capsule, Sphere, Ellipsoid };
    Type type = Type::Sphere;
    double cyl_len = 0.0;            // capsule cylindrical length (m)
    double radius = 0.04;            // capsule/sphere radius (m)
    Vec3 semi_axes{0.0, 0.0, 0.0};   // ellipsoid semi-axes (m)
};

PrimitiveSpec object_primitive(ObjectKind kind);

// True when a point in the object's local frame (capsule axis along x,
// centered at the origin) lies inside the primitive.
bool primitive_contains(const PrimitiveSpec& prim, const Vec3& local, double scale);

}  // namespace cutsim
