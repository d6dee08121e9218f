#pragma once

#include <array>
#include <cmath>

namespace gsim {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    bool operator==(const Vec3&) const = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// Zero vector normalizes to zero.
inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return n > 0.0 ? Vec3{v.x / n, v.y / n, v.z / n} : Vec3{};
}

// Unit quaternion, w-first. Instances are always unit norm (within 1e-9) and
// sign-canonical: w >= 0, ties broken toward the first positive component of
// (x, y, z). Build through normalize_quaternion or the named factories.
struct UnitQuaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static UnitQuaternion identity() { return {}; }
    static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);

    UnitQuaternion operator*(const UnitQuaternion& o) const;  // composition
    UnitQuaternion conjugate() const;
    Vec3 rotate(const Vec3& v) const;
    bool operator==(const UnitQuaternion&) const = default;
};

inline double quat_dot(const UnitQuaternion& a, const UnitQuaternion& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

// Inputs with norm at or below this are treated as degenerate.
inline constexpr double kQuatNormEpsilon = 1e-8;

struct NormalizeResult {
    UnitQuaternion q;
    bool degenerate = false;  // input norm <= kQuatNormEpsilon; q is identity
};

NormalizeResult normalize_quaternion(double w, double x, double y, double z);
NormalizeResult normalize_quaternion(const std::array<double, 4>& raw);

struct GraspPose {
    Vec3 position;
    UnitQuaternion orientation;
};

struct LossWeights {
    double lambda = 1.0;  // orientation weight, >= 0
};

// Squared Euclidean distance, meters^2.
double position_loss(const Vec3& p, const Vec3& target);

// 1 - |<q, q*>|; in [0, 1], invariant under the quaternion double cover.
double orientation_loss(const UnitQuaternion& q, const UnitQuaternion& target);

double total_loss(const GraspPose& pose, const GraspPose& target, const LossWeights& w);

// Rotation angle between the two orientations: 2*acos(clamp(|<q,q*>|,0,1)), in [0, pi].
double geodesic_angle(const UnitQuaternion& q, const UnitQuaternion& target);

// Gradient of total_loss w.r.t. the position and the raw pre-normalization
// orientation 4-vector. The orientation part chains through the normalization
// Jacobian; inside the degenerate fallback region it is identically zero.
struct PoseLossGradients {
    Vec3 d_position;
    std::array<double, 4> d_raw_orientation{};
};

PoseLossGradients loss_gradients(const Vec3& position, const std::array<double, 4>& raw_orientation,
                                 const GraspPose& target, const LossWeights& w);
PoseLossGradients loss_gradients(const GraspPose& pose, const GraspPose& target, const LossWeights& w);

}  // namespace gsim
