#include "gsim/pose.hpp"

#include <algorithm>

namespace gsim {

namespace {

// Sign canonicalization: w >= 0; on a w == 0 tie, the first nonzero of
// (x, y, z) is made positive. q and -q are the same rotation, so this only
// stabilizes logging and comparisons.
UnitQuaternion canonicalize(double w, double x, double y, double z) {
    double flip = 1.0;
    if (w < 0.0) {
        flip = -1.0;
    } else if (w == 0.0) {
        if (x != 0.0) {
            flip = x < 0.0 ? -1.0 : 1.0;
        } else if (y != 0.0) {
            flip = y < 0.0 ? -1.0 : 1.0;
        } else if (z < 0.0) {
            flip = -1.0;
        }
    }
    return UnitQuaternion{w * flip, x * flip, y * flip, z * flip};
}

}  // namespace

NormalizeResult normalize_quaternion(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (n <= kQuatNormEpsilon) {
        return {UnitQuaternion::identity(), true};
    }
    return {canonicalize(w / n, x / n, y / n, z / n), false};
}

NormalizeResult normalize_quaternion(const std::array<double, 4>& raw) {
    return normalize_quaternion(raw[0], raw[1], raw[2], raw[3]);
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
    const Vec3 u = normalized(axis);
    if (u == Vec3{}) {
        return identity();
    }
    const double h = 0.5 * angle;
    const double s = std::sin(h);
    return normalize_quaternion(std::cos(h), u.x * s, u.y * s, u.z * s).q;
}

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& o) const {
    // Hamilton product, renormalized to absorb rounding drift.
    return normalize_quaternion(w * o.w - x * o.x - y * o.y - z * o.z,
                                w * o.x + x * o.w + y * o.z - z * o.y,
                                w * o.y - x * o.z + y * o.w + z * o.x,
                                w * o.z + x * o.y - y * o.x + z * o.w)
        .q;
}

UnitQuaternion UnitQuaternion::conjugate() const { return UnitQuaternion{w, -x, -y, -z}; }

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
    const Vec3 qv{x, y, z};
    const Vec3 t = cross(qv, v) * 2.0;
    return v + t * w + cross(qv, t);
}

double position_loss(const Vec3& p, const Vec3& target) {
    const Vec3 d = p - target;
    return dot(d, d);
}

double orientation_loss(const UnitQuaternion& q, const UnitQuaternion& target) {
    // |<q,q>| can land a few ulps above 1 after normalization rounding; the
    // loss is defined on [0, 1].
    return 1.0 - std::min(1.0, std::abs(quat_dot(q, target)));
}

double total_loss(const GraspPose& pose, const GraspPose& target, const LossWeights& w) {
    return position_loss(pose.position, target.position) +
           w.lambda * orientation_loss(pose.orientation, target.orientation);
}

double geodesic_angle(const UnitQuaternion& q, const UnitQuaternion& target) {
    const double d = std::clamp(std::abs(quat_dot(q, target)), 0.0, 1.0);
    return 2.0 * std::acos(d);
}

PoseLossGradients loss_gradients(const Vec3& position, const std::array<double, 4>& raw_orientation,
                                 const GraspPose& target, const LossWeights& w) {
    PoseLossGradients g;
    g.d_position = (position - target.position) * 2.0;

    const auto& r = raw_orientation;
    const double n = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3]);
    if (n <= kQuatNormEpsilon || w.lambda == 0.0) {
        return g;  // fallback region is flat; lambda 0 kills the term
    }
    const std::array<double, 4> u{r[0] / n, r[1] / n, r[2] / n, r[3] / n};
    const std::array<double, 4> t{target.orientation.w, target.orientation.x, target.orientation.y,
                                  target.orientation.z};
    const double d = u[0] * t[0] + u[1] * t[1] + u[2] * t[2] + u[3] * t[3];
    // The canonical sign flip applied during normalization cancels inside
    // |<q, q*>|, so the gradient can be taken on the unflipped direction.
    const double s = d >= 0.0 ? 1.0 : -1.0;
    for (int j = 0; j < 4; ++j) {
        g.d_raw_orientation[j] = -w.lambda * s * (t[j] - u[j] * d) / n;
    }
    return g;
}

PoseLossGradients loss_gradients(const GraspPose& pose, const GraspPose& target, const LossWeights& w) {
    const std::array<double, 4> raw{pose.orientation.w, pose.orientation.x, pose.orientation.y,
                                    pose.orientation.z};
    return loss_gradients(pose.position, raw, target, w);
}

}  // namespace gsim
