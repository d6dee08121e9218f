#include "gsim/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gsim {

namespace {

// Gripper z-axis flipped onto -z: rotation by pi about x.
const UnitQuaternion kTopDownGrip = UnitQuaternion::from_axis_angle({1.0, 0.0, 0.0}, std::numbers::pi);

}  // namespace

ObjectState step_object(const ObjectState& state, const MotionPattern& pattern, double dt,
                        RngStream& rng) {
    if (pattern.kind == MotionPattern::Kind::stationary) {
        return state;
    }
    ObjectState next = state;
    if (pattern.kind == MotionPattern::Kind::sliding) {
        const double before = std::floor(state.age / pattern.t_change);
        const double after = std::floor((state.age + dt) / pattern.t_change);
        if (after > before) {
            const double theta = rng.next_uniform(0.0, 2.0 * std::numbers::pi);
            next.linear_velocity = Vec3{std::cos(theta), std::sin(theta), 0.0} * pattern.speed;
        }
    }
    next.position += next.linear_velocity * dt;
    const double omega = norm(next.angular_velocity);
    if (omega > 0.0) {
        next.orientation =
            UnitQuaternion::from_axis_angle(next.angular_velocity, omega * dt) * next.orientation;
    }
    next.age += dt;
    return next;
}

GraspPose oracle_grasp_pose(const ObjectState& state, double approach_offset) {
    return {state.position + Vec3{0.0, 0.0, approach_offset}, state.orientation * kTopDownGrip};
}

GraspContacts contact_forces(const GraspPose& grasp, const ObjectState& state,
                             const GraspTolerances& tol, const GripModel& grip,
                             const NoiseModel& noise, RngStream rng) {
    const GraspPose oracle = oracle_grasp_pose(state, grip.approach_offset);
    const Vec3 err = grasp.position - oracle.position;
    const double pos_err = norm(err);
    const double ang_err = geodesic_angle(grasp.orientation, oracle.orientation);

    const double squeeze_factor = std::max(0.1, 1.0 - pos_err / tol.r_pos);
    const double slip_ratio = std::min(1.0, std::max(pos_err / tol.r_pos, ang_err / tol.r_ang));
    const Vec3 slip_dir = normalized(Vec3{err.x, err.y, 0.0});
    const Vec3 slip = slip_dir * (grip.slip_gain * slip_ratio);

    const Vec3 finger_axis = grasp.orientation.rotate({1.0, 0.0, 0.0});
    const Vec3 patch_y = grasp.orientation.rotate({0.0, 1.0, 0.0});
    const Vec3 patch_z = grasp.orientation.rotate({0.0, 0.0, 1.0});

    const int k = grip.contact_points;
    const int per_patch = k / 2;
    const int grid_rows = (per_patch + 1) / 2;
    const double spacing = 0.01;
    const double dc = grip.patch_area / k;

    GraspContacts out;
    out.points.reserve(k);
    out.summary.forces.reserve(k);
    out.summary.reference = grasp.position;

    for (int i = 0; i < k; ++i) {
        const int patch = i < per_patch ? 0 : 1;
        const int j = patch == 0 ? i : i - per_patch;
        const double side = patch == 0 ? 1.0 : -1.0;
        const double off_y = (static_cast<double>(j % 2) - 0.5) * spacing;
        const double off_z = (static_cast<double>(j / 2) - 0.5 * (grid_rows - 1)) * spacing;

        const Vec3 location = grasp.position + finger_axis * (side * grip.width * 0.5) +
                              patch_y * off_y + patch_z * off_z;
        const double f_grip = std::max(
            0.0, grip.base_force * squeeze_factor + noise.contact_sigma * rng.fork(i).next_gaussian());

        // Each patch pushes toward the gripper center; slip is common-mode.
        const Vec3 force = finger_axis * (-side * f_grip) + slip;
        out.points.push_back({location, f_grip, dc});
        out.summary.forces.push_back({location, force});
    }
    return out;
}

double grasp_quality(const std::vector<ContactPoint>& contacts) {
    double q = 0.0;
    for (const auto& c : contacts) {
        q += c.f_grip * c.dc;
    }
    return q;
}

AttemptOutcome execute_grasp(const GraspPose& grasp, const ObjectState& state_at_closure,
                             const GraspTolerances& tol, const GripModel& grip,
                             const NoiseModel& noise, RngStream rng) {
    const GraspPose oracle = oracle_grasp_pose(state_at_closure, grip.approach_offset);

    AttemptOutcome outcome;
    outcome.position_error = norm(grasp.position - oracle.position);
    outcome.orientation_error = geodesic_angle(grasp.orientation, oracle.orientation);

    const bool captured =
        outcome.position_error <= tol.r_pos && outcome.orientation_error <= tol.r_ang;

    ContactSummary summary;
    summary.reference = grasp.position;
    if (captured) {
        GraspContacts contacts =
            contact_forces(grasp, state_at_closure, tol, grip, noise, rng.fork("contacts"));
        outcome.contacts = std::move(contacts.points);
        summary = std::move(contacts.summary);
    }
    outcome.wrench = sense_wrench(summary, noise, rng.fork("wrench"));
    outcome.quality = grasp_quality(outcome.contacts);

    const bool stable = !needs_adjustment(stability_metric(outcome.wrench), tol.tau_threshold);
    outcome.success = captured && stable;
    return outcome;
}

}  // namespace gsim
