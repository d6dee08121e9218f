#pragma once

#include <vector>

#include "gsim/pose.hpp"
#include "gsim/rng.hpp"
#include "gsim/sensing.hpp"

namespace gsim {

struct ShapeDescriptor {
    enum class Kind { sphere, box };
    Kind kind = Kind::sphere;
    double radius = 0.05;                  // sphere
    Vec3 half_extents{0.04, 0.04, 0.04};   // box
};

struct ObjectState {
    Vec3 position;
    UnitQuaternion orientation;
    Vec3 linear_velocity;   // m/s
    Vec3 angular_velocity;  // rad/s
    ShapeDescriptor shape;
    double age = 0.0;  // seconds since spawn; drives sliding direction redraws
};

struct MotionPattern {
    enum class Kind { stationary, linear, sliding, rotating };
    Kind kind = Kind::stationary;
    Vec3 velocity;                      // linear
    double speed = 0.0;                 // sliding
    double t_change = 1.0;              // sliding redraw period, s
    Vec3 angular_velocity;              // rotating
};

// One explicit Euler step. The stationary pattern is an exact identity; the
// sliding pattern redraws its horizontal direction from `rng` whenever the
// step crosses a t_change boundary.
ObjectState step_object(const ObjectState& state, const MotionPattern& pattern, double dt,
                        RngStream& rng);

struct ContactPoint {
    Vec3 location;
    double f_grip = 0.0;  // squeeze magnitude, N, >= 0
    double dc = 0.0;      // patch measure, m^2, > 0
};

struct AttemptOutcome {
    bool success = false;
    double position_error = 0.0;     // m
    double orientation_error = 0.0;  // rad
    std::vector<ContactPoint> contacts;
    Wrench wrench;
    double quality = 0.0;
};

struct GraspTolerances {
    double r_pos = 0.03;         // m
    double r_ang = 0.35;         // rad
    double tau_threshold = 0.1;  // stability cutoff on S_F
};

struct GripModel {
    double base_force = 2.0;       // N per contact point
    int contact_points = 8;        // K, split across two opposing patches; even, >= 2
    double patch_area = 8e-4;      // m^2 across all points
    double slip_gain = 0.05;       // N of tangential force per point at full pose error
    double width = 0.08;           // finger separation, m
    double approach_offset = 0.10; // oracle hover height above the object center, m
};

// Canonical top-down grasp for the given object state: hover above the center,
// gripper flipped to point down, yawed with the object.
GraspPose oracle_grasp_pose(const ObjectState& state, double approach_offset);

struct GraspContacts {
    std::vector<ContactPoint> points;
    ContactSummary summary;
};

// Synthesizes the contact set of a closed grasp. Squeeze magnitudes shrink
// linearly with position error (floored at 10% of base); misalignment adds a
// common tangential slip component that unbalances the net wrench.
GraspContacts contact_forces(const GraspPose& grasp, const ObjectState& state,
                             const GraspTolerances& tol, const GripModel& grip,
                             const NoiseModel& noise, RngStream rng);

// Q(G): midpoint-rule integral of the squeeze force over the contact measure.
double grasp_quality(const std::vector<ContactPoint>& contacts);

// Grasp oracle. `state_at_closure` must already account for closure latency.
// success = within both geometric tolerances AND sensed stability at or below
// tau_threshold. Contacts are synthesized only when the geometry captures.
AttemptOutcome execute_grasp(const GraspPose& grasp, const ObjectState& state_at_closure,
                             const GraspTolerances& tol, const GripModel& grip,
                             const NoiseModel& noise, RngStream rng);

}  // namespace gsim
