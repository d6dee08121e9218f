#pragma once

#include <vector>

#include "gsim/pose.hpp"
#include "gsim/rng.hpp"

namespace gsim {

struct ObjectState;  // world.hpp

// Synthetic depth frame, meters, row-major. Every stored depth lies in
// (0, far_value]; pixels with no geometry hold exactly far_value.
struct DepthImage {
    int width = 32;
    int height = 32;
    double far_value = 1.0;
    std::vector<double> depths;

    double at(int row, int col) const { return depths[static_cast<std::size_t>(row) * width + col]; }
};

// Six-axis force/torque reading at the gripper.
struct Wrench {
    double fx = 0.0, fy = 0.0, fz = 0.0;  // N
    double tx = 0.0, ty = 0.0, tz = 0.0;  // N*m
};

struct CameraModel {
    Vec3 position{0.0, 0.0, 0.8};
    Vec3 direction{0.0, 0.0, -1.0};  // unit view direction
    double fov = 0.9;                // full horizontal angle, radians, in (0, pi)
    int width = 32;
    int height = 32;
    double far_value = 1.0;
};

struct NoiseModel {
    double depth_sigma = 0.0;    // m, per pixel
    double wrench_sigma = 0.0;   // N or N*m, per axis
    double contact_sigma = 0.0;  // N, per contact point
    double exec_pos_sigma = 0.0; // m, per axis: motor error between commanded and executed pose
    double exec_ang_sigma = 0.0; // rad: motor error rotation angle
};

// S_F = ||F||^2, the six-term sum of squared components.
double stability_metric(const Wrench& f);

// Strict "exceeds": true iff s_f > tau_threshold.
bool needs_adjustment(double s_f, double tau_threshold);

struct ContactForce {
    Vec3 location;
    Vec3 force;  // world frame, N
};

// Force set of a closed grasp; torques are taken about `reference`.
struct ContactSummary {
    std::vector<ContactForce> forces;
    Vec3 reference;
};

// Net wrench of the contact set plus per-axis Gaussian noise.
Wrench sense_wrench(const ContactSummary& contacts, const NoiseModel& noise, RngStream rng);

// Ray-cast depth of the scene: per pixel, the nearest ray-primitive
// intersection distance plus Gaussian noise, clamped into (0, far_value];
// misses render as far_value exactly. Pixel noise comes from per-pixel forks
// of `rng`, so the result is independent of pixel evaluation order.
DepthImage render_depth(const std::vector<ObjectState>& objects, const CameraModel& camera,
                        const NoiseModel& noise, RngStream rng);

// Single-threaded reference; bitwise identical to render_depth.
DepthImage render_depth_serial(const std::vector<ObjectState>& objects, const CameraModel& camera,
                               const NoiseModel& noise, RngStream rng);

}  // namespace gsim
