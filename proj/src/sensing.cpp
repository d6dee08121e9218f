#include "gsim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsim/world.hpp"

namespace gsim {

double stability_metric(const Wrench& f) {
    return f.fx * f.fx + f.fy * f.fy + f.fz * f.fz + f.tx * f.tx + f.ty * f.ty + f.tz * f.tz;
}

bool needs_adjustment(double s_f, double tau_threshold) { return s_f > tau_threshold; }

Wrench sense_wrench(const ContactSummary& contacts, const NoiseModel& noise, RngStream rng) {
    Vec3 force;
    Vec3 torque;
    for (const auto& c : contacts.forces) {
        force += c.force;
        torque += cross(c.location - contacts.reference, c.force);
    }
    Wrench w{force.x, force.y, force.z, torque.x, torque.y, torque.z};
    if (noise.wrench_sigma > 0.0) {
        w.fx += noise.wrench_sigma * rng.fork(0).next_gaussian();
        w.fy += noise.wrench_sigma * rng.fork(1).next_gaussian();
        w.fz += noise.wrench_sigma * rng.fork(2).next_gaussian();
        w.tx += noise.wrench_sigma * rng.fork(3).next_gaussian();
        w.ty += noise.wrench_sigma * rng.fork(4).next_gaussian();
        w.tz += noise.wrench_sigma * rng.fork(5).next_gaussian();
    }
    return w;
}

namespace {

constexpr double kDepthFloor = 1e-6;
constexpr double kNoHit = std::numeric_limits<double>::infinity();

struct CameraBasis {
    Vec3 right;
    Vec3 up;
    Vec3 forward;
};

CameraBasis camera_basis(const CameraModel& camera) {
    const Vec3 forward = normalized(camera.direction);
    // Looking straight up or down needs a different up hint.
    const Vec3 hint = std::abs(forward.z) > 0.99 ? Vec3{0.0, 1.0, 0.0} : Vec3{0.0, 0.0, 1.0};
    const Vec3 right = normalized(cross(forward, hint));
    const Vec3 up = cross(right, forward);
    return {right, up, forward};
}

double intersect_sphere(const Vec3& origin, const Vec3& dir, const Vec3& center, double radius) {
    const Vec3 oc = origin - center;
    const double b = dot(oc, dir);
    const double c = dot(oc, oc) - radius * radius;
    const double disc = b * b - c;
    if (disc < 0.0) {
        return kNoHit;
    }
    const double root = std::sqrt(disc);
    const double t0 = -b - root;
    if (t0 > 0.0) {
        return t0;
    }
    const double t1 = -b + root;
    return t1 > 0.0 ? t1 : kNoHit;
}

// Slab test against the box in its own frame.
double intersect_box(const Vec3& origin, const Vec3& dir, const ObjectState& obj) {
    const UnitQuaternion inv = obj.orientation.conjugate();
    const Vec3 o = inv.rotate(origin - obj.position);
    const Vec3 d = inv.rotate(dir);
    const Vec3 h = obj.shape.half_extents;

    double t_near = -kNoHit;
    double t_far = kNoHit;
    const double od[3] = {o.x, o.y, o.z};
    const double dd[3] = {d.x, d.y, d.z};
    const double hh[3] = {h.x, h.y, h.z};
    for (int a = 0; a < 3; ++a) {
        if (std::abs(dd[a]) < 1e-12) {
            if (std::abs(od[a]) > hh[a]) {
                return kNoHit;
            }
            continue;
        }
        double t1 = (-hh[a] - od[a]) / dd[a];
        double t2 = (hh[a] - od[a]) / dd[a];
        if (t1 > t2) {
            std::swap(t1, t2);
        }
        t_near = std::max(t_near, t1);
        t_far = std::min(t_far, t2);
        if (t_near > t_far) {
            return kNoHit;
        }
    }
    if (t_far <= 0.0) {
        return kNoHit;
    }
    return t_near > 0.0 ? t_near : t_far;
}

double intersect_object(const Vec3& origin, const Vec3& dir, const ObjectState& obj) {
    return obj.shape.kind == ShapeDescriptor::Kind::sphere
               ? intersect_sphere(origin, dir, obj.position, obj.shape.radius)
               : intersect_box(origin, dir, obj);
}

// Depth of one pixel; pure in (pixel index, rng), so evaluation order and
// threading cannot change the image.
double render_pixel(int row, int col, const std::vector<ObjectState>& objects,
                    const CameraModel& camera, const CameraBasis& basis, const NoiseModel& noise,
                    const RngStream& rng) {
    const double tan_half = std::tan(0.5 * camera.fov);
    const double aspect = static_cast<double>(camera.height) / camera.width;
    const double ndc_x = (2.0 * (col + 0.5) / camera.width - 1.0) * tan_half;
    const double ndc_y = (1.0 - 2.0 * (row + 0.5) / camera.height) * tan_half * aspect;
    const Vec3 dir = normalized(basis.forward + basis.right * ndc_x + basis.up * ndc_y);

    double t = kNoHit;
    for (const auto& obj : objects) {
        t = std::min(t, intersect_object(camera.position, dir, obj));
    }
    if (!(t < camera.far_value)) {
        return camera.far_value;
    }
    if (noise.depth_sigma > 0.0) {
        const std::uint64_t pixel = static_cast<std::uint64_t>(row) * camera.width + col;
        t += noise.depth_sigma * rng.fork(pixel).next_gaussian();
    }
    return std::clamp(t, kDepthFloor, camera.far_value);
}

}  // namespace

DepthImage render_depth(const std::vector<ObjectState>& objects, const CameraModel& camera,
                        const NoiseModel& noise, RngStream rng) {
    DepthImage img;
    img.width = camera.width;
    img.height = camera.height;
    img.far_value = camera.far_value;
    img.depths.resize(static_cast<std::size_t>(camera.width) * camera.height);
    const CameraBasis basis = camera_basis(camera);

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(img.depths.size()); ++p) {
        const int row = static_cast<int>(p) / camera.width;
        const int col = static_cast<int>(p) % camera.width;
        img.depths[p] = render_pixel(row, col, objects, camera, basis, noise, rng);
    }
    return img;
}

DepthImage render_depth_serial(const std::vector<ObjectState>& objects, const CameraModel& camera,
                               const NoiseModel& noise, RngStream rng) {
    DepthImage img;
    img.width = camera.width;
    img.height = camera.height;
    img.far_value = camera.far_value;
    img.depths.resize(static_cast<std::size_t>(camera.width) * camera.height);
    const CameraBasis basis = camera_basis(camera);

    for (std::size_t p = 0; p < img.depths.size(); ++p) {
        const int row = static_cast<int>(p) / camera.width;
        const int col = static_cast<int>(p) % camera.width;
        img.depths[p] = render_pixel(row, col, objects, camera, basis, noise, rng);
    }
    return img;
}

}  // namespace gsim
