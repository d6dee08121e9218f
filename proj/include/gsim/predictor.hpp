#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gsim/pose.hpp"
#include "gsim/rng.hpp"
#include "gsim/sensing.hpp"
#include "gsim/world.hpp"

namespace gsim {

struct Architecture {
    int input_dim = 32 * 32 + 12;
    std::vector<int> hidden{64, 32};

    bool operator==(const Architecture&) const = default;
};

struct LayerParams {
    int rows = 0;  // outputs
    int cols = 0;  // inputs
    std::vector<double> weights;  // row-major, rows x cols
    std::vector<double> bias;     // rows
};

// All trainable parameters: a tanh trunk plus three affine heads off the last
// hidden layer h — position (3), raw orientation (4), and the success head
// sigma(W_S.h + b_S). Gradients reuse this same layout.
struct ModelParams {
    Architecture arch;
    std::vector<LayerParams> trunk;
    LayerParams position_head;
    LayerParams orientation_head;
    LayerParams success_head;
};

using ModelGradient = ModelParams;

// Flat views over every parameter block, in the fixed documented order:
// trunk layer weights then bias (first to last), position head, orientation
// head, success head. Finite differences, SGD steps, and serialization all
// traverse parameters in this order.
std::vector<std::span<double>> param_views(ModelParams& params);
std::vector<std::span<const double>> param_views(const ModelParams& params);
std::size_t parameter_count(const ModelParams& params);

ModelGradient zero_like(const ModelParams& params);

// params += scale * grad  (in place; pure update helpers live in learner.hpp)
void add_scaled(ModelParams& params, const ModelGradient& grad, double scale);

// Weights uniform in +-1/sqrt(fan_in), biases zero. Throws std::invalid_argument
// on a malformed architecture.
ModelParams init_params(const Architecture& arch, RngStream rng);

struct FeatureVector {
    std::vector<double> values;
};

// Fixed order: depth pixels scaled by 1/far_value, wrench (fx..tz), object
// position, object linear velocity. Length = width*height + 12.
FeatureVector featurize(const DepthImage& depth, const Wrench& wrench, const ObjectState& object);

struct PredictorOutput {
    Vec3 position;
    std::array<double, 4> raw_orientation{};
    UnitQuaternion orientation;
    bool orientation_degenerate = false;
    std::vector<double> hidden;  // last trunk activation h
    double success_prob = 0.5;   // strictly inside (0, 1)
};

// Throws std::invalid_argument when the input length does not match the
// architecture. Summation order is fixed, so outputs are reproducible.
PredictorOutput forward(const ModelParams& params, const FeatureVector& input);

// Analytic gradient of total_loss(forward(params, input), target) w.r.t. every
// parameter, including the quaternion normalization Jacobian.
ModelGradient grad_pose_loss(const ModelParams& params, const FeatureVector& input,
                             const GraspPose& target, const LossWeights& w);

// Analytic gradient of (success_prob - feedback)^2.
ModelGradient grad_success_objective(const ModelParams& params, const FeatureVector& input,
                                     double feedback);

// Central finite differences per parameter; the verification oracle for the
// two analytic gradients above. Parallel and serial paths are bitwise equal.
ModelGradient finite_diff_gradient(const std::function<double(const ModelParams&)>& objective,
                                   const ModelParams& params, double step = 1e-6,
                                   bool parallel = true);

// max_i |a_i - n_i| / max(1, |a_i|, |n_i|)
double max_relative_error(const ModelGradient& analytic, const ModelGradient& numeric);

struct GradCheckReport {
    double max_rel_error_pose = 0.0;
    double max_rel_error_success = 0.0;
    int instances = 0;
    double tolerance = 1e-4;
    bool pass = false;
};

// Runs both objectives against the finite-difference oracle over seeded random
// (params, input, target) instances.
GradCheckReport grad_check(const Architecture& arch, int instances, double step, double tolerance,
                           std::uint64_t seed);

// Versioned JSON document: architecture descriptor plus flat weight arrays.
std::string model_to_json(const ModelParams& params);
ModelParams model_from_json(const std::string& text);

}  // namespace gsim
