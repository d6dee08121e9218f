#include "gsim/predictor.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "gsim/kernels.hpp"

namespace gsim {

namespace {

void check_architecture(const Architecture& arch) {
    if (arch.input_dim < 1 || arch.hidden.empty()) {
        throw std::invalid_argument("architecture needs input_dim >= 1 and at least one hidden layer");
    }
    for (int h : arch.hidden) {
        if (h < 1) {
            throw std::invalid_argument("architecture hidden sizes must be >= 1");
        }
    }
}

// Output scaling of the position head: the head regresses position in units
// of 1/kPositionOutputGain meters, which keeps its training rate commensurate
// with meter-scale targets under the small-activation trunk.
constexpr double kPositionOutputGain = 2.0;

LayerParams make_layer(int rows, int cols) {
    LayerParams layer;
    layer.rows = rows;
    layer.cols = cols;
    layer.weights.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    layer.bias.assign(rows, 0.0);
    return layer;
}

void fill_uniform(LayerParams& layer, RngStream& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.cols));
    for (auto& w : layer.weights) {
        w = rng.next_uniform(-bound, bound);
    }
    // biases stay zero
}

std::vector<double> affine(const LayerParams& layer, std::span<const double> x) {
    std::vector<double> y(layer.rows);
    kernels::matvec_bias(layer.weights, x, layer.bias, y, layer.rows, layer.cols);
    return y;
}

struct ForwardCache {
    // activations[0] is the input; activations[i] the tanh output of trunk
    // layer i-1. pre[i] holds the pre-activation of trunk layer i.
    std::vector<std::vector<double>> activations;
    std::vector<std::vector<double>> pre;
    PredictorOutput out;
};

ForwardCache forward_cached(const ModelParams& params, const FeatureVector& input) {
    if (static_cast<int>(input.values.size()) != params.arch.input_dim) {
        throw std::invalid_argument("feature vector length does not match architecture input_dim");
    }
    ForwardCache cache;
    // The trunk consumes the depth block (all but the trailing 12 entries)
    // centered by -1 and scaled by a fixed contrast gain: background pixels at
    // far_value contribute zero, and the handful of informative pixels carry
    // O(1) weight. A raw depth block would give the input a large constant
    // component that scales every trunk gradient by ||x||^2 ~ pixel count and
    // destabilizes online updates.
    constexpr double kDepthContrastGain = 1.0;
    std::vector<double> centered = input.values;
    const std::size_t depth_block = centered.size() > 12 ? centered.size() - 12 : 0;
    for (std::size_t i = 0; i < depth_block; ++i) {
        centered[i] = (centered[i] - 1.0) * kDepthContrastGain;
    }
    cache.activations.push_back(std::move(centered));
    for (const auto& layer : params.trunk) {
        std::vector<double> z = affine(layer, cache.activations.back());
        std::vector<double> a(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) {
            a[i] = std::tanh(z[i]);
        }
        cache.pre.push_back(std::move(z));
        cache.activations.push_back(std::move(a));
    }
    const std::vector<double>& h = cache.activations.back();

    const std::vector<double> p = affine(params.position_head, h);
    const std::vector<double> q = affine(params.orientation_head, h);
    const std::vector<double> s = affine(params.success_head, h);

    PredictorOutput& out = cache.out;
    out.position = {p[0] * kPositionOutputGain, p[1] * kPositionOutputGain,
                    p[2] * kPositionOutputGain};
    out.raw_orientation = {q[0], q[1], q[2], q[3]};
    const NormalizeResult nq = normalize_quaternion(out.raw_orientation);
    out.orientation = nq.q;
    out.orientation_degenerate = nq.degenerate;
    out.hidden = h;
    out.success_prob = 1.0 / (1.0 + std::exp(-s[0]));
    return cache;
}

// Backpropagates head deltas through the tanh trunk into `grad`.
void backprop_trunk(const ModelParams& params, const ForwardCache& cache,
                    std::vector<double> d_hidden, ModelGradient& grad) {
    for (int l = static_cast<int>(params.trunk.size()) - 1; l >= 0; --l) {
        const LayerParams& layer = params.trunk[l];
        const std::vector<double>& act = cache.activations[l + 1];
        std::vector<double> d_pre(layer.rows);
        for (int i = 0; i < layer.rows; ++i) {
            d_pre[i] = d_hidden[i] * (1.0 - act[i] * act[i]);
        }
        kernels::rank1_accumulate(grad.trunk[l].weights, d_pre, cache.activations[l], 1.0,
                                  layer.rows, layer.cols);
        kernels::axpy(grad.trunk[l].bias, d_pre, 1.0);
        if (l > 0) {
            d_hidden.assign(layer.cols, 0.0);
            kernels::matvec_transposed(layer.weights, d_pre, d_hidden, layer.rows, layer.cols);
        }
    }
}

void accumulate_head(const LayerParams& head, std::span<const double> delta,
                     std::span<const double> h, LayerParams& head_grad,
                     std::vector<double>& d_hidden) {
    kernels::rank1_accumulate(head_grad.weights, delta, h, 1.0, head.rows, head.cols);
    kernels::axpy(head_grad.bias, delta, 1.0);
    std::vector<double> back(head.cols);
    kernels::matvec_transposed(head.weights, delta, back, head.rows, head.cols);
    kernels::axpy(d_hidden, back, 1.0);
}

}  // namespace

std::vector<std::span<double>> param_views(ModelParams& params) {
    std::vector<std::span<double>> views;
    for (auto& layer : params.trunk) {
        views.emplace_back(layer.weights);
        views.emplace_back(layer.bias);
    }
    for (LayerParams* head : {&params.position_head, &params.orientation_head, &params.success_head}) {
        views.emplace_back(head->weights);
        views.emplace_back(head->bias);
    }
    return views;
}

std::vector<std::span<const double>> param_views(const ModelParams& params) {
    std::vector<std::span<const double>> views;
    for (const auto& layer : params.trunk) {
        views.emplace_back(layer.weights);
        views.emplace_back(layer.bias);
    }
    for (const LayerParams* head :
         {&params.position_head, &params.orientation_head, &params.success_head}) {
        views.emplace_back(head->weights);
        views.emplace_back(head->bias);
    }
    return views;
}

std::size_t parameter_count(const ModelParams& params) {
    std::size_t n = 0;
    for (const auto& v : param_views(params)) {
        n += v.size();
    }
    return n;
}

ModelGradient zero_like(const ModelParams& params) {
    ModelGradient g;
    g.arch = params.arch;
    g.trunk.reserve(params.trunk.size());
    for (const auto& layer : params.trunk) {
        g.trunk.push_back(make_layer(layer.rows, layer.cols));
    }
    g.position_head = make_layer(params.position_head.rows, params.position_head.cols);
    g.orientation_head = make_layer(params.orientation_head.rows, params.orientation_head.cols);
    g.success_head = make_layer(params.success_head.rows, params.success_head.cols);
    return g;
}

void add_scaled(ModelParams& params, const ModelGradient& grad, double scale) {
    auto dst = param_views(params);
    auto src = param_views(grad);
    for (std::size_t i = 0; i < dst.size(); ++i) {
        kernels::axpy(dst[i], src[i], scale);
    }
}

ModelParams init_params(const Architecture& arch, RngStream rng) {
    check_architecture(arch);
    ModelParams params;
    params.arch = arch;
    int prev = arch.input_dim;
    for (int h : arch.hidden) {
        params.trunk.push_back(make_layer(h, prev));
        prev = h;
    }
    params.position_head = make_layer(3, prev);
    params.orientation_head = make_layer(4, prev);
    params.success_head = make_layer(1, prev);
    for (auto& layer : params.trunk) {
        fill_uniform(layer, rng);
    }
    fill_uniform(params.position_head, rng);
    fill_uniform(params.orientation_head, rng);
    fill_uniform(params.success_head, rng);
    return params;
}

FeatureVector featurize(const DepthImage& depth, const Wrench& wrench, const ObjectState& object) {
    // Fixed normalization so every block is O(1): position in units of 0.15 m
    // (half the default workspace), velocity in units of 0.25 m/s.
    constexpr double kPositionScale = 1.0 / 0.15;
    constexpr double kVelocityScale = 1.0 / 0.25;
    FeatureVector f;
    f.values.reserve(depth.depths.size() + 12);
    for (double d : depth.depths) {
        f.values.push_back(d / depth.far_value);
    }
    f.values.insert(f.values.end(),
                    {wrench.fx, wrench.fy, wrench.fz, wrench.tx, wrench.ty, wrench.tz});
    f.values.insert(f.values.end(),
                    {object.position.x * kPositionScale, object.position.y * kPositionScale,
                     object.position.z * kPositionScale, object.linear_velocity.x * kVelocityScale,
                     object.linear_velocity.y * kVelocityScale,
                     object.linear_velocity.z * kVelocityScale});
    return f;
}

PredictorOutput forward(const ModelParams& params, const FeatureVector& input) {
    return forward_cached(params, input).out;
}

ModelGradient grad_pose_loss(const ModelParams& params, const FeatureVector& input,
                             const GraspPose& target, const LossWeights& w) {
    const ForwardCache cache = forward_cached(params, input);
    ModelGradient grad = zero_like(params);

    const PoseLossGradients pose_grad =
        loss_gradients(cache.out.position, cache.out.raw_orientation, target, w);
    const std::array<double, 3> dp{pose_grad.d_position.x * kPositionOutputGain,
                                   pose_grad.d_position.y * kPositionOutputGain,
                                   pose_grad.d_position.z * kPositionOutputGain};

    std::vector<double> d_hidden(cache.out.hidden.size(), 0.0);
    accumulate_head(params.position_head, dp, cache.out.hidden, grad.position_head, d_hidden);
    accumulate_head(params.orientation_head, pose_grad.d_raw_orientation, cache.out.hidden,
                    grad.orientation_head, d_hidden);
    backprop_trunk(params, cache, std::move(d_hidden), grad);
    return grad;
}

ModelGradient grad_success_objective(const ModelParams& params, const FeatureVector& input,
                                     double feedback) {
    const ForwardCache cache = forward_cached(params, input);
    ModelGradient grad = zero_like(params);

    const double s = cache.out.success_prob;
    const std::array<double, 1> delta{2.0 * (s - feedback) * s * (1.0 - s)};

    std::vector<double> d_hidden(cache.out.hidden.size(), 0.0);
    accumulate_head(params.success_head, delta, cache.out.hidden, grad.success_head, d_hidden);
    backprop_trunk(params, cache, std::move(d_hidden), grad);
    return grad;
}

ModelGradient finite_diff_gradient(const std::function<double(const ModelParams&)>& objective,
                                   const ModelParams& params, double step, bool parallel) {
    if (step <= 0.0) {
        throw std::invalid_argument("finite difference step must be > 0");
    }
    ModelGradient grad = zero_like(params);
    auto grad_views = param_views(grad);

    const std::size_t blocks = grad_views.size();
    std::vector<std::size_t> block_of;
    std::vector<std::size_t> offset_of;
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t o = 0; o < grad_views[b].size(); ++o) {
            block_of.push_back(b);
            offset_of.push_back(o);
        }
    }
    const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(block_of.size());

    if (parallel) {
#pragma omp parallel
        {
            ModelParams work = params;
            auto views = param_views(work);
#pragma omp for schedule(static)
            for (std::ptrdiff_t i = 0; i < total; ++i) {
                double& p = views[block_of[i]][offset_of[i]];
                const double original = p;
                p = original + step;
                const double f_plus = objective(work);
                p = original - step;
                const double f_minus = objective(work);
                p = original;
                grad_views[block_of[i]][offset_of[i]] = (f_plus - f_minus) / (2.0 * step);
            }
        }
    } else {
        ModelParams work = params;
        auto views = param_views(work);
        for (std::ptrdiff_t i = 0; i < total; ++i) {
            double& p = views[block_of[i]][offset_of[i]];
            const double original = p;
            p = original + step;
            const double f_plus = objective(work);
            p = original - step;
            const double f_minus = objective(work);
            p = original;
            grad_views[block_of[i]][offset_of[i]] = (f_plus - f_minus) / (2.0 * step);
        }
    }
    return grad;
}

double max_relative_error(const ModelGradient& analytic, const ModelGradient& numeric) {
    auto a_views = param_views(analytic);
    auto n_views = param_views(numeric);
    double worst = 0.0;
    for (std::size_t b = 0; b < a_views.size(); ++b) {
        for (std::size_t i = 0; i < a_views[b].size(); ++i) {
            const double a = a_views[b][i];
            const double n = n_views[b][i];
            const double denom = std::max({1.0, std::abs(a), std::abs(n)});
            worst = std::max(worst, std::abs(a - n) / denom);
        }
    }
    return worst;
}

GradCheckReport grad_check(const Architecture& arch, int instances, double step, double tolerance,
                           std::uint64_t seed) {
    GradCheckReport report;
    report.instances = instances;
    report.tolerance = tolerance;
    RngStream master(seed);

    for (int k = 0; k < instances; ++k) {
        RngStream inst = master.fork("gradcheck").fork(static_cast<std::uint64_t>(k));
        const ModelParams params = init_params(arch, inst.fork("params"));

        FeatureVector input;
        RngStream in_rng = inst.fork("input");
        input.values.resize(arch.input_dim);
        for (auto& v : input.values) {
            v = in_rng.next_uniform(-1.0, 1.0);
        }

        RngStream tgt = inst.fork("target");
        GraspPose target;
        target.position = {tgt.next_uniform(-0.2, 0.2), tgt.next_uniform(-0.2, 0.2),
                           tgt.next_uniform(0.0, 0.3)};
        target.orientation = normalize_quaternion(tgt.next_gaussian(), tgt.next_gaussian(),
                                                  tgt.next_gaussian(), tgt.next_gaussian())
                                 .q;
        const LossWeights w{tgt.next_uniform(0.25, 2.0)};
        const double feedback = tgt.next_uniform() < 0.5 ? 0.0 : 1.0;

        const ModelGradient pose_analytic = grad_pose_loss(params, input, target, w);
        const ModelGradient pose_numeric = finite_diff_gradient(
            [&](const ModelParams& p) {
                const PredictorOutput o = forward(p, input);
                return total_loss({o.position, o.orientation}, target, w);
            },
            params, step);
        report.max_rel_error_pose =
            std::max(report.max_rel_error_pose, max_relative_error(pose_analytic, pose_numeric));

        const ModelGradient succ_analytic = grad_success_objective(params, input, feedback);
        const ModelGradient succ_numeric = finite_diff_gradient(
            [&](const ModelParams& p) {
                const double r = forward(p, input).success_prob - feedback;
                return r * r;
            },
            params, step);
        report.max_rel_error_success =
            std::max(report.max_rel_error_success, max_relative_error(succ_analytic, succ_numeric));
    }
    report.pass =
        report.max_rel_error_pose < tolerance && report.max_rel_error_success < tolerance;
    return report;
}

namespace {

nlohmann::json layer_to_json(const LayerParams& layer) {
    return {{"rows", layer.rows}, {"cols", layer.cols}, {"weights", layer.weights},
            {"bias", layer.bias}};
}

LayerParams layer_from_json(const nlohmann::json& j) {
    LayerParams layer;
    layer.rows = j.at("rows").get<int>();
    layer.cols = j.at("cols").get<int>();
    layer.weights = j.at("weights").get<std::vector<double>>();
    layer.bias = j.at("bias").get<std::vector<double>>();
    if (layer.weights.size() != static_cast<std::size_t>(layer.rows) * layer.cols ||
        layer.bias.size() != static_cast<std::size_t>(layer.rows)) {
        throw std::invalid_argument("layer block sizes do not match declared shape");
    }
    return layer;
}

}  // namespace

std::string model_to_json(const ModelParams& params) {
    nlohmann::ordered_json doc;
    doc["format"] = "gsim-model";
    doc["version"] = 1;
    doc["architecture"] = {{"input_dim", params.arch.input_dim}, {"hidden", params.arch.hidden}};
    nlohmann::json trunk = nlohmann::json::array();
    for (const auto& layer : params.trunk) {
        trunk.push_back(layer_to_json(layer));
    }
    doc["trunk"] = std::move(trunk);
    doc["position_head"] = layer_to_json(params.position_head);
    doc["orientation_head"] = layer_to_json(params.orientation_head);
    doc["success_head"] = layer_to_json(params.success_head);
    return doc.dump();
}

ModelParams model_from_json(const std::string& text) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != "gsim-model" || doc.at("version").get<int>() != 1) {
        throw std::invalid_argument("unsupported model document");
    }
    ModelParams params;
    params.arch.input_dim = doc.at("architecture").at("input_dim").get<int>();
    params.arch.hidden = doc.at("architecture").at("hidden").get<std::vector<int>>();
    check_architecture(params.arch);
    for (const auto& j : doc.at("trunk")) {
        params.trunk.push_back(layer_from_json(j));
    }
    params.position_head = layer_from_json(doc.at("position_head"));
    params.orientation_head = layer_from_json(doc.at("orientation_head"));
    params.success_head = layer_from_json(doc.at("success_head"));
    return params;
}

}  // namespace gsim
