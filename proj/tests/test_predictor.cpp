#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "gsim/predictor.hpp"

using namespace gsim;

namespace {

const Architecture kSmallArch{8 * 8 + 12, {16, 12}};

FeatureVector random_input(const Architecture& arch, RngStream rng) {
    FeatureVector f;
    f.values.resize(arch.input_dim);
    for (auto& v : f.values) {
        v = rng.next_uniform(-1, 1);
    }
    return f;
}

bool params_equal(const ModelParams& a, const ModelParams& b) {
    const auto va = param_views(a), vb = param_views(b);
    if (va.size() != vb.size()) {
        return false;
    }
    for (std::size_t i = 0; i < va.size(); ++i) {
        if (!std::equal(va[i].begin(), va[i].end(), vb[i].begin(), vb[i].end())) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("init_params determinism, zero biases, bounded weights") {
    const ModelParams a = init_params(kSmallArch, RngStream(3));
    const ModelParams b = init_params(kSmallArch, RngStream(3));
    CHECK(params_equal(a, b));

    for (const auto& layer : a.trunk) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.cols));
        for (double w : layer.weights) {
            CHECK(std::abs(w) <= bound);
        }
        for (double bia : layer.bias) {
            CHECK(bia == 0.0);
        }
    }
    for (double w : a.success_head.weights) {
        CHECK(std::abs(w) <= 1.0 / std::sqrt(12.0));
    }
    CHECK(a.success_head.bias[0] == 0.0);

    CHECK_THROWS_AS(init_params(Architecture{0, {4}}, RngStream(0)), std::invalid_argument);
    CHECK_THROWS_AS(init_params(Architecture{8, {}}, RngStream(0)), std::invalid_argument);
}

TEST_CASE("featurize layout, scaling, and purity") {
    DepthImage depth;
    depth.width = 4;
    depth.height = 4;
    depth.far_value = 2.0;
    depth.depths.assign(16, 2.0);  // all far
    const ObjectState origin_object{};
    const FeatureVector f = featurize(depth, Wrench{}, origin_object);
    REQUIRE(f.values.size() == 16 + 12);
    for (int i = 0; i < 16; ++i) {
        CHECK(f.values[i] == 1.0);  // depth scaled by 1/far
    }
    for (int i = 16; i < 28; ++i) {
        CHECK(f.values[i] == 0.0);
    }

    DepthImage d32;
    d32.width = 32;
    d32.height = 32;
    d32.depths.assign(1024, 0.5);
    CHECK(featurize(d32, Wrench{}, origin_object).values.size() == 1036);

    const FeatureVector again = featurize(depth, Wrench{}, origin_object);
    CHECK(again.values == f.values);
}

TEST_CASE("forward: all-zero params give sigma(0) and the identity fallback") {
    ModelParams zero = zero_like(init_params(kSmallArch, RngStream(4)));
    const FeatureVector input = random_input(kSmallArch, RngStream(5));
    const PredictorOutput out = forward(zero, input);
    CHECK(out.success_prob == 0.5);
    CHECK(out.orientation_degenerate);
    CHECK(out.orientation == UnitQuaternion::identity());
    CHECK(out.position.x == 0.0);
}

TEST_CASE("forward: finite outputs, bounded success, unit orientation") {
    RngStream rng(6);
    for (int i = 0; i < 50; ++i) {
        const ModelParams params = init_params(kSmallArch, rng.fork(i));
        const FeatureVector input = random_input(kSmallArch, rng.fork(1000 + i));
        const PredictorOutput out = forward(params, input);
        CHECK(std::isfinite(out.position.x));
        CHECK(std::isfinite(out.position.y));
        CHECK(std::isfinite(out.position.z));
        CHECK(out.success_prob > 0.0);
        CHECK(out.success_prob < 1.0);
        const double n = std::sqrt(out.orientation.w * out.orientation.w +
                                   out.orientation.x * out.orientation.x +
                                   out.orientation.y * out.orientation.y +
                                   out.orientation.z * out.orientation.z);
        CHECK(std::abs(n - 1.0) <= 1e-9);
    }

    const ModelParams params = init_params(kSmallArch, RngStream(9));
    FeatureVector bad;
    bad.values.assign(10, 0.0);
    CHECK_THROWS_AS(forward(params, bad), std::invalid_argument);
}

TEST_CASE("grad_pose_loss special cases") {
    const ModelParams params = init_params(kSmallArch, RngStream(10));
    const FeatureVector input = random_input(kSmallArch, RngStream(11));
    const PredictorOutput out = forward(params, input);

    // target equal to the forward output: the whole pose gradient vanishes
    const GraspPose self_target{out.position, out.orientation};
    const ModelGradient g = grad_pose_loss(params, input, self_target, {1.0});
    for (const auto& view : param_views(g)) {
        for (double v : view) {
            CHECK(v == 0.0);
        }
    }

    // lambda = 0: orientation head gradients all zero, position head nonzero
    const GraspPose other{{0.2, -0.1, 0.4}, UnitQuaternion::from_axis_angle({0, 0, 1}, 0.7)};
    const ModelGradient g0 = grad_pose_loss(params, input, other, {0.0});
    for (double v : g0.orientation_head.weights) {
        CHECK(v == 0.0);
    }
    double pos_norm = 0.0;
    for (double v : g0.position_head.weights) {
        pos_norm += v * v;
    }
    CHECK(pos_norm > 0.0);
}

TEST_CASE("grad_success_objective special cases") {
    const ModelParams params = init_params(kSmallArch, RngStream(12));
    const FeatureVector input = random_input(kSmallArch, RngStream(13));
    const PredictorOutput out = forward(params, input);

    // residual-zero: feeding the current probability back gives a zero gradient
    const ModelGradient g = grad_success_objective(params, input, out.success_prob);
    for (const auto& view : param_views(g)) {
        for (double v : view) {
            CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
        }
    }

    // sign of d/db_S is positive when success_prob > feedback
    const ModelGradient g0 = grad_success_objective(params, input, 0.0);
    CHECK(g0.success_head.bias[0] > 0.0);
    const ModelGradient g1 = grad_success_objective(params, input, 1.0);
    CHECK(g1.success_head.bias[0] < 0.0);
}

TEST_CASE("finite_diff_gradient basics and parallel/serial equality") {
    const ModelParams params = init_params(kSmallArch, RngStream(14));

    const ModelGradient flat =
        finite_diff_gradient([](const ModelParams&) { return 3.5; }, params, 1e-6);
    for (const auto& view : param_views(flat)) {
        for (double v : view) {
            CHECK(v == 0.0);
        }
    }

    // quadratic objective: gradient equals the parameter value
    const auto quad = [](const ModelParams& p) {
        double acc = 0.0;
        for (const auto& view : param_views(p)) {
            for (double v : view) {
                acc += 0.5 * v * v;
            }
        }
        return acc;
    };
    const ModelGradient g_par = finite_diff_gradient(quad, params, 1e-6, true);
    const ModelGradient g_ser = finite_diff_gradient(quad, params, 1e-6, false);
    const auto pv = param_views(params);
    const auto gv = param_views(g_par);
    const auto sv = param_views(g_ser);
    for (std::size_t b = 0; b < pv.size(); ++b) {
        for (std::size_t i = 0; i < pv[b].size(); ++i) {
            CHECK(gv[b][i] == doctest::Approx(pv[b][i]).epsilon(1e-6));
            CHECK(gv[b][i] == sv[b][i]);  // bitwise
        }
    }

    CHECK_THROWS_AS(finite_diff_gradient(quad, params, 0.0), std::invalid_argument);
}

TEST_CASE("grad_check: both objectives match finite differences on 50 instances") {
    const GradCheckReport report = grad_check(kSmallArch, 50, 1e-6, 1e-4, 0);
    CHECK(report.pass);
    CHECK(report.max_rel_error_pose < 1e-4);
    CHECK(report.max_rel_error_success < 1e-4);
    CHECK(report.instances == 50);
}

TEST_CASE("model JSON round trip is exact") {
    const ModelParams params = init_params(kSmallArch, RngStream(15));
    const std::string doc = model_to_json(params);
    CHECK(doc.find("\"format\":\"gsim-model\"") != std::string::npos);
    CHECK(doc.find("\"version\":1") != std::string::npos);
    const ModelParams back = model_from_json(doc);
    CHECK(params_equal(params, back));
    CHECK(back.arch == params.arch);

    CHECK_THROWS(model_from_json("{\"format\":\"other\"}"));
}

TEST_CASE("parameter traversal order is stable and complete") {
    const ModelParams params = init_params(kSmallArch, RngStream(16));
    const std::size_t n = parameter_count(params);
    std::size_t expected = 0;
    for (const auto& layer : params.trunk) {
        expected += layer.weights.size() + layer.bias.size();
    }
    expected += params.position_head.weights.size() + 3;
    expected += params.orientation_head.weights.size() + 4;
    expected += params.success_head.weights.size() + 1;
    CHECK(n == expected);
}
