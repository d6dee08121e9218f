#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <utility>
#include <vector>

#include "gsim/learner.hpp"

using namespace gsim;

namespace {

const Architecture kArch{8 * 8 + 12, {16, 12}};

FeatureVector random_input(RngStream rng) {
    FeatureVector f;
    f.values.resize(kArch.input_dim);
    for (auto& v : f.values) {
        v = rng.next_uniform(-1, 1);
    }
    return f;
}

bool params_equal(const ModelParams& a, const ModelParams& b) {
    const auto va = param_views(a), vb = param_views(b);
    for (std::size_t i = 0; i < va.size(); ++i) {
        if (!std::equal(va[i].begin(), va[i].end(), vb[i].begin(), vb[i].end())) {
            return false;
        }
    }
    return true;
}

double success_objective(const ModelParams& p, const FeatureVector& input, double feedback) {
    const double r = forward(p, input).success_prob - feedback;
    return r * r;
}

}  // namespace

TEST_CASE("self_label only from successes, pose passed through exactly") {
    const GraspPose executed{{0.1, 0.2, 0.3}, UnitQuaternion::from_axis_angle({0, 0, 1}, 0.5)};
    AttemptOutcome ok;
    ok.success = true;
    const auto label = self_label(ok, executed, 41);
    REQUIRE(label.has_value());
    CHECK(label->pose.position == executed.position);
    CHECK(label->pose.orientation == executed.orientation);
    CHECK(label->episode == 41);

    AttemptOutcome bad;
    bad.success = false;
    CHECK(!self_label(bad, executed, 42).has_value());
}

TEST_CASE("ssl_update: eta 0 identity, zero-residual identity, objective non-increase") {
    const ModelParams params = init_params(kArch, RngStream(51));
    const FeatureVector input = random_input(RngStream(52));

    CHECK(params_equal(ssl_update(params, input, 1.0, 0.0), params));

    const double s = forward(params, input).success_prob;
    CHECK(params_equal(ssl_update(params, input, s, 1e-3), params));

    // documented backtracking protocol: start at 1e-3, halve on increase
    for (double feedback : {0.0, 1.0}) {
        const double before = success_objective(params, input, feedback);
        double eta = 1e-3;
        int halvings = 0;
        while (true) {
            const ModelParams next = ssl_update(params, input, feedback, eta);
            if (success_objective(next, input, feedback) <= before) {
                break;
            }
            eta *= 0.5;
            ++halvings;
            REQUIRE(halvings < 20);
        }
        CHECK(halvings == 0);  // the smooth objective accepts the full step
    }
}

TEST_CASE("pose_update: eta 0 identity and self-label fixpoint") {
    const ModelParams params = init_params(kArch, RngStream(53));
    const FeatureVector input = random_input(RngStream(54));
    const PredictorOutput out = forward(params, input);

    Hyperparams hp;
    hp.eta = 0.0;
    const PseudoLabel off{{{0.3, 0.1, 0.2}, UnitQuaternion::identity()}, 1};
    CHECK(params_equal(pose_update(params, input, off, hp), params));

    // a label equal to the current prediction moves nothing
    hp.eta = 1e-3;
    const PseudoLabel self{{out.position, out.orientation}, 2};
    CHECK(params_equal(pose_update(params, input, self, hp), params));
}

TEST_CASE("pose_update drives the loss below 10% of initial within 5000 steps") {
    ModelParams params = init_params(kArch, RngStream(55));
    const FeatureVector input = random_input(RngStream(56));
    const GraspPose target{{0.12, -0.08, 0.2}, UnitQuaternion::from_axis_angle({0, 0, 1}, 0.4)};
    Hyperparams hp;
    hp.eta = 1e-2;

    const auto loss_now = [&](const ModelParams& p) {
        const PredictorOutput o = forward(p, input);
        return total_loss({o.position, o.orientation}, target, hp.loss_weights);
    };
    const double initial = loss_now(params);
    REQUIRE(initial > 0.0);
    bool converged = false;
    const PseudoLabel label{target, 0};
    for (int step = 0; step < 5000; ++step) {
        params = pose_update(params, input, label, hp);
        if (loss_now(params) < 0.1 * initial) {
            converged = true;
            break;
        }
    }
    CHECK(converged);
}

TEST_CASE("supervised_pretrain: zero epochs identity, epoch loss non-increasing") {
    const ModelParams params = init_params(kArch, RngStream(57));
    RngStream data_rng(58);
    std::vector<std::pair<FeatureVector, GraspPose>> dataset;
    for (int i = 0; i < 12; ++i) {
        FeatureVector f = random_input(data_rng.fork(i));
        const GraspPose target{{data_rng.next_uniform(-0.1, 0.1), data_rng.next_uniform(-0.1, 0.1),
                                data_rng.next_uniform(0.1, 0.2)},
                               UnitQuaternion::from_axis_angle({0, 0, 1}, data_rng.next_uniform(-0.2, 0.2))};
        dataset.emplace_back(std::move(f), target);
    }

    Hyperparams hp;
    hp.pretrain_epochs = 0;
    CHECK(params_equal(supervised_pretrain(params, dataset, hp), params));

    hp.pretrain_epochs = 8;
    std::vector<double> epoch_losses;
    supervised_pretrain(params, dataset, hp, &epoch_losses);
    REQUIRE(epoch_losses.size() == 8);
    for (std::size_t e = 1; e < epoch_losses.size(); ++e) {
        CHECK(epoch_losses[e] <= epoch_losses[e - 1]);
    }

    CHECK_THROWS_AS(supervised_pretrain(params, {}, hp), std::invalid_argument);
}

TEST_CASE("reward_baseline_update contracts") {
    const ModelParams params = init_params(kArch, RngStream(59));
    const FeatureVector input = random_input(RngStream(60));
    Hyperparams hp;
    hp.epsilon_explore = 0.0;

    // no exploration, no reward: identity
    RngStream rng_a(61);
    CHECK(params_equal(reward_baseline_update(params, input, 0.0, hp, rng_a), params));

    // no exploration, reward: equals the ssl step bitwise
    RngStream rng_b(61);
    const ModelParams rewarded = reward_baseline_update(params, input, 1.0, hp, rng_b);
    CHECK(params_equal(rewarded, ssl_update(params, input, 1.0, hp.eta)));

    // exploration is deterministic per stream
    hp.epsilon_explore = 1.0;
    RngStream rng_c(62), rng_d(62);
    const ModelParams e1 = reward_baseline_update(params, input, 0.0, hp, rng_c);
    const ModelParams e2 = reward_baseline_update(params, input, 0.0, hp, rng_d);
    CHECK(params_equal(e1, e2));
    CHECK(!params_equal(e1, params));
    // exploration touches heads only
    for (std::size_t l = 0; l < params.trunk.size(); ++l) {
        CHECK(e1.trunk[l].weights == params.trunk[l].weights);
    }
}

TEST_CASE("Learner: frozen kind never changes parameters, ssl counts labels") {
    const ModelParams base = init_params(kArch, RngStream(63));
    const FeatureVector input = random_input(RngStream(64));
    AttemptOutcome success;
    success.success = true;
    AttemptOutcome failure;
    failure.success = false;
    const GraspPose executed{{0.1, 0.0, 0.15}, UnitQuaternion::identity()};

    Learner frozen(LearnerKind::supervised_frozen, base, Hyperparams{}, RngStream(65));
    for (int i = 0; i < 100; ++i) {
        frozen.observe(input, i % 2 ? success : failure, executed, i);
    }
    CHECK(params_equal(frozen.params(), base));
    CHECK(frozen.pseudo_labels_emitted() == 0);

    Learner ssl(LearnerKind::ssl_online, base, Hyperparams{}, RngStream(66));
    ssl.observe(input, success, executed, 1);
    ssl.observe(input, failure, executed, 2);
    ssl.observe(input, success, executed, 3);
    CHECK(ssl.pseudo_labels_emitted() == 2);
    CHECK(!params_equal(ssl.params(), base));
}
