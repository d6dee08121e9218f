#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gsim/predictor.hpp"

namespace gsim {

struct Hyperparams {
    double eta = 1e-3;             // learning rate, > 0
    LossWeights loss_weights{1.0};
    double epsilon_explore = 0.1;  // reward-baseline exploration probability, in [0, 1]
    int pretrain_epochs = 250;
    int pretrain_samples = 256;
};

enum class LearnerKind { ssl_online, supervised_frozen, reward_baseline };

// An executed pose promoted to a training target because the attempt worked.
struct PseudoLabel {
    GraspPose pose;
    std::int64_t episode = 0;
};

// Some(label) iff the attempt succeeded; the label pose is the executed pose,
// unsmoothed.
std::optional<PseudoLabel> self_label(const AttemptOutcome& outcome, const GraspPose& executed_pose,
                                      std::int64_t episode);

// One gradient step on (success_prob - feedback)^2.
ModelParams ssl_update(const ModelParams& params, const FeatureVector& input, double feedback,
                       double eta);

// One gradient step on the pose loss against a pseudo-label.
ModelParams pose_update(const ModelParams& params, const FeatureVector& input,
                        const PseudoLabel& label, const Hyperparams& hp);

// Epochwise single-sample passes of pose_update over the dataset; the result
// is what the frozen supervised learner runs with. Optionally reports the mean
// total_loss per epoch (measured before that epoch's updates).
ModelParams supervised_pretrain(ModelParams params,
                                std::span<const std::pair<FeatureVector, GraspPose>> dataset,
                                const Hyperparams& hp, std::vector<double>* epoch_losses = nullptr);

// Reward-gated baseline: with probability epsilon_explore adds N(0, 0.01^2)
// exploration noise to the head weights, then applies the ssl_update step only
// when feedback = 1. A simplified stand-in for reward-driven learning, not a
// deep-RL reimplementation.
ModelParams reward_baseline_update(const ModelParams& params, const FeatureVector& input,
                                   double feedback, const Hyperparams& hp, RngStream& rng);

// Owns the parameters of one learning strategy and applies its per-attempt
// online rule. Single writer; distinct instances share nothing.
class Learner {
public:
    Learner(LearnerKind kind, ModelParams initial, Hyperparams hp, RngStream explore_stream)
        : kind_(kind), params_(std::move(initial)), hp_(hp), explore_(explore_stream) {}

    LearnerKind kind() const { return kind_; }
    const ModelParams& params() const { return params_; }
    const Hyperparams& hyperparams() const { return hp_; }
    std::int64_t pseudo_labels_emitted() const { return labels_; }

    // One completed attempt: pose step on a pseudo-label first (when one
    // exists), then the success-objective step. Frozen learners do nothing.
    void observe(const FeatureVector& input, const AttemptOutcome& outcome,
                 const GraspPose& executed_pose, std::int64_t episode);

private:
    LearnerKind kind_;
    ModelParams params_;
    Hyperparams hp_;
    RngStream explore_;
    std::int64_t labels_ = 0;
};

}  // namespace gsim
