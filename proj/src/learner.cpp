#include "gsim/learner.hpp"

#include <stdexcept>

namespace gsim {

std::optional<PseudoLabel> self_label(const AttemptOutcome& outcome, const GraspPose& executed_pose,
                                      std::int64_t episode) {
    if (!outcome.success) {
        return std::nullopt;
    }
    return PseudoLabel{executed_pose, episode};
}

ModelParams ssl_update(const ModelParams& params, const FeatureVector& input, double feedback,
                       double eta) {
    ModelParams next = params;
    const ModelGradient grad = grad_success_objective(params, input, feedback);
    add_scaled(next, grad, -eta);
    return next;
}

ModelParams pose_update(const ModelParams& params, const FeatureVector& input,
                        const PseudoLabel& label, const Hyperparams& hp) {
    ModelParams next = params;
    const ModelGradient grad = grad_pose_loss(params, input, label.pose, hp.loss_weights);
    add_scaled(next, grad, -hp.eta);
    return next;
}

ModelParams supervised_pretrain(ModelParams params,
                                std::span<const std::pair<FeatureVector, GraspPose>> dataset,
                                const Hyperparams& hp, std::vector<double>* epoch_losses) {
    if (dataset.empty()) {
        throw std::invalid_argument("pretrain dataset is empty");
    }
    for (int epoch = 0; epoch < hp.pretrain_epochs; ++epoch) {
        if (epoch_losses) {
            double mean = 0.0;
            for (const auto& [input, target] : dataset) {
                const PredictorOutput out = forward(params, input);
                mean += total_loss({out.position, out.orientation}, target, hp.loss_weights);
            }
            epoch_losses->push_back(mean / static_cast<double>(dataset.size()));
        }
        for (const auto& [input, target] : dataset) {
            const ModelGradient grad = grad_pose_loss(params, input, target, hp.loss_weights);
            add_scaled(params, grad, -hp.eta);
        }
    }
    return params;
}

ModelParams reward_baseline_update(const ModelParams& params, const FeatureVector& input,
                                   double feedback, const Hyperparams& hp, RngStream& rng) {
    ModelParams next = params;
    if (hp.epsilon_explore > 0.0 && rng.next_uniform() < hp.epsilon_explore) {
        constexpr double kExploreSigma = 0.01;
        for (LayerParams* head :
             {&next.position_head, &next.orientation_head, &next.success_head}) {
            for (auto& w : head->weights) {
                w += kExploreSigma * rng.next_gaussian();
            }
            for (auto& b : head->bias) {
                b += kExploreSigma * rng.next_gaussian();
            }
        }
    }
    if (feedback == 1.0) {
        next = ssl_update(next, input, feedback, hp.eta);
    }
    return next;
}

void Learner::observe(const FeatureVector& input, const AttemptOutcome& outcome,
                      const GraspPose& executed_pose, std::int64_t episode) {
    const double feedback = outcome.success ? 1.0 : 0.0;
    switch (kind_) {
        case LearnerKind::supervised_frozen:
            return;
        case LearnerKind::ssl_online: {
            if (const auto label = self_label(outcome, executed_pose, episode)) {
                const ModelGradient grad = grad_pose_loss(params_, input, label->pose, hp_.loss_weights);
                add_scaled(params_, grad, -hp_.eta);
                ++labels_;
            }
            const ModelGradient grad = grad_success_objective(params_, input, feedback);
            add_scaled(params_, grad, -hp_.eta);
            return;
        }
        case LearnerKind::reward_baseline:
            params_ = reward_baseline_update(params_, input, feedback, hp_, explore_);
            return;
    }
}

}  // namespace gsim
