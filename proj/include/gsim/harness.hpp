#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gsim/config.hpp"
#include "gsim/learner.hpp"
#include "gsim/predictor.hpp"
#include "gsim/world.hpp"

namespace gsim {

// One grasp attempt, fully replayable. wall_ms is measured but never
// serialized: log files must be byte-identical across runs.
struct EpisodeRecord {
    int episode = 0;  // 1-based
    int retries = 0;
    ObjectState object;  // state at (final) prediction time
    double depth_min = 0.0;
    double depth_mean = 0.0;
    std::vector<double> observation;  // flattened depth, kept only when logging observations
    GraspPose predicted;
    GraspPose executed;
    GraspPose oracle;  // at closure
    double success_prob = 0.0;  // S(G) before any update
    AttemptOutcome outcome;
    double stability = 0.0;
    double loss_position = 0.0;
    double loss_orientation = 0.0;
    double loss_total = 0.0;
    bool pseudo_labeled = false;
    double wall_ms = 0.0;
};

struct MetricsSummary {
    int episodes = 0;
    double overall_success_rate = 0.0;
    std::vector<double> rolling;  // trailing mean over min(i, rolling_window) episodes
    std::optional<int> adaptation_episode;  // 1-based; nullopt = not reached
    double final_window_rate = 0.0;
    int final_window = 0;
};

// Smallest 1-based episode index e >= window whose trailing window of size
// `window` has a success fraction >= rate; nullopt when never reached.
std::optional<int> adaptation_time(const std::vector<bool>& successes, double rate, int window);

MetricsSummary compute_metrics(std::span<const EpisodeRecord> records, const MetricsConfig& cfg);

struct ExperimentResult {
    std::vector<EpisodeRecord> records;
    MetricsSummary metrics;
    double tau_threshold = 0.0;  // value actually used
    std::int64_t pseudo_labels = 0;
    double mean_decision_ms = 0.0;
    ModelParams initial_params;
    ModelParams final_params;
};

// tau_threshold default: 4x the median stability metric of 100 oracle grasps
// on the static scene with the configured noise. Uses a fixed internal seed so
// every run of a given config shares the same threshold.
double calibrate_tau_threshold(const RunConfig& config);

std::vector<std::pair<FeatureVector, GraspPose>> make_pretrain_dataset(const RunConfig& config);

// Seeded init plus the shared supervised burn-in on the static scene (skipped
// when pretrain_epochs is 0). Every learner kind starts from this.
ModelParams make_base_params(const RunConfig& config);

// Caches make_base_params by seed for multi-run drivers.
class BaseParamsCache {
public:
    const ModelParams& get(const RunConfig& config);

private:
    std::map<std::uint64_t, ModelParams> by_seed_;
};

ExperimentResult run_experiment(const RunConfig& config);
ExperimentResult run_experiment(const RunConfig& config, BaseParamsCache& cache);

// episodes.jsonl, curve.csv, summary.json under config.out_dir.
void write_experiment_files(const RunConfig& config, const ExperimentResult& result);

struct CompareRow {
    LearnerKind learner;
    std::uint64_t seed = 0;
    double final_window_rate = 0.0;
    std::optional<int> adaptation_episode;
};

struct CompareTable {
    std::vector<CompareRow> rows;
    std::vector<std::pair<LearnerKind, double>> means;  // mean final-window rate per learner
};

// Identical scenario and seed list per learner. Writes compare.csv plus one
// run directory per (learner, seed) under out_dir.
CompareTable compare_learners(const RunConfig& config);

struct SweepRow {
    LearnerKind learner;
    double speed = 0.0;
    double mean_final_rate = 0.0;
};

// One experiment per (learner, speed, seed); the run seed is the base seed
// offset by the speed index. Writes sweep.csv (one row per learner x speed)
// and sweep_runs.csv (per seed).
std::vector<SweepRow> velocity_sweep(const RunConfig& config, std::span<const double> speeds);

struct ReportResult {
    int episodes = 0;
    MetricsSummary metrics;
    bool records_consistent = false;  // logged success == criterion recomputed from logged fields
    bool summary_matches = false;     // recomputed summary == stored summary.json
    std::string detail;
};

// Recomputes everything from a run directory's episodes.jsonl and checks it
// against summary.json.
ReportResult report_run_dir(const std::string& dir);

// stdout helpers shared by the CLI
void print_summary(const RunConfig& config, const ExperimentResult& result);
void print_compare_table(const RunConfig& config, const CompareTable& table);

}  // namespace gsim
