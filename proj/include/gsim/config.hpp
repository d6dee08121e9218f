#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsim/learner.hpp"
#include "gsim/sensing.hpp"
#include "gsim/world.hpp"

namespace gsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scenario { static_scene, dynamic_linear, dynamic_sliding, dynamic_rotating };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);
std::string to_string(LearnerKind k);
LearnerKind learner_from_string(const std::string& name);

struct ShapeConfig {
    std::string kind = "mixed";  // mixed | sphere | box
    double sphere_radius_min = 0.03;
    double sphere_radius_max = 0.06;
    double box_half_min = 0.025;
    double box_half_max = 0.05;
};

struct WorldConfig {
    ShapeConfig shape;
    double speed = 0.13;                // linear/sliding object speed, m/s
    Vec3 linear_direction{1.0, 0.0, 0.0};
    double t_change = 1.0;              // sliding redraw period, s
    double angular_speed = 0.8;         // rotating scenario, rad/s
    double closure_latency = 0.15;      // s between prediction and closure
    double dt = 0.05;                   // integration step, s
    double observe_time = 0.25;         // s from spawn to observation
    double workspace = 0.3;             // spawn square side, m
    GraspTolerances tolerances;
    bool tau_from_config = false;       // false: calibrate tau_threshold at startup
    GripModel grip;
    NoiseModel noise{0.002, 0.05, 0.05, 0.008, 0.08};
    CameraModel camera;
};

struct MetricsConfig {
    double adapt_rate = 0.7;
    int adapt_window = 50;
    int rolling_window = 50;
    int final_window = 100;
};

struct RunConfig {
    Scenario scenario = Scenario::dynamic_linear;
    int episodes = 500;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    LearnerKind learner = LearnerKind::ssl_online;
    std::vector<LearnerKind> learners{LearnerKind::ssl_online, LearnerKind::supervised_frozen,
                                      LearnerKind::reward_baseline};
    Hyperparams hyper;
    WorldConfig world;
    MetricsConfig metrics;
    int depth_res = 32;
    std::vector<int> hidden{64, 32};
    std::string out_dir;  // resolved by the CLI: --out, config, GRASP_SSL_OUT, then "out"
    bool log_observations = false;
    std::vector<double> sweep_speeds{0.0, 0.05, 0.10, 0.15, 0.20};
};

RunConfig default_config();

// Strict parse: unknown keys and malformed values raise ConfigError naming the
// offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

void validate(const RunConfig& config);

}  // namespace gsim
