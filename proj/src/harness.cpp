#include "gsim/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace gsim {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kCalibrationSeed = 0x5eedca11b8a7e5ull;

std::string fmt(double v) {
    // shortest round-trip representation, locale independent
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

MotionPattern pattern_for(const RunConfig& cfg) {
    MotionPattern p;
    switch (cfg.scenario) {
        case Scenario::static_scene:
            p.kind = MotionPattern::Kind::stationary;
            break;
        case Scenario::dynamic_linear:
            p.kind = MotionPattern::Kind::linear;
            p.velocity = normalized(cfg.world.linear_direction) * cfg.world.speed;
            break;
        case Scenario::dynamic_sliding:
            p.kind = MotionPattern::Kind::sliding;
            p.speed = cfg.world.speed;
            p.t_change = cfg.world.t_change;
            break;
        case Scenario::dynamic_rotating:
            p.kind = MotionPattern::Kind::rotating;
            p.angular_velocity = {0.0, 0.0, cfg.world.angular_speed};
            break;
    }
    return p;
}

// Draw order is fixed: shape kind, dimensions, x, y, yaw, sliding direction.
ObjectState spawn_object(const RunConfig& cfg, const MotionPattern& pattern, RngStream rng) {
    const ShapeConfig& sc = cfg.world.shape;
    ObjectState obj;
    const bool sphere =
        sc.kind == "sphere" || (sc.kind == "mixed" && rng.next_uniform() < 0.5);
    if (sphere) {
        obj.shape.kind = ShapeDescriptor::Kind::sphere;
        obj.shape.radius = rng.next_uniform(sc.sphere_radius_min, sc.sphere_radius_max);
    } else {
        obj.shape.kind = ShapeDescriptor::Kind::box;
        obj.shape.half_extents = {rng.next_uniform(sc.box_half_min, sc.box_half_max),
                                  rng.next_uniform(sc.box_half_min, sc.box_half_max),
                                  rng.next_uniform(sc.box_half_min, sc.box_half_max)};
    }
    const double half = 0.5 * cfg.world.workspace;
    obj.position = {rng.next_uniform(-half, half), rng.next_uniform(-half, half),
                    obj.shape.kind == ShapeDescriptor::Kind::sphere ? obj.shape.radius
                                                                    : obj.shape.half_extents.z};
    // Yaw stays within +-pi/16: spheres are yaw-symmetric in depth, so a wider
    // band would put the oracle orientation outside what any depth-driven
    // predictor can recover.
    constexpr double kYawBand = 3.141592653589793 / 16.0;
    obj.orientation =
        UnitQuaternion::from_axis_angle({0.0, 0.0, 1.0}, rng.next_uniform(-kYawBand, kYawBand));

    switch (pattern.kind) {
        case MotionPattern::Kind::linear:
            obj.linear_velocity = pattern.velocity;
            break;
        case MotionPattern::Kind::sliding: {
            const double theta = rng.next_uniform(0.0, 2.0 * 3.141592653589793);
            obj.linear_velocity = Vec3{std::cos(theta), std::sin(theta), 0.0} * pattern.speed;
            break;
        }
        case MotionPattern::Kind::rotating:
            obj.angular_velocity = pattern.angular_velocity;
            break;
        case MotionPattern::Kind::stationary:
            break;
    }
    return obj;
}

ObjectState advance(ObjectState state, const MotionPattern& pattern, double duration, double dt,
                    RngStream& rng) {
    const long long steps = std::llround(duration / dt);
    for (long long i = 0; i < steps; ++i) {
        state = step_object(state, pattern, dt, rng);
    }
    return state;
}

CameraModel camera_for(const RunConfig& cfg) {
    CameraModel cam = cfg.world.camera;
    cam.width = cfg.depth_res;
    cam.height = cfg.depth_res;
    return cam;
}

Architecture architecture_for(const RunConfig& cfg) {
    return Architecture{cfg.depth_res * cfg.depth_res + 12, cfg.hidden};
}

GraspTolerances tolerances_with_tau(const RunConfig& cfg, double tau) {
    GraspTolerances tol = cfg.world.tolerances;
    tol.tau_threshold = tau;
    return tol;
}

json pose_json(const GraspPose& p) {
    return {{"position", {p.position.x, p.position.y, p.position.z}},
            {"orientation", {p.orientation.w, p.orientation.x, p.orientation.y, p.orientation.z}}};
}

GraspPose pose_from_json(const json& j) {
    const auto& p = j.at("position");
    const auto& q = j.at("orientation");
    GraspPose pose;
    pose.position = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
    pose.orientation =
        normalize_quaternion(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                             q.at(3).get<double>())
            .q;
    return pose;
}

ordered_json header_json(const RunConfig& cfg, double tau) {
    ordered_json h;
    h["type"] = "header";
    h["format"] = "gsim-episodes";
    h["version"] = 1;
    h["scenario"] = to_string(cfg.scenario);
    h["learner"] = to_string(cfg.learner);
    h["seed"] = cfg.seed;
    h["episodes"] = cfg.episodes;
    h["eta"] = cfg.hyper.eta;
    h["lambda"] = cfg.hyper.loss_weights.lambda;
    h["epsilon_explore"] = cfg.hyper.epsilon_explore;
    h["pretrain_epochs"] = cfg.hyper.pretrain_epochs;
    h["pretrain_samples"] = cfg.hyper.pretrain_samples;
    h["speed"] = cfg.world.speed;
    h["r_pos"] = cfg.world.tolerances.r_pos;
    h["r_ang"] = cfg.world.tolerances.r_ang;
    h["tau_threshold"] = tau;
    h["adapt_rate"] = cfg.metrics.adapt_rate;
    h["adapt_window"] = cfg.metrics.adapt_window;
    h["rolling_window"] = cfg.metrics.rolling_window;
    h["final_window"] = cfg.metrics.final_window;
    return h;
}

ordered_json episode_json(const EpisodeRecord& r, bool log_observations) {
    ordered_json e;
    e["episode"] = r.episode;
    e["retries"] = r.retries;
    e["success"] = r.outcome.success;
    e["success_prob"] = r.success_prob;
    e["predicted"] = pose_json(r.predicted);
    e["executed"] = pose_json(r.executed);
    e["oracle"] = pose_json(r.oracle);
    e["position_error"] = r.outcome.position_error;
    e["orientation_error"] = r.outcome.orientation_error;
    e["stability"] = r.stability;
    e["quality"] = r.outcome.quality;
    e["losses"] = {{"position", r.loss_position},
                   {"orientation", r.loss_orientation},
                   {"total", r.loss_total}};
    e["pseudo_labeled"] = r.pseudo_labeled;
    ordered_json obj;
    obj["shape"] = r.object.shape.kind == ShapeDescriptor::Kind::sphere ? "sphere" : "box";
    if (r.object.shape.kind == ShapeDescriptor::Kind::sphere) {
        obj["radius"] = r.object.shape.radius;
    } else {
        obj["half_extents"] = {r.object.shape.half_extents.x, r.object.shape.half_extents.y,
                               r.object.shape.half_extents.z};
    }
    obj["position"] = {r.object.position.x, r.object.position.y, r.object.position.z};
    obj["velocity"] = {r.object.linear_velocity.x, r.object.linear_velocity.y,
                       r.object.linear_velocity.z};
    e["object"] = std::move(obj);
    e["observation"] = {{"depth_min", r.depth_min}, {"depth_mean", r.depth_mean}};
    if (log_observations) {
        e["observation"]["depth"] = r.observation;
    }
    return e;
}

ordered_json summary_json(const RunConfig& cfg, const ExperimentResult& res) {
    ordered_json s;
    s["scenario"] = to_string(cfg.scenario);
    s["learner"] = to_string(cfg.learner);
    s["seed"] = cfg.seed;
    s["episodes"] = res.metrics.episodes;
    s["overall_success_rate"] = res.metrics.overall_success_rate;
    s["final_window"] = res.metrics.final_window;
    s["final_window_success_rate"] = res.metrics.final_window_rate;
    if (res.metrics.adaptation_episode) {
        s["adaptation_episode"] = *res.metrics.adaptation_episode;
    } else {
        s["adaptation_episode"] = nullptr;
    }
    s["pseudo_labels"] = res.pseudo_labels;
    s["tau_threshold"] = res.tau_threshold;
    s["rolling"] = res.metrics.rolling;
    return s;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open output file: " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("failed writing output file: " + path.string());
    }
}

}  // namespace

std::optional<int> adaptation_time(const std::vector<bool>& successes, double rate, int window) {
    if (window < 1 || static_cast<int>(successes.size()) < window) {
        return std::nullopt;
    }
    int hits = 0;
    for (int i = 0; i < static_cast<int>(successes.size()); ++i) {
        hits += successes[i] ? 1 : 0;
        if (i >= window) {
            hits -= successes[i - window] ? 1 : 0;
        }
        if (i + 1 >= window &&
            static_cast<double>(hits) / window >= rate) {
            return i + 1;  // 1-based episode index
        }
    }
    return std::nullopt;
}

MetricsSummary compute_metrics(std::span<const EpisodeRecord> records, const MetricsConfig& cfg) {
    MetricsSummary m;
    m.episodes = static_cast<int>(records.size());
    m.final_window = cfg.final_window;

    std::vector<bool> successes(records.size());
    int total_hits = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        successes[i] = records[i].outcome.success;
        total_hits += successes[i] ? 1 : 0;
    }
    m.overall_success_rate = records.empty() ? 0.0 : static_cast<double>(total_hits) / records.size();

    m.rolling.resize(records.size());
    int hits = 0;
    for (int i = 0; i < static_cast<int>(records.size()); ++i) {
        hits += successes[i] ? 1 : 0;
        if (i >= cfg.rolling_window) {
            hits -= successes[i - cfg.rolling_window] ? 1 : 0;
        }
        const int span = std::min(i + 1, cfg.rolling_window);
        m.rolling[i] = static_cast<double>(hits) / span;
    }

    m.adaptation_episode = adaptation_time(successes, cfg.adapt_rate, cfg.adapt_window);

    const int fw = std::min<int>(cfg.final_window, static_cast<int>(records.size()));
    if (fw > 0) {
        int fw_hits = 0;
        for (std::size_t i = records.size() - fw; i < records.size(); ++i) {
            fw_hits += successes[i] ? 1 : 0;
        }
        m.final_window_rate = static_cast<double>(fw_hits) / fw;
    }
    return m;
}

double calibrate_tau_threshold(const RunConfig& config) {
    RunConfig cal_cfg = config;
    cal_cfg.scenario = Scenario::static_scene;
    const MotionPattern still = pattern_for(cal_cfg);
    const GraspTolerances tol = config.world.tolerances;

    RngStream cal(kCalibrationSeed);
    std::vector<double> samples;
    samples.reserve(100);
    for (int i = 0; i < 100; ++i) {
        RngStream rng = cal.fork(static_cast<std::uint64_t>(i));
        const ObjectState obj = spawn_object(cal_cfg, still, rng.fork("spawn"));
        const GraspPose oracle = oracle_grasp_pose(obj, config.world.grip.approach_offset);
        const GraspContacts contacts = contact_forces(oracle, obj, tol, config.world.grip,
                                                      config.world.noise, rng.fork("contacts"));
        const Wrench w = sense_wrench(contacts.summary, config.world.noise, rng.fork("wrench"));
        samples.push_back(stability_metric(w));
    }
    std::sort(samples.begin(), samples.end());
    const double median = 0.5 * (samples[49] + samples[50]);
    return 4.0 * median;
}

std::vector<std::pair<FeatureVector, GraspPose>> make_pretrain_dataset(const RunConfig& config) {
    RunConfig static_cfg = config;
    static_cfg.scenario = Scenario::static_scene;
    const MotionPattern still = pattern_for(static_cfg);
    const CameraModel camera = camera_for(config);
    // The burn-in phase is the idealized simulation stage: clean renders and
    // oracle labels. Sensor and motor noise only enter the online phase.
    const NoiseModel noiseless{};

    RngStream master(config.seed);
    RngStream base = master.fork("pretrain");
    std::vector<std::pair<FeatureVector, GraspPose>> dataset;
    dataset.reserve(config.hyper.pretrain_samples);
    for (int i = 0; i < config.hyper.pretrain_samples; ++i) {
        RngStream rng = base.fork(static_cast<std::uint64_t>(i));
        ObjectState obj = spawn_object(static_cfg, still, rng.fork("spawn"));
        const DepthImage depth = render_depth({obj}, camera, noiseless, rng.fork("render"));
        dataset.emplace_back(featurize(depth, Wrench{}, obj),
                             oracle_grasp_pose(obj, config.world.grip.approach_offset));
    }
    return dataset;
}

ModelParams make_base_params(const RunConfig& config) {
    RngStream master(config.seed);
    ModelParams params = init_params(architecture_for(config), master.fork("init"));
    if (config.hyper.pretrain_epochs > 0) {
        const auto dataset = make_pretrain_dataset(config);
        params = supervised_pretrain(std::move(params), dataset, config.hyper);
    }
    return params;
}

const ModelParams& BaseParamsCache::get(const RunConfig& config) {
    auto it = by_seed_.find(config.seed);
    if (it == by_seed_.end()) {
        it = by_seed_.emplace(config.seed, make_base_params(config)).first;
    }
    return it->second;
}

namespace {

ExperimentResult run_with_base(const RunConfig& cfg, ModelParams base) {
    validate(cfg);
    const MotionPattern pattern = pattern_for(cfg);
    const CameraModel camera = camera_for(cfg);
    const double tau =
        cfg.world.tau_from_config ? cfg.world.tolerances.tau_threshold : calibrate_tau_threshold(cfg);
    const GraspTolerances tol = tolerances_with_tau(cfg, tau);

    RngStream master(cfg.seed);
    ExperimentResult result;
    result.tau_threshold = tau;
    result.initial_params = base;

    Learner learner(cfg.learner, std::move(base), cfg.hyper, master.fork("explore"));
    RngStream episodes_stream = master.fork("episode");

    result.records.reserve(cfg.episodes);
    double decision_ms_total = 0.0;

    for (int ep = 1; ep <= cfg.episodes; ++ep) {
        RngStream ep_rng = episodes_stream.fork(static_cast<std::uint64_t>(ep));
        RngStream motion = ep_rng.fork("motion");
        ObjectState obj = spawn_object(cfg, pattern, ep_rng.fork("spawn"));
        obj = advance(std::move(obj), pattern, cfg.world.observe_time, cfg.world.dt, motion);

        EpisodeRecord rec;
        rec.episode = ep;

        FeatureVector features;
        GraspPose pose;
        GraspPose executed;
        AttemptOutcome outcome;
        ObjectState closure_state;

        for (int attempt = 0;; ++attempt) {
            const DepthImage depth = render_depth({obj}, camera, cfg.world.noise,
                                                  ep_rng.fork("render").fork(attempt));
            const Wrench idle =
                sense_wrench(ContactSummary{}, cfg.world.noise, ep_rng.fork("prewrench").fork(attempt));
            features = featurize(depth, idle, obj);

            const auto t0 = std::chrono::steady_clock::now();
            const PredictorOutput out = forward(learner.params(), features);
            const auto t1 = std::chrono::steady_clock::now();
            decision_ms_total += std::chrono::duration<double, std::milli>(t1 - t0).count();

            pose = {out.position, out.orientation};
            rec.success_prob = out.success_prob;
            rec.object = obj;
            rec.depth_min = *std::min_element(depth.depths.begin(), depth.depths.end());
            double sum = 0.0;
            for (double d : depth.depths) {
                sum += d;
            }
            rec.depth_mean = sum / static_cast<double>(depth.depths.size());
            if (cfg.log_observations) {
                rec.observation = depth.depths;
            }

            // Motor noise: what the arm reaches differs from the command, so a
            // successful attempt carries information the prediction alone does
            // not — pseudo-labels wrap the executed pose.
            executed = pose;
            if (cfg.world.noise.exec_pos_sigma > 0.0 || cfg.world.noise.exec_ang_sigma > 0.0) {
                RngStream motor = ep_rng.fork("motor").fork(attempt);
                executed.position += Vec3{motor.next_gaussian(), motor.next_gaussian(),
                                          motor.next_gaussian()} *
                                     cfg.world.noise.exec_pos_sigma;
                if (cfg.world.noise.exec_ang_sigma > 0.0) {
                    const Vec3 axis{motor.next_gaussian(), motor.next_gaussian(),
                                    motor.next_gaussian()};
                    const double angle = cfg.world.noise.exec_ang_sigma * motor.next_gaussian();
                    executed.orientation =
                        UnitQuaternion::from_axis_angle(axis, angle) * executed.orientation;
                }
            }

            closure_state =
                advance(obj, pattern, cfg.world.closure_latency, cfg.world.dt, motion);
            outcome = execute_grasp(executed, closure_state, tol, cfg.world.grip, cfg.world.noise,
                                    ep_rng.fork("execute").fork(attempt));

            // One regrasp when the sensed wrench crosses the stability
            // threshold: re-observe from where the object is now.
            if (attempt == 0 && needs_adjustment(stability_metric(outcome.wrench), tau)) {
                rec.retries = 1;
                obj = closure_state;
                continue;
            }
            break;
        }

        const auto label = self_label(outcome, executed, ep);
        rec.pseudo_labeled = label.has_value();

        const auto u0 = std::chrono::steady_clock::now();
        learner.observe(features, outcome, executed, ep);
        const auto u1 = std::chrono::steady_clock::now();
        rec.wall_ms = std::chrono::duration<double, std::milli>(u1 - u0).count();

        rec.predicted = pose;
        rec.executed = executed;
        rec.oracle = oracle_grasp_pose(closure_state, cfg.world.grip.approach_offset);
        rec.outcome = outcome;
        rec.stability = stability_metric(outcome.wrench);
        rec.loss_position = position_loss(pose.position, rec.oracle.position);
        rec.loss_orientation = orientation_loss(pose.orientation, rec.oracle.orientation);
        rec.loss_total = total_loss(pose, rec.oracle, cfg.hyper.loss_weights);
        result.records.push_back(std::move(rec));
    }

    result.metrics = compute_metrics(result.records, cfg.metrics);
    result.pseudo_labels = learner.pseudo_labels_emitted();
    result.mean_decision_ms = decision_ms_total / static_cast<double>(cfg.episodes);
    result.final_params = learner.params();
    return result;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config) {
    return run_with_base(config, make_base_params(config));
}

ExperimentResult run_experiment(const RunConfig& config, BaseParamsCache& cache) {
    return run_with_base(config, cache.get(config));
}

void write_experiment_files(const RunConfig& config, const ExperimentResult& result) {
    const fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }

    std::string jsonl = header_json(config, result.tau_threshold).dump() + "\n";
    for (const auto& rec : result.records) {
        jsonl += episode_json(rec, config.log_observations).dump() + "\n";
    }
    write_text_file(dir / "episodes.jsonl", jsonl);

    std::string csv = "episode,success,rolling\n";
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        csv += std::to_string(result.records[i].episode) + "," +
               (result.records[i].outcome.success ? "1" : "0") + "," +
               fmt(result.metrics.rolling[i]) + "\n";
    }
    write_text_file(dir / "curve.csv", csv);

    write_text_file(dir / "summary.json", summary_json(config, result).dump(2) + "\n");
}

CompareTable compare_learners(const RunConfig& config) {
    CompareTable table;
    BaseParamsCache cache;
    for (LearnerKind kind : config.learners) {
        double sum = 0.0;
        for (std::uint64_t seed : config.seeds) {
            RunConfig run_cfg = config;
            run_cfg.learner = kind;
            run_cfg.seed = seed;
            run_cfg.log_observations = false;
            run_cfg.out_dir = (fs::path(config.out_dir) / "runs" /
                               (to_string(kind) + "_seed" + std::to_string(seed)))
                                  .string();
            const ExperimentResult res = run_experiment(run_cfg, cache);
            write_experiment_files(run_cfg, res);
            table.rows.push_back(
                {kind, seed, res.metrics.final_window_rate, res.metrics.adaptation_episode});
            sum += res.metrics.final_window_rate;
        }
        table.means.emplace_back(kind, sum / static_cast<double>(config.seeds.size()));
    }

    std::string csv = "learner,seed,final_window_success_rate\n";
    for (const auto& row : table.rows) {
        csv += to_string(row.learner) + "," + std::to_string(row.seed) + "," +
               fmt(row.final_window_rate) + "\n";
    }
    for (const auto& [kind, mean] : table.means) {
        csv += to_string(kind) + ",mean," + fmt(mean) + "\n";
    }
    const fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    write_text_file(dir / "compare.csv", csv);
    return table;
}

std::vector<SweepRow> velocity_sweep(const RunConfig& config, std::span<const double> speeds) {
    std::vector<SweepRow> rows;
    BaseParamsCache cache;
    std::string runs_csv = "learner,speed,seed,final_window_success_rate\n";
    for (LearnerKind kind : config.learners) {
        for (std::size_t k = 0; k < speeds.size(); ++k) {
            double sum = 0.0;
            for (std::uint64_t seed : config.seeds) {
                RunConfig run_cfg = config;
                run_cfg.learner = kind;
                run_cfg.world.speed = speeds[k];
                run_cfg.seed = seed + k;  // base seed offset by speed index
                run_cfg.log_observations = false;
                const ExperimentResult res = run_experiment(run_cfg, cache);
                sum += res.metrics.final_window_rate;
                runs_csv += to_string(kind) + "," + fmt(speeds[k]) + "," +
                            std::to_string(run_cfg.seed) + "," + fmt(res.metrics.final_window_rate) +
                            "\n";
            }
            rows.push_back({kind, speeds[k], sum / static_cast<double>(config.seeds.size())});
        }
    }

    std::string csv = "learner,speed,mean_final_window_success_rate\n";
    for (const auto& row : rows) {
        csv += to_string(row.learner) + "," + fmt(row.speed) + "," + fmt(row.mean_final_rate) + "\n";
    }
    const fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    write_text_file(dir / "sweep.csv", csv);
    write_text_file(dir / "sweep_runs.csv", runs_csv);
    return rows;
}

ReportResult report_run_dir(const std::string& dir) {
    const fs::path jsonl_path = fs::path(dir) / "episodes.jsonl";
    std::ifstream in(jsonl_path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + jsonl_path.string());
    }

    ReportResult report;
    report.records_consistent = true;

    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("empty episode log: " + jsonl_path.string());
    }
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw IoError("bad header line in " + jsonl_path.string() + ": " + e.what());
    }
    const double r_pos = header.at("r_pos").get<double>();
    const double r_ang = header.at("r_ang").get<double>();
    const double tau = header.at("tau_threshold").get<double>();
    MetricsConfig metrics_cfg;
    metrics_cfg.adapt_rate = header.at("adapt_rate").get<double>();
    metrics_cfg.adapt_window = header.at("adapt_window").get<int>();
    metrics_cfg.rolling_window = header.at("rolling_window").get<int>();
    metrics_cfg.final_window = header.at("final_window").get<int>();

    std::vector<EpisodeRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        json e;
        try {
            e = json::parse(line);
        } catch (const json::exception& ex) {
            throw IoError("bad episode line in " + jsonl_path.string() + ": " + ex.what());
        }
        EpisodeRecord rec;
        rec.episode = e.at("episode").get<int>();
        rec.retries = e.at("retries").get<int>();
        rec.outcome.success = e.at("success").get<bool>();
        rec.outcome.position_error = e.at("position_error").get<double>();
        rec.outcome.orientation_error = e.at("orientation_error").get<double>();
        rec.outcome.quality = e.at("quality").get<double>();
        rec.stability = e.at("stability").get<double>();
        rec.success_prob = e.at("success_prob").get<double>();
        rec.predicted = pose_from_json(e.at("predicted"));

        const bool recomputed = rec.outcome.position_error <= r_pos &&
                                rec.outcome.orientation_error <= r_ang &&
                                !needs_adjustment(rec.stability, tau);
        if (recomputed != rec.outcome.success) {
            report.records_consistent = false;
            report.detail += "episode " + std::to_string(rec.episode) +
                             ": logged success does not match recomputed criterion\n";
        }
        records.push_back(std::move(rec));
    }

    report.episodes = static_cast<int>(records.size());
    report.metrics = compute_metrics(records, metrics_cfg);

    const fs::path summary_path = fs::path(dir) / "summary.json";
    std::ifstream sin(summary_path, std::ios::binary);
    if (!sin) {
        throw IoError("cannot open " + summary_path.string());
    }
    json stored;
    try {
        stored = json::parse(sin);
    } catch (const json::exception& e) {
        throw IoError("bad summary.json: " + std::string(e.what()));
    }
    report.summary_matches =
        stored.at("episodes").get<int>() == report.metrics.episodes &&
        stored.at("overall_success_rate").get<double>() == report.metrics.overall_success_rate &&
        stored.at("final_window_success_rate").get<double>() == report.metrics.final_window_rate &&
        stored.at("rolling").get<std::vector<double>>() == report.metrics.rolling &&
        (report.metrics.adaptation_episode
             ? (!stored.at("adaptation_episode").is_null() &&
                stored.at("adaptation_episode").get<int>() == *report.metrics.adaptation_episode)
             : stored.at("adaptation_episode").is_null());
    if (!report.summary_matches) {
        report.detail += "summary.json does not match metrics recomputed from episodes.jsonl\n";
    }
    return report;
}

void print_summary(const RunConfig& config, const ExperimentResult& result) {
    std::cout << "scenario=" << to_string(config.scenario) << " learner=" << to_string(config.learner)
              << " seed=" << config.seed << " episodes=" << result.metrics.episodes << "\n";
    std::cout << "  overall success rate:      " << fmt(result.metrics.overall_success_rate) << "\n";
    std::cout << "  final-" << result.metrics.final_window
              << " success rate:     " << fmt(result.metrics.final_window_rate) << "\n";
    if (result.metrics.adaptation_episode) {
        std::cout << "  adaptation episode:        " << *result.metrics.adaptation_episode << "\n";
    } else {
        std::cout << "  adaptation episode:        not reached\n";
    }
    std::cout << "  pseudo-labels emitted:     " << result.pseudo_labels << "\n";
    std::cout << "  tau threshold:             " << fmt(result.tau_threshold) << "\n";
    std::cout << "  mean decision time (ms):   " << fmt(result.mean_decision_ms) << "\n";
}

void print_compare_table(const RunConfig& config, const CompareTable& table) {
    std::cout << "final-window success rate by learner (scenario " << to_string(config.scenario)
              << ", " << config.episodes << " episodes, " << config.seeds.size() << " seeds)\n";
    std::cout << "learner     seed   final_window_rate\n";
    for (const auto& row : table.rows) {
        std::cout << "  " << to_string(row.learner);
        for (std::size_t i = to_string(row.learner).size(); i < 11; ++i) {
            std::cout << ' ';
        }
        std::cout << row.seed << "      " << fmt(row.final_window_rate) << "\n";
    }
    for (const auto& [kind, mean] : table.means) {
        std::cout << "  " << to_string(kind);
        for (std::size_t i = to_string(kind).size(); i < 11; ++i) {
            std::cout << ' ';
        }
        std::cout << "mean   " << fmt(mean) << "\n";
    }
    std::cout << "reference (reported percentages, context only, not asserted):\n"
              << "  ssl static 85, ssl dynamic 78, reward-driven 65, supervised 60\n";
}

}  // namespace gsim
