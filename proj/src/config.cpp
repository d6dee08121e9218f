#include "gsim/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

namespace gsim {

using nlohmann::json;

std::string to_string(Scenario s) {
    switch (s) {
        case Scenario::static_scene: return "static";
        case Scenario::dynamic_linear: return "dynamic_linear";
        case Scenario::dynamic_sliding: return "dynamic_sliding";
        case Scenario::dynamic_rotating: return "dynamic_rotating";
    }
    return "static";
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "static") return Scenario::static_scene;
    if (name == "dynamic_linear") return Scenario::dynamic_linear;
    if (name == "dynamic_sliding") return Scenario::dynamic_sliding;
    if (name == "dynamic_rotating") return Scenario::dynamic_rotating;
    throw ConfigError("unknown scenario '" + name +
                      "' (expected static, dynamic_linear, dynamic_sliding, dynamic_rotating)");
}

std::string to_string(LearnerKind k) {
    switch (k) {
        case LearnerKind::ssl_online: return "ssl";
        case LearnerKind::supervised_frozen: return "supervised";
        case LearnerKind::reward_baseline: return "reward";
    }
    return "ssl";
}

LearnerKind learner_from_string(const std::string& name) {
    if (name == "ssl") return LearnerKind::ssl_online;
    if (name == "supervised") return LearnerKind::supervised_frozen;
    if (name == "reward") return LearnerKind::reward_baseline;
    throw ConfigError("unknown learner '" + name + "' (expected ssl, supervised, reward)");
}

RunConfig default_config() { return RunConfig{}; }

namespace {

void expect_keys(const json& j, const std::string& ctx, std::initializer_list<std::string_view> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (std::string_view k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown config key: " + (ctx.empty() ? it.key() : ctx + "." + it.key()));
        }
    }
}

template <typename T>
void read(const json& j, const std::string& ctx, const char* key, T& out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        j.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw ConfigError("bad value for config key " + (ctx.empty() ? std::string(key) : ctx + "." + key) +
                          ": " + e.what());
    }
}

void read_vec3(const json& j, const std::string& ctx, const char* key, Vec3& out) {
    if (!j.contains(key)) {
        return;
    }
    std::vector<double> v;
    read(j, ctx, key, v);
    if (v.size() != 3) {
        throw ConfigError("config key " + ctx + "." + key + " must be an array of 3 numbers");
    }
    out = {v[0], v[1], v[2]};
}

void read_range(const json& j, const std::string& ctx, const char* key, double& lo, double& hi) {
    if (!j.contains(key)) {
        return;
    }
    std::vector<double> v;
    read(j, ctx, key, v);
    if (v.size() != 2 || v[0] > v[1]) {
        throw ConfigError("config key " + ctx + "." + key + " must be [min, max]");
    }
    lo = v[0];
    hi = v[1];
}

void parse_world(const json& j, WorldConfig& w) {
    expect_keys(j, "world",
                {"shape", "speed", "linear_direction", "t_change", "angular_speed",
                 "closure_latency", "dt", "observe_time", "workspace", "approach_offset",
                 "tolerances", "noise", "grip", "camera"});
    if (j.contains("shape")) {
        const json& s = j.at("shape");
        expect_keys(s, "world.shape", {"kind", "sphere_radius", "box_half_extents"});
        read(s, "world.shape", "kind", w.shape.kind);
        if (w.shape.kind != "mixed" && w.shape.kind != "sphere" && w.shape.kind != "box") {
            throw ConfigError("world.shape.kind must be mixed, sphere, or box");
        }
        read_range(s, "world.shape", "sphere_radius", w.shape.sphere_radius_min, w.shape.sphere_radius_max);
        read_range(s, "world.shape", "box_half_extents", w.shape.box_half_min, w.shape.box_half_max);
    }
    read(j, "world", "speed", w.speed);
    read_vec3(j, "world", "linear_direction", w.linear_direction);
    read(j, "world", "t_change", w.t_change);
    read(j, "world", "angular_speed", w.angular_speed);
    read(j, "world", "closure_latency", w.closure_latency);
    read(j, "world", "dt", w.dt);
    read(j, "world", "observe_time", w.observe_time);
    read(j, "world", "workspace", w.workspace);
    read(j, "world", "approach_offset", w.grip.approach_offset);
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        expect_keys(t, "world.tolerances", {"r_pos", "r_ang", "tau_threshold"});
        read(t, "world.tolerances", "r_pos", w.tolerances.r_pos);
        read(t, "world.tolerances", "r_ang", w.tolerances.r_ang);
        if (t.contains("tau_threshold")) {
            read(t, "world.tolerances", "tau_threshold", w.tolerances.tau_threshold);
            w.tau_from_config = true;
        }
    }
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        expect_keys(n, "world.noise",
                    {"depth_sigma", "wrench_sigma", "contact_sigma", "exec_pos_sigma",
                     "exec_ang_sigma"});
        read(n, "world.noise", "depth_sigma", w.noise.depth_sigma);
        read(n, "world.noise", "wrench_sigma", w.noise.wrench_sigma);
        read(n, "world.noise", "contact_sigma", w.noise.contact_sigma);
        read(n, "world.noise", "exec_pos_sigma", w.noise.exec_pos_sigma);
        read(n, "world.noise", "exec_ang_sigma", w.noise.exec_ang_sigma);
    }
    if (j.contains("grip")) {
        const json& g = j.at("grip");
        expect_keys(g, "world.grip", {"base_force", "contact_points", "patch_area", "slip_gain", "width"});
        read(g, "world.grip", "base_force", w.grip.base_force);
        read(g, "world.grip", "contact_points", w.grip.contact_points);
        read(g, "world.grip", "patch_area", w.grip.patch_area);
        read(g, "world.grip", "slip_gain", w.grip.slip_gain);
        read(g, "world.grip", "width", w.grip.width);
    }
    if (j.contains("camera")) {
        const json& c = j.at("camera");
        expect_keys(c, "world.camera", {"position", "direction", "fov", "far_value"});
        read_vec3(c, "world.camera", "position", w.camera.position);
        read_vec3(c, "world.camera", "direction", w.camera.direction);
        read(c, "world.camera", "fov", w.camera.fov);
        read(c, "world.camera", "far_value", w.camera.far_value);
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config root must be a JSON object");
    }
    expect_keys(j, "",
                {"scenario", "episodes", "seed", "seeds", "learner", "learners", "eta", "lambda",
                 "epsilon_explore", "pretrain_epochs", "pretrain_samples", "out",
                 "log_observations", "depth_res", "hidden", "world", "metrics", "sweep_speeds"});

    RunConfig cfg = default_config();
    std::string name;
    read(j, "", "scenario", name);
    if (!name.empty()) {
        cfg.scenario = scenario_from_string(name);
    }
    read(j, "", "episodes", cfg.episodes);
    read(j, "", "seed", cfg.seed);
    read(j, "", "seeds", cfg.seeds);
    name.clear();
    read(j, "", "learner", name);
    if (!name.empty()) {
        cfg.learner = learner_from_string(name);
    }
    if (j.contains("learners")) {
        std::vector<std::string> names;
        read(j, "", "learners", names);
        cfg.learners.clear();
        for (const auto& n : names) {
            cfg.learners.push_back(learner_from_string(n));
        }
    }
    read(j, "", "eta", cfg.hyper.eta);
    read(j, "", "lambda", cfg.hyper.loss_weights.lambda);
    read(j, "", "epsilon_explore", cfg.hyper.epsilon_explore);
    read(j, "", "pretrain_epochs", cfg.hyper.pretrain_epochs);
    read(j, "", "pretrain_samples", cfg.hyper.pretrain_samples);
    read(j, "", "out", cfg.out_dir);
    read(j, "", "log_observations", cfg.log_observations);
    read(j, "", "depth_res", cfg.depth_res);
    read(j, "", "hidden", cfg.hidden);
    read(j, "", "sweep_speeds", cfg.sweep_speeds);
    if (j.contains("world")) {
        parse_world(j.at("world"), cfg.world);
    }
    if (j.contains("metrics")) {
        const json& m = j.at("metrics");
        expect_keys(m, "metrics", {"adapt_rate", "adapt_window", "rolling_window", "final_window"});
        read(m, "metrics", "adapt_rate", cfg.metrics.adapt_rate);
        read(m, "metrics", "adapt_window", cfg.metrics.adapt_window);
        read(m, "metrics", "rolling_window", cfg.metrics.rolling_window);
        read(m, "metrics", "final_window", cfg.metrics.final_window);
    }
    validate(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const RunConfig& cfg) {
    const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (cfg.episodes < 1) fail("episodes must be >= 1");
    if (!(cfg.hyper.eta > 0.0) || !std::isfinite(cfg.hyper.eta)) fail("eta must be > 0");
    if (!(cfg.hyper.loss_weights.lambda >= 0.0) || !std::isfinite(cfg.hyper.loss_weights.lambda)) {
        fail("lambda must be finite and >= 0");
    }
    if (cfg.hyper.epsilon_explore < 0.0 || cfg.hyper.epsilon_explore > 1.0) {
        fail("epsilon_explore must be in [0, 1]");
    }
    if (cfg.hyper.pretrain_epochs < 0) fail("pretrain_epochs must be >= 0");
    if (cfg.hyper.pretrain_samples < 1) fail("pretrain_samples must be >= 1");
    if (cfg.depth_res < 2) fail("depth_res must be >= 2");
    if (cfg.hidden.empty()) fail("hidden must name at least one layer size");
    for (int h : cfg.hidden) {
        if (h < 1) fail("hidden layer sizes must be >= 1");
    }
    if (cfg.seeds.empty()) fail("seeds must not be empty");
    if (cfg.learners.empty()) fail("learners must not be empty");

    const WorldConfig& w = cfg.world;
    if (!(w.dt > 0.0)) fail("world.dt must be > 0");
    const auto divides = [&](double duration) {
        const double steps = duration / w.dt;
        return std::abs(steps - std::llround(steps)) * w.dt <= 1e-9;
    };
    if (w.closure_latency < 0.0 || !divides(w.closure_latency)) {
        fail("world.closure_latency must be a nonnegative multiple of world.dt");
    }
    if (w.observe_time < 0.0 || !divides(w.observe_time)) {
        fail("world.observe_time must be a nonnegative multiple of world.dt");
    }
    if (!(w.workspace > 0.0)) fail("world.workspace must be > 0");
    if (w.speed < 0.0) fail("world.speed must be >= 0");
    if (!(w.t_change > 0.0)) fail("world.t_change must be > 0");
    if (!(w.tolerances.r_pos > 0.0)) fail("world.tolerances.r_pos must be > 0");
    if (!(w.tolerances.r_ang > 0.0)) fail("world.tolerances.r_ang must be > 0");
    if (cfg.world.tau_from_config && !(w.tolerances.tau_threshold > 0.0)) {
        fail("world.tolerances.tau_threshold must be > 0");
    }
    if (w.noise.depth_sigma < 0.0 || w.noise.wrench_sigma < 0.0 || w.noise.contact_sigma < 0.0 ||
        w.noise.exec_pos_sigma < 0.0 || w.noise.exec_ang_sigma < 0.0) {
        fail("world.noise sigmas must be >= 0");
    }
    if (w.grip.contact_points < 2 || w.grip.contact_points % 2 != 0) {
        fail("world.grip.contact_points must be an even number >= 2");
    }
    if (!(w.grip.patch_area > 0.0)) fail("world.grip.patch_area must be > 0");
    if (!(w.grip.base_force > 0.0)) fail("world.grip.base_force must be > 0");
    if (w.grip.slip_gain < 0.0) fail("world.grip.slip_gain must be >= 0");
    if (!(w.grip.width > 0.0)) fail("world.grip.width must be > 0");
    if (!(w.camera.fov > 0.0) || w.camera.fov >= 3.141592653589793) {
        fail("world.camera.fov must be in (0, pi)");
    }
    if (!(w.camera.far_value > 0.0)) fail("world.camera.far_value must be > 0");
    if (norm(w.camera.direction) <= 0.0) fail("world.camera.direction must be nonzero");
    if (!(cfg.metrics.adapt_rate > 0.0) || cfg.metrics.adapt_rate > 1.0) {
        fail("metrics.adapt_rate must be in (0, 1]");
    }
    if (cfg.metrics.adapt_window < 1) fail("metrics.adapt_window must be >= 1");
    if (cfg.metrics.rolling_window < 1) fail("metrics.rolling_window must be >= 1");
    if (cfg.metrics.final_window < 1) fail("metrics.final_window must be >= 1");
    for (double s : cfg.sweep_speeds) {
        if (s < 0.0) fail("sweep_speeds must be >= 0");
    }
}

}  // namespace gsim
