#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsim/config.hpp"
#include "gsim/harness.hpp"
#include "gsim/predictor.hpp"

namespace {

using namespace gsim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitGradcheck = 3;

struct CommonFlags {
    std::string config_path;
    std::uint64_t seed = 0;
    int episodes = 0;
    std::string learner;
    std::string scenario;
    double eta = 0.0;
    double lambda = 0.0;
    std::string out;

    CLI::Option* o_seed = nullptr;
    CLI::Option* o_episodes = nullptr;
    CLI::Option* o_learner = nullptr;
    CLI::Option* o_scenario = nullptr;
    CLI::Option* o_eta = nullptr;
    CLI::Option* o_lambda = nullptr;
    CLI::Option* o_out = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run-config file");
        o_seed = cmd->add_option("--seed", seed, "master seed");
        o_episodes = cmd->add_option("--episodes", episodes, "episode count");
        o_learner = cmd->add_option("--learner", learner, "ssl | supervised | reward");
        o_scenario = cmd->add_option(
            "--scenario", scenario, "static | dynamic_linear | dynamic_sliding | dynamic_rotating");
        o_eta = cmd->add_option("--eta", eta, "learning rate");
        o_lambda = cmd->add_option("--lambda", lambda, "orientation loss weight");
        o_out = cmd->add_option("--out", out, "output directory");
    }

    RunConfig resolve() const {
        RunConfig cfg = config_path.empty() ? default_config() : load_config_file(config_path);
        if (o_seed->count()) cfg.seed = seed;
        if (o_episodes->count()) cfg.episodes = episodes;
        if (o_learner->count()) cfg.learner = learner_from_string(learner);
        if (o_scenario->count()) cfg.scenario = scenario_from_string(scenario);
        if (o_eta->count()) cfg.hyper.eta = eta;
        if (o_lambda->count()) cfg.hyper.loss_weights.lambda = lambda;
        // precedence: --out, config file, GRASP_SSL_OUT, then "out"
        if (o_out->count()) {
            cfg.out_dir = out;
        } else if (cfg.out_dir.empty()) {
            const char* env = std::getenv("GRASP_SSL_OUT");
            cfg.out_dir = env != nullptr && *env != '\0' ? env : "out";
        }
        validate(cfg);
        return cfg;
    }
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            seeds.push_back(std::stoull(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad seed list entry '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (seeds.empty()) {
        throw ConfigError("seed list is empty");
    }
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graspsim: deterministic desk-scale self-supervised grasp learning simulator"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run one experiment and write logs");
    CommonFlags run_flags;
    run_flags.attach(run);
    bool log_observations = false;
    std::string save_model;
    run->add_flag("--log-observations", log_observations, "include depth frames in episodes.jsonl");
    run->add_option("--save-model", save_model, "write final model parameters to this JSON file");

    // compare
    auto* compare = app.add_subcommand("compare", "run all learners on identical scenarios/seeds");
    CommonFlags cmp_flags;
    cmp_flags.attach(compare);
    std::string cmp_seeds, cmp_learners;
    compare->add_option("--seeds", cmp_seeds, "comma-separated seed list");
    compare->add_option("--learners", cmp_learners, "comma-separated learner list");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "success rate vs object speed");
    CommonFlags sweep_flags;
    sweep_flags.attach(sweep);
    std::string sweep_seeds, sweep_learners, sweep_speeds;
    sweep->add_option("--seeds", sweep_seeds, "comma-separated seed list");
    sweep->add_option("--learners", sweep_learners, "comma-separated learner list");
    sweep->add_option("--speeds", sweep_speeds, "comma-separated speeds, m/s");

    // gradcheck
    auto* gradcheck = app.add_subcommand("gradcheck", "verify analytic gradients against finite differences");
    int gc_instances = 50;
    double gc_step = 1e-6;
    double gc_tol = 1e-4;
    int gc_depth_res = 8;
    std::vector<int> gc_hidden{16, 12};
    std::uint64_t gc_seed = 0;
    gradcheck->add_option("--instances", gc_instances, "random instances per objective");
    gradcheck->add_option("--step", gc_step, "finite difference step");
    gradcheck->add_option("--tolerance", gc_tol, "max relative error allowed");
    gradcheck->add_option("--depth-res", gc_depth_res, "depth resolution of the checked model");
    gradcheck->add_option("--hidden", gc_hidden, "hidden layer sizes of the checked model");
    gradcheck->add_option("--seed", gc_seed, "seed");

    // report
    auto* report = app.add_subcommand("report", "recompute a summary from episodes.jsonl");
    std::string report_dir;
    report->add_option("--in", report_dir, "run directory with episodes.jsonl + summary.json")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) {
            RunConfig cfg = run_flags.resolve();
            cfg.log_observations = log_observations;
            const ExperimentResult result = run_experiment(cfg);
            write_experiment_files(cfg, result);
            if (!save_model.empty()) {
                std::ofstream out(save_model, std::ios::binary);
                if (!out) {
                    throw IoError("cannot open " + save_model);
                }
                out << model_to_json(result.final_params) << "\n";
            }
            print_summary(cfg, result);
            std::cout << "wrote " << cfg.out_dir << "/episodes.jsonl, curve.csv, summary.json\n";
        } else if (compare->parsed()) {
            RunConfig cfg = cmp_flags.resolve();
            if (!cmp_seeds.empty()) {
                cfg.seeds = parse_seed_list(cmp_seeds);
            }
            if (!cmp_learners.empty()) {
                cfg.learners.clear();
                std::size_t pos = 0;
                while (pos <= cmp_learners.size()) {
                    const std::size_t comma = cmp_learners.find(',', pos);
                    cfg.learners.push_back(learner_from_string(
                        cmp_learners.substr(pos, comma == std::string::npos ? comma : comma - pos)));
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
            }
            validate(cfg);
            const CompareTable table = compare_learners(cfg);
            print_compare_table(cfg, table);
            std::cout << "wrote " << cfg.out_dir << "/compare.csv\n";
        } else if (sweep->parsed()) {
            RunConfig cfg = sweep_flags.resolve();
            if (!sweep_seeds.empty()) {
                cfg.seeds = parse_seed_list(sweep_seeds);
            }
            if (!sweep_learners.empty()) {
                cfg.learners.clear();
                std::size_t pos = 0;
                while (pos <= sweep_learners.size()) {
                    const std::size_t comma = sweep_learners.find(',', pos);
                    cfg.learners.push_back(learner_from_string(
                        sweep_learners.substr(pos, comma == std::string::npos ? comma : comma - pos)));
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
            }
            std::vector<double> speeds = cfg.sweep_speeds;
            if (!sweep_speeds.empty()) {
                speeds.clear();
                std::size_t pos = 0;
                while (pos <= sweep_speeds.size()) {
                    const std::size_t comma = sweep_speeds.find(',', pos);
                    try {
                        speeds.push_back(std::stod(
                            sweep_speeds.substr(pos, comma == std::string::npos ? comma : comma - pos)));
                    } catch (const std::exception&) {
                        throw ConfigError("bad --speeds entry");
                    }
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
            }
            cfg.sweep_speeds = speeds;
            validate(cfg);
            const auto rows = velocity_sweep(cfg, speeds);
            std::cout << "learner,speed,mean_final_window_success_rate\n";
            for (const auto& row : rows) {
                std::cout << to_string(row.learner) << "," << row.speed << ","
                          << row.mean_final_rate << "\n";
            }
            std::cout << "wrote " << cfg.out_dir << "/sweep.csv and sweep_runs.csv\n";
        } else if (gradcheck->parsed()) {
            const Architecture arch{gc_depth_res * gc_depth_res + 12, gc_hidden};
            const auto t0 = std::chrono::steady_clock::now();
            const GradCheckReport rep = grad_check(arch, gc_instances, gc_step, gc_tol, gc_seed);
            const auto t1 = std::chrono::steady_clock::now();
            const double secs = std::chrono::duration<double>(t1 - t0).count();
            std::cout << "gradcheck: " << rep.instances << " instances per objective, step " << gc_step
                      << ", tolerance " << gc_tol << "\n";
            std::cout << "  pose loss        max relative error: " << rep.max_rel_error_pose << "\n";
            std::cout << "  success objective max relative error: " << rep.max_rel_error_success
                      << "\n";
            std::cout << "  elapsed: " << secs << " s\n";
            std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
            return rep.pass ? kExitOk : kExitGradcheck;
        } else if (report->parsed()) {
            const ReportResult rep = report_run_dir(report_dir);
            std::cout << "episodes:                  " << rep.episodes << "\n";
            std::cout << "overall success rate:      " << rep.metrics.overall_success_rate << "\n";
            std::cout << "final-window success rate: " << rep.metrics.final_window_rate << "\n";
            if (rep.metrics.adaptation_episode) {
                std::cout << "adaptation episode:        " << *rep.metrics.adaptation_episode << "\n";
            } else {
                std::cout << "adaptation episode:        not reached\n";
            }
            std::cout << "record self-consistency:   " << (rep.records_consistent ? "OK" : "FAILED")
                      << "\n";
            std::cout << "summary.json agreement:    " << (rep.summary_matches ? "OK" : "FAILED")
                      << "\n";
            if (!rep.records_consistent || !rep.summary_matches) {
                std::cerr << rep.detail;
                return kExitConfig;
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
