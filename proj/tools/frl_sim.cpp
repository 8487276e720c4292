// Command-line driver for one simulation run.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "frl/config.hpp"
#include "frl/errors.hpp"
#include "frl/mlp.hpp"
#include "frl/orchestrator.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Federated policy learning simulator"};
    std::string config_path, preset_name = "desk", policy, out_dir, dump_params;
    std::uint64_t seed = 0;
    std::size_t rounds = 0, threads = 0;
    bool dump_config = false;
    auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
    auto* rounds_opt = app.add_option("--rounds", rounds, "Number of federation rounds (overrides the config)");
    app.add_option("--config", config_path, "JSON config file, applied on top of the preset");
    app.add_option("--preset", preset_name, "Base preset")->check(CLI::IsMember({"desk", "paper"}));
    app.add_option("--policy", policy, "Task-selection policy")
        ->check(CLI::IsMember({"fl-pf", "fl-greedy", "fl-rr", "bench", "no-fl"}));
    app.add_option("--out", out_dir, "Output directory for the CSV files");
    auto* threads_opt = app.add_option("--threads", threads, "Worker threads for the edges")->check(CLI::PositiveNumber);
    app.add_option("--dump-params", dump_params, "Write the final central policies into this directory");
    app.add_flag("--dump-config", dump_config, "Print the effective config as JSON and exit");
    CLI11_PARSE(app, argc, argv);

    frl::ExperimentConfig config;
    try {
        config = frl::preset(preset_name);
        if (!config_path.empty()) config = frl::load_config_file(config_path, config);
        if (*seed_opt) config.seed = seed;
        if (*rounds_opt) config.rounds = rounds;
        if (!policy.empty()) config.policy = frl::parse_policy(policy);
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (*threads_opt) config.threads = threads;
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    if (dump_config) {
        std::cout << frl::dump_config(config) << '\n';
        return 0;
    }

    std::unique_ptr<frl::Simulation> sim;
    int status = 0;
    try {
        sim = std::make_unique<frl::Simulation>(config);
        while (sim->step_round()) {
            if (sim->round() % 10 == 0) std::cerr << "round " << sim->round() << '/' << config.rounds << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "simulation aborted: " << e.what() << '\n';
        status = 1;
    }
    if (!sim) return status;

    try {
        frl::write_metrics(sim->metrics(), config.output_dir, config.smoothing_rounds);
        if (!dump_params.empty()) {
            std::filesystem::create_directories(dump_params);
            for (const auto& c : sim->central()) {
                std::ofstream out(std::filesystem::path(dump_params) /
                                  ("central_" + std::string(frl::task_label(c.task)) + ".txt"));
                frl::write_snapshot(out, c.theta);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "failed to write outputs: " << e.what() << '\n';
        return 1;
    }
    for (const auto& row : sim->metrics().summary(config.smoothing_rounds))
        std::printf("%s task %s: avg participants %.3f, avg normalized reward %.4f, learning speed %zu\n",
                    std::string(frl::policy_name(config.policy)).c_str(), std::string(frl::task_label(row.task)).c_str(),
                    row.avg_participants, row.avg_normalized_reward, row.learning_speed);
    return status;
}
