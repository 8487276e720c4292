#pragma once

// Experiment configuration, JSON loading and the two built-in presets.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "frl/agnostic_policy.hpp"
#include "frl/dqn.hpp"
#include "frl/metrics.hpp"
#include "frl/task_selection.hpp"
#include "frl/tasks.hpp"

namespace frl {

struct ScenarioCount {
    std::string scenario;
    std::size_t count = 0;
};

struct TaskSetup {
    std::vector<ScenarioCount> edges;  // base edges, in creation order
    double arrival_rate = 0.0;         // per-round availability probability
    TaskDemand demand;
    double utility_weight = 1.0;
    PartitionSpec partition;
    RewardBounds reward_bounds;
    /// Radio resource only: reward weight per watt of transmit power.
    std::optional<double> power_cost;
    /// Scenario definitions beyond the built-in A..E table (or overriding it).
    std::map<std::string, EdgeConfig> custom_scenarios;
};

struct ArrivalEvent {
    std::size_t slot = 0;
    TaskId task{};
    std::string scenario;
    std::size_t count = 0;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::size_t rounds = 80;
    std::size_t slots_per_round = 100;
    SelectionPolicy policy = SelectionPolicy::fl_pf;
    CloudCapacity capacity;
    SelectionParams selection;
    DqnConfig dqn;
    std::array<TaskSetup, task_count> tasks;
    std::vector<ArrivalEvent> arrivals;
    std::size_t smoothing_rounds = 10;  // window for learning_speed
    std::size_t threads = 1;
    std::string output_dir = "out";

    std::size_t total_slots() const { return rounds * slots_per_round; }
    const TaskSetup& task(TaskId id) const { return tasks[static_cast<std::size_t>(id)]; }
    TaskSetup& task(TaskId id) { return tasks[static_cast<std::size_t>(id)]; }

    /// Scenario lookup: custom definitions first, then the built-in table.
    EdgeConfig edge_config(TaskId id, const std::string& scenario) const;

    void validate() const;
};

/// Default partition of each task's state information.
PartitionSpec default_partition(TaskId task);

ExperimentConfig desk_preset();
ExperimentConfig paper_preset();
ExperimentConfig preset(const std::string& name);

/// Reads a JSON document. Keys absent from the document keep the values of `base`;
/// unknown keys are rejected.
ExperimentConfig load_config(const std::string& json_text, ExperimentConfig base = desk_preset());
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = desk_preset());

std::string dump_config(const ExperimentConfig& config);

}  // namespace frl
