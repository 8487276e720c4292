#pragma once

// Per-edge deep Q-learning over agnostic states and actions.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "frl/agnostic_policy.hpp"
#include "frl/metrics.hpp"
#include "frl/mlp.hpp"
#include "frl/tasks.hpp"

namespace frl {

struct DqnConfig {
    std::vector<std::size_t> hidden_layers{300, 300, 300};
    double learning_rate = 1e-5;
    std::size_t batch_size = 32;
    std::size_t train_interval = 50;
    std::size_t target_update_interval = 100;
    double gamma = 0.95;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 0.4;  // of the run's total slots
    std::size_t replay_capacity = 10000;

    void validate() const;
};

/// Linear decay from start to end over the first `decay_slots` slots of the global clock.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    double decay_slots = 1.0;

    double at(std::size_t global_slot) const;
};

/// Network sizes for a task: input = occupancy cells, output = |action space|.
std::vector<std::size_t> network_shape(const ActionSpace& space, const std::vector<std::size_t>& hidden);

struct Experience {
    AgnosticState state;
    std::size_t action = 0;  // index into the task's ActionSpace
    double reward = 0.0;
    AgnosticState next_state;
};

/// Bounded FIFO of experiences plus the count added since the last round boundary.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Experience exp);
    /// Uniform draws with replacement.
    std::vector<Experience> sample(std::size_t batch_size, Rng& rng) const;

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }
    /// i = 0 is the oldest stored experience.
    const Experience& at(std::size_t i) const;

    std::size_t round_count() const { return round_count_; }
    void reset_round_count() { round_count_ = 0; }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // index of the oldest item once full
    std::size_t round_count_ = 0;
    std::vector<Experience> items_;
};

/// Epsilon-greedy over feasible actions; greedy ties go to the lowest index.
std::size_t select_action(std::span<const double> q, std::span<const std::uint8_t> feasible, double epsilon,
                          Rng& rng);

/// One SGD step on the mean squared TD error with a fixed target network.
/// Returns the batch loss evaluated before the update.
double train_step(PolicyParams& params, const PolicyParams& target, std::span<const Experience> batch, double gamma,
                  double learning_rate, const ActionSpace& space);

/// Everything observable about one slot of one edge.
struct StepRecord {
    std::size_t edge_id;
    std::size_t global_slot;
    const EdgeState& state;
    const AgnosticState& agnostic_state;
    std::span<const std::uint8_t> feasible;
    std::size_t agnostic_action;
    const EdgeAction& action;
    const Transition& transition;
    double normalized_reward;
};

using StepObserver = std::function<void(const StepRecord&)>;

/// One edge: its environment instance and its local DQN learner.
class EdgeAgent {
public:
    EdgeAgent(std::size_t id, EdgeConfig config, PartitionSpec partition, const DqnConfig& dqn,
              const PolicyParams& initial, RewardBounds bounds, std::uint64_t master_seed);

    std::size_t id() const { return id_; }
    TaskId task() const { return config_.task; }
    const EdgeConfig& config() const { return config_; }
    const EdgeState& state() const { return state_; }
    const ActionSpace& action_space() const { return space_; }

    /// Runs `slots` iterations of encode / select / translate / step / store, with a
    /// train step every train_interval local slots and a target sync every
    /// target_update_interval local slots. `global_slot` is the clock value of the
    /// first slot and drives the exploration schedule.
    void run_local_slots(std::size_t slots, std::size_t global_slot, const EpsilonSchedule& epsilon,
                         const StepObserver& observer = {});

    const PolicyParams& params() const { return params_; }
    const PolicyParams& target_params() const { return target_; }
    /// w_n^r: parameters at the start of the current federation round.
    const PolicyParams& round_start_params() const { return round_start_; }
    /// Replace local parameters with a broadcast and mark them as the new round start.
    void adopt_params(const PolicyParams& central);

    /// K_n: experiences generated since the last round boundary.
    std::size_t round_experience_count() const { return replay_.round_count(); }
    void begin_round() { replay_.reset_round_count(); }

    const ReplayBuffer& replay() const { return replay_; }
    std::size_t local_slots() const { return local_slot_; }
    std::size_t train_steps() const { return train_steps_; }
    std::size_t target_syncs() const { return target_syncs_; }
    double last_loss() const { return last_loss_; }

    const std::vector<double>& raw_rewards() const { return raw_rewards_; }
    const std::vector<double>& normalized_rewards() const { return normalized_rewards_; }

private:
    std::size_t id_;
    EdgeConfig config_;
    PartitionSpec partition_;
    DqnConfig dqn_;
    ActionSpace space_;
    RewardBounds bounds_;
    EdgeState state_;
    Rng env_rng_;
    Rng agent_rng_;
    PolicyParams params_;
    PolicyParams target_;
    PolicyParams round_start_;
    ReplayBuffer replay_;
    std::size_t local_slot_ = 0;
    std::size_t train_steps_ = 0;
    std::size_t target_syncs_ = 0;
    double last_loss_ = 0.0;
    std::vector<double> raw_rewards_;
    std::vector<double> normalized_rewards_;
};

}  // namespace frl
