#pragma once

// The round / slot loop: arrivals, availability, task selection, federation,
// local learning and metrics.
//
// Round r (1-based) covers global slots [(r-1) S, r S). At its start:
//   1. arrival events with slot <= (r-1) S that are still pending spawn edges
//   2. availability is drawn for every edge
//   3. the selection policy picks tasks
//   4. each selected task runs one federation round over its edges
//   5. every edge runs S local slots
//   6. FL-PF updates its multipliers; metrics are appended

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "frl/config.hpp"
#include "frl/dqn.hpp"
#include "frl/federation.hpp"

namespace frl {

struct EdgeRecord {
    std::size_t id = 0;
    TaskId task{};
    std::string scenario;
    std::size_t spawn_slot = 0;
    std::vector<double> raw_rewards;  // one per slot lived
    std::vector<double> normalized_rewards;
};

struct ParticipantRow {
    std::size_t round;
    TaskId task;
    std::size_t available;
    bool selected;
    std::size_t participants;
};

struct SelectionRow {
    std::size_t round;
    TaskId task;
    double lambda;
    double mu;
    double weight;
    bool selected;
};

struct SummaryRow {
    TaskId task;
    double avg_participants;
    double avg_normalized_reward;
    std::size_t learning_speed;
};

struct MetricsLog {
    SelectionPolicy policy = SelectionPolicy::fl_pf;
    std::size_t rounds_completed = 0;
    std::size_t slots_per_round = 1;
    std::vector<EdgeRecord> edges;  // indexed by edge id
    std::vector<ParticipantRow> participants;
    std::vector<SelectionRow> selection;
    /// Per round and task: mean normalized reward over that task's edges and the round's slots.
    std::vector<std::array<double, task_count>> round_task_reward;

    /// Per round: sum over tasks of round_task_reward.
    std::vector<double> sum_reward_series() const;
    std::vector<SummaryRow> summary(std::size_t smoothing_rounds) const;
};

/// Edge learner plus the bookkeeping the orchestrator needs.
struct LiveEdge {
    std::unique_ptr<EdgeAgent> agent;
    std::size_t spawn_slot = 0;
    std::string scenario;
};

struct RoundView {
    std::size_t round;  // 1-based
    const std::vector<LiveEdge>& edges;
    const AvailabilityVector& availability;
    const RoundDecision& decision;
    const TaskSelector& selector;
    const std::array<CentralPolicy, task_count>& central;
};

struct SimulationHooks {
    /// Called for every slot of every edge. With threads > 1 it runs on worker
    /// threads, concurrently for different edges.
    StepObserver on_step;
    /// After federation, before local slots.
    std::function<void(const RoundView&)> after_federation;
    /// After the multiplier update and metrics of a round.
    std::function<void(const RoundView&)> after_round;
};

/// Network layer sizes of a task's policy under the given config.
std::vector<std::size_t> task_network_shape(const ExperimentConfig& config, TaskId task);

class Simulation {
public:
    explicit Simulation(ExperimentConfig config, SimulationHooks hooks = {});

    const ExperimentConfig& config() const { return config_; }
    std::size_t round() const { return round_; }
    bool finished() const { return round_ >= config_.rounds; }

    /// Advances one round; returns false once all rounds ran.
    bool step_round();
    void run();

    const MetricsLog& metrics() const { return log_; }
    const std::vector<LiveEdge>& edges() const { return edges_; }
    const std::array<CentralPolicy, task_count>& central() const { return central_; }
    const TaskSelector& selector() const { return selector_; }

    /// Creates an edge that starts from the task's current central policy, or from
    /// a fresh random policy under No-FL.
    std::size_t spawn_edge(TaskId task, const std::string& scenario, std::size_t slot);

    /// Order in which selected tasks run their federation round; must be a permutation.
    void set_federation_order(const std::array<std::size_t, task_count>& order);

private:
    void run_edges(std::size_t first_slot, const EpsilonSchedule& epsilon);
    void record_round(const AvailabilityVector& avail, const RoundDecision& decision,
                      const std::array<double, task_count>& lambda, const std::array<double, task_count>& mu);

    ExperimentConfig config_;
    SimulationHooks hooks_;
    TaskSelector selector_;
    std::array<CentralPolicy, task_count> central_;
    std::vector<LiveEdge> edges_;
    std::vector<std::uint8_t> arrival_done_;
    Rng availability_rng_;
    std::size_t round_ = 0;
    std::array<std::size_t, task_count> federation_order_{0, 1, 2};
    MetricsLog log_;
};

MetricsLog run_simulation(const ExperimentConfig& config, const SimulationHooks& hooks = {});

/// Writes rewards.csv, participants.csv, selection.csv and summary.csv.
void write_metrics(const MetricsLog& log, const std::string& dir, std::size_t smoothing_rounds);

}  // namespace frl
