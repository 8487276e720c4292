#pragma once

// Which tasks federate in a round.
//
// The proportional-fair controller keeps two prices per task: lambda (tied to
// the auxiliary average-participant target y) and mu (tied to the minimum
// average participants X). Each round it solves
//     max sum_l (lambda_l + mu_l) x_l q_l   s.t.  sum_l q_l x_l (B_l, O_l, C_l) <= capacity
// and afterwards moves the prices by a projected subgradient step.
// A task's per-round demand is x_l times its per-participant demand.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frl/knapsack.hpp"
#include "frl/random.hpp"

namespace frl {

struct CloudCapacity {
    double bandwidth = 0.0;
    double memory = 0.0;
    double compute = 0.0;

    ResourceVector as_vector() const { return {bandwidth, memory, compute}; }
};

struct TaskDemand {
    double bandwidth = 1.0;  // per participant
    double memory = 1.0;
    double compute = 1.0;
    double min_participants = 0.0;  // X_l
};

struct AvailabilityVector {
    std::vector<std::uint8_t> edge_available;  // x_n
    std::vector<std::size_t> task_available;   // x_l
};

/// Independent Bernoulli draw per edge at its task's rate.
AvailabilityVector sample_availability(std::span<const double> task_rates, std::span<const std::size_t> edge_tasks,
                                       Rng& rng);

enum class UtilityKind { logarithmic };

UtilityKind parse_utility(std::string_view name);

/// argmax_{0 <= y <= y_max} V(y) - lambda y.
double auxiliary_target(UtilityKind kind, double weight, double lambda, double y_max);

struct MultiplierState {
    std::vector<double> lambda;
    std::vector<double> mu;
};

/// Projected subgradient step on both multipliers; participants[l] = q_l x_l.
void update_multipliers(MultiplierState& state, std::span<const double> participants, std::span<const double> targets,
                        std::span<const double> min_participants, double step);

/// Proportional-fair round decision; tasks with no available edge are never selected.
std::vector<std::uint8_t> select_tasks(const MultiplierState& state, std::span<const std::size_t> task_available,
                                       std::span<const TaskDemand> demands, const CloudCapacity& capacity,
                                       std::vector<double>* weights_out = nullptr);

enum class SelectionPolicy { fl_pf, fl_greedy, fl_rr, bench, no_fl };

SelectionPolicy parse_policy(std::string_view name);
std::string_view policy_name(SelectionPolicy policy);

/// Tries tasks in `order`, adding each one whose demand still fits.
std::vector<std::uint8_t> fill_in_order(std::span<const std::size_t> order, std::span<const std::size_t> task_available,
                                        std::span<const TaskDemand> demands, const CloudCapacity& capacity);

/// Greedy order: descending availability, ties to the lower index.
std::vector<std::size_t> greedy_order(std::span<const std::size_t> task_available);
/// Round-robin order starting at `pointer`.
std::vector<std::size_t> round_robin_order(std::size_t pointer, std::size_t task_count);

struct SelectionParams {
    double step_size = 0.05;
    bool decaying_step = false;  // alpha_r = step_size / ceil(r / 50)
    double initial_multiplier = 1.0;
    UtilityKind utility = UtilityKind::logarithmic;
};

struct RoundDecision {
    std::vector<std::uint8_t> selected;
    std::vector<double> weights;
};

/// Stateful selector for one of the five policies. Call select() once per round,
/// then end_round() with the same availability.
class TaskSelector {
public:
    TaskSelector(SelectionPolicy policy, std::vector<TaskDemand> demands, CloudCapacity capacity,
                 std::vector<double> utility_weights, std::vector<double> y_caps, SelectionParams params = {});

    SelectionPolicy policy() const { return policy_; }
    const MultiplierState& multipliers() const { return mult_; }
    std::size_t round_robin_pointer() const { return rr_pointer_; }

    RoundDecision select(std::span<const std::size_t> task_available) const;
    void end_round(const RoundDecision& decision, std::span<const std::size_t> task_available);

    double step_size(std::size_t round) const;

private:
    SelectionPolicy policy_;
    std::vector<TaskDemand> demands_;
    CloudCapacity capacity_;
    std::vector<double> utility_weights_;
    std::vector<double> y_caps_;
    SelectionParams params_;
    MultiplierState mult_;
    std::size_t rr_pointer_ = 0;
    std::size_t round_ = 1;
};

/// Selection-only run without any learning: per-round participants per task.
struct SelectionRun {
    std::vector<std::vector<double>> participants;  // [round][task]
    std::vector<std::vector<double>> lambda;        // [round][task], after the update
    std::vector<std::vector<double>> mu;

    /// Running average of participants over all rounds, per task.
    std::vector<double> average_participants() const;
};

SelectionRun simulate_selection(TaskSelector selector, std::span<const double> task_rates,
                                std::span<const std::size_t> edges_per_task, std::size_t rounds, std::uint64_t seed);

}  // namespace frl
