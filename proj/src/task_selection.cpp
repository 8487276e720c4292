#include "frl/task_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frl/errors.hpp"

namespace frl {

AvailabilityVector sample_availability(std::span<const double> task_rates, std::span<const std::size_t> edge_tasks,
                                       Rng& rng) {
    for (double r : task_rates)
        if (!(r >= 0.0 && r <= 1.0)) throw DomainError("availability rates must lie in [0, 1]");
    AvailabilityVector out;
    out.task_available.assign(task_rates.size(), 0);
    out.edge_available.reserve(edge_tasks.size());
    for (auto task : edge_tasks) {
        if (task >= task_rates.size()) throw ContractViolation("edge refers to an unknown task");
        const bool up = bernoulli(rng, task_rates[task]);
        out.edge_available.push_back(up ? 1 : 0);
        if (up) ++out.task_available[task];
    }
    return out;
}

UtilityKind parse_utility(std::string_view name) {
    if (name == "log" || name == "logarithmic") return UtilityKind::logarithmic;
    throw ConfigError("unknown utility kind '" + std::string(name) + "'");
}

double auxiliary_target(UtilityKind kind, double weight, double lambda, double y_max) {
    if (!(y_max > 0)) throw DomainError("y_max must be positive");
    switch (kind) {
        case UtilityKind::logarithmic:
            // d/dy (w log y - lambda y) = 0  =>  y = w / lambda
            if (lambda <= 0.0) return y_max;
            return std::min(weight / lambda, y_max);
    }
    throw ConfigError("unknown utility kind");
}

void update_multipliers(MultiplierState& state, std::span<const double> participants, std::span<const double> targets,
                        std::span<const double> min_participants, double step) {
    if (!(step > 0)) throw DomainError("step size must be positive");
    const std::size_t n = state.lambda.size();
    if (state.mu.size() != n || participants.size() != n || targets.size() != n || min_participants.size() != n)
        throw ContractViolation("multiplier update: per-task vectors differ in length");
    for (std::size_t l = 0; l < n; ++l) {
        state.lambda[l] = std::max(0.0, state.lambda[l] - step * (participants[l] - targets[l]));
        state.mu[l] = std::max(0.0, state.mu[l] - step * (participants[l] - min_participants[l]));
    }
}

namespace {

ResourceVector round_demand(const TaskDemand& d, std::size_t available) {
    const double x = static_cast<double>(available);
    return {x * d.bandwidth, x * d.memory, x * d.compute};
}

}  // namespace

std::vector<std::uint8_t> select_tasks(const MultiplierState& state, std::span<const std::size_t> task_available,
                                       std::span<const TaskDemand> demands, const CloudCapacity& capacity,
                                       std::vector<double>* weights_out) {
    const std::size_t n = task_available.size();
    if (demands.size() != n || state.lambda.size() != n || state.mu.size() != n)
        throw ContractViolation("task selection: per-task vectors differ in length");
    std::vector<double> weights(n);
    std::vector<std::size_t> candidates;
    for (std::size_t l = 0; l < n; ++l) {
        weights[l] = (state.lambda[l] + state.mu[l]) * static_cast<double>(task_available[l]);
        if (task_available[l] > 0) candidates.push_back(l);
    }
    std::vector<double> values;
    std::vector<ResourceVector> demand_vectors;
    for (auto l : candidates) {
        values.push_back(weights[l]);
        demand_vectors.push_back(round_demand(demands[l], task_available[l]));
    }
    const auto solution = solve_mdkp(values, demand_vectors, capacity.as_vector());
    std::vector<std::uint8_t> selected(n, 0);
    for (std::size_t i = 0; i < candidates.size(); ++i) selected[candidates[i]] = solution.selected[i];
    if (weights_out) *weights_out = std::move(weights);
    return selected;
}

SelectionPolicy parse_policy(std::string_view name) {
    if (name == "fl-pf") return SelectionPolicy::fl_pf;
    if (name == "fl-greedy") return SelectionPolicy::fl_greedy;
    if (name == "fl-rr") return SelectionPolicy::fl_rr;
    if (name == "bench") return SelectionPolicy::bench;
    if (name == "no-fl") return SelectionPolicy::no_fl;
    throw ConfigError("unknown selection policy '" + std::string(name) + "'");
}

std::string_view policy_name(SelectionPolicy policy) {
    switch (policy) {
        case SelectionPolicy::fl_pf: return "fl-pf";
        case SelectionPolicy::fl_greedy: return "fl-greedy";
        case SelectionPolicy::fl_rr: return "fl-rr";
        case SelectionPolicy::bench: return "bench";
        case SelectionPolicy::no_fl: return "no-fl";
    }
    return "?";
}

std::vector<std::uint8_t> fill_in_order(std::span<const std::size_t> order, std::span<const std::size_t> task_available,
                                        std::span<const TaskDemand> demands, const CloudCapacity& capacity) {
    const ResourceVector cap = capacity.as_vector();
    ResourceVector used{0, 0, 0};
    std::vector<std::uint8_t> selected(task_available.size(), 0);
    for (auto l : order) {
        if (task_available[l] == 0) continue;
        const auto need = round_demand(demands[l], task_available[l]);
        bool fits = true;
        for (std::size_t d = 0; d < 3; ++d) fits = fits && used[d] + need[d] <= cap[d];
        if (!fits) continue;
        for (std::size_t d = 0; d < 3; ++d) used[d] += need[d];
        selected[l] = 1;
    }
    return selected;
}

std::vector<std::size_t> greedy_order(std::span<const std::size_t> task_available) {
    std::vector<std::size_t> order(task_available.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return task_available[a] > task_available[b]; });
    return order;
}

std::vector<std::size_t> round_robin_order(std::size_t pointer, std::size_t task_count) {
    std::vector<std::size_t> order(task_count);
    for (std::size_t i = 0; i < task_count; ++i) order[i] = (pointer + i) % task_count;
    return order;
}

TaskSelector::TaskSelector(SelectionPolicy policy, std::vector<TaskDemand> demands, CloudCapacity capacity,
                           std::vector<double> utility_weights, std::vector<double> y_caps, SelectionParams params)
    : policy_(policy),
      demands_(std::move(demands)),
      capacity_(capacity),
      utility_weights_(std::move(utility_weights)),
      y_caps_(std::move(y_caps)),
      params_(params) {
    const std::size_t n = demands_.size();
    if (utility_weights_.size() != n || y_caps_.size() != n)
        throw ConfigError("task selector: per-task vectors differ in length");
    if (!(params_.step_size > 0)) throw ConfigError("step size must be positive");
    if (params_.initial_multiplier < 0) throw ConfigError("initial multiplier must be non-negative");
    mult_.lambda.assign(n, params_.initial_multiplier);
    mult_.mu.assign(n, params_.initial_multiplier);
}

double TaskSelector::step_size(std::size_t round) const {
    if (!params_.decaying_step) return params_.step_size;
    return params_.step_size / std::ceil(static_cast<double>(round) / 50.0);
}

RoundDecision TaskSelector::select(std::span<const std::size_t> task_available) const {
    const std::size_t n = demands_.size();
    if (task_available.size() != n) throw ContractViolation("availability does not match the task count");
    RoundDecision out;
    out.weights.assign(n, 0.0);
    switch (policy_) {
        case SelectionPolicy::fl_pf:
            out.selected = select_tasks(mult_, task_available, demands_, capacity_, &out.weights);
            break;
        case SelectionPolicy::fl_greedy:
            for (std::size_t l = 0; l < n; ++l) out.weights[l] = static_cast<double>(task_available[l]);
            out.selected = fill_in_order(greedy_order(task_available), task_available, demands_, capacity_);
            break;
        case SelectionPolicy::fl_rr:
            out.selected = fill_in_order(round_robin_order(rr_pointer_, n), task_available, demands_, capacity_);
            break;
        case SelectionPolicy::bench:
            out.selected.assign(n, 0);
            for (std::size_t l = 0; l < n; ++l) out.selected[l] = task_available[l] > 0 ? 1 : 0;
            break;
        case SelectionPolicy::no_fl:
            out.selected.assign(n, 0);
            break;
    }
    return out;
}

void TaskSelector::end_round(const RoundDecision& decision, std::span<const std::size_t> task_available) {
    const std::size_t n = demands_.size();
    if (policy_ == SelectionPolicy::fl_pf) {
        std::vector<double> participants(n), targets(n), minimum(n);
        for (std::size_t l = 0; l < n; ++l) {
            participants[l] = decision.selected[l] ? static_cast<double>(task_available[l]) : 0.0;
            targets[l] = auxiliary_target(params_.utility, utility_weights_[l], mult_.lambda[l], y_caps_[l]);
            minimum[l] = demands_[l].min_participants;
        }
        update_multipliers(mult_, participants, targets, minimum, step_size(round_));
    } else if (policy_ == SelectionPolicy::fl_rr && n > 0) {
        rr_pointer_ = (rr_pointer_ + 1) % n;
    }
    ++round_;
}

std::vector<double> SelectionRun::average_participants() const {
    if (participants.empty()) return {};
    std::vector<double> avg(participants.front().size(), 0.0);
    for (const auto& row : participants)
        for (std::size_t l = 0; l < row.size(); ++l) avg[l] += row[l];
    for (double& a : avg) a /= static_cast<double>(participants.size());
    return avg;
}

SelectionRun simulate_selection(TaskSelector selector, std::span<const double> task_rates,
                                std::span<const std::size_t> edges_per_task, std::size_t rounds, std::uint64_t seed) {
    std::vector<std::size_t> edge_tasks;
    for (std::size_t l = 0; l < edges_per_task.size(); ++l) edge_tasks.insert(edge_tasks.end(), edges_per_task[l], l);
    Rng rng = make_stream(seed, StreamKind::availability, 0);
    SelectionRun run;
    for (std::size_t r = 0; r < rounds; ++r) {
        const auto avail = sample_availability(task_rates, edge_tasks, rng);
        const auto decision = selector.select(avail.task_available);
        std::vector<double> row(task_rates.size());
        for (std::size_t l = 0; l < row.size(); ++l)
            row[l] = decision.selected[l] ? static_cast<double>(avail.task_available[l]) : 0.0;
        run.participants.push_back(std::move(row));
        selector.end_round(decision, avail.task_available);
        run.lambda.push_back(selector.multipliers().lambda);
        run.mu.push_back(selector.multipliers().mu);
    }
    return run;
}

}  // namespace frl
