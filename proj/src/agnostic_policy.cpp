#include "frl/agnostic_policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "frl/errors.hpp"

namespace frl {

void AxisPartition::validate() const {
    if (!(lower < upper)) throw ConfigError("partition range is empty");
    double prev = lower;
    for (double b : boundaries) {
        if (!(b > prev)) throw ConfigError("partition boundaries must be strictly increasing inside the range");
        prev = b;
    }
    if (!(upper > prev)) throw ConfigError("partition boundary at or above the range top");
}

std::vector<std::size_t> PartitionSpec::shape() const {
    std::vector<std::size_t> out;
    out.reserve(axes.size());
    for (const auto& a : axes) out.push_back(a.interval_count());
    return out;
}

std::size_t PartitionSpec::cell_count() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.interval_count();
    return n;
}

void PartitionSpec::validate() const {
    if (axes.empty()) throw ConfigError("partition needs at least one axis");
    for (const auto& a : axes) a.validate();
}

std::size_t partition_index(double value, const AxisPartition& axis) {
    if (std::isnan(value) || value < axis.lower || value > axis.upper)
        throw DomainError("value " + std::to_string(value) + " outside the partitioned range");
    // first boundary strictly greater than value gives the half-open interval
    const auto it = std::upper_bound(axis.boundaries.begin(), axis.boundaries.end(), value);
    return static_cast<std::size_t>(it - axis.boundaries.begin());
}

Condition device_condition(std::span<const double> info, const PartitionSpec& spec) {
    if (info.size() != spec.axes.size())
        throw ContractViolation("state has " + std::to_string(info.size()) + " information types, partition has " +
                                std::to_string(spec.axes.size()));
    Condition c(info.size());
    for (std::size_t k = 0; k < info.size(); ++k) c[k] = partition_index(info[k], spec.axes[k]);
    return c;
}

std::size_t flatten_condition(const Condition& condition, const std::vector<std::size_t>& shape) {
    if (condition.size() != shape.size()) throw ContractViolation("condition rank mismatch");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (condition[k] >= shape[k]) throw ContractViolation("condition index out of range");
        idx = idx * shape[k] + condition[k];
    }
    return idx;
}

Condition unflatten_condition(std::size_t cell, const std::vector<std::size_t>& shape) {
    Condition c(shape.size());
    for (std::size_t k = shape.size(); k-- > 0;) {
        c[k] = cell % shape[k];
        cell /= shape[k];
    }
    return c;
}

std::size_t AgnosticState::occupied_count() const {
    return static_cast<std::size_t>(std::count_if(occupancy.begin(), occupancy.end(), [](auto v) { return v != 0; }));
}

std::vector<double> AgnosticState::as_input() const { return {occupancy.begin(), occupancy.end()}; }

AgnosticState encode_state(const EdgeState& state, const PartitionSpec& spec) {
    AgnosticState out;
    out.shape = spec.shape();
    out.occupancy.assign(spec.cell_count(), 0);
    for (std::size_t m = 0; m < state.device_count(); ++m)
        out.occupancy[flatten_condition(device_condition(state.device(m), spec), out.shape)] = 1;
    return out;
}

ActionSpace::ActionSpace(std::vector<std::size_t> shape, std::vector<std::vector<double>> decision_grids)
    : shape_(std::move(shape)), grids_(std::move(decision_grids)) {
    for (auto h : shape_) cells_ *= h;
    for (const auto& g : grids_) {
        if (g.empty()) throw ConfigError("decision grid must not be empty");
        combos_ *= g.size();
    }
}

AgnosticAction ActionSpace::decode(std::size_t action) const {
    if (action >= size()) throw ContractViolation("action index out of range");
    AgnosticAction out;
    out.condition = unflatten_condition(action / combos_, shape_);
    std::size_t rest = action % combos_;
    out.decisions.resize(grids_.size());
    for (std::size_t g = grids_.size(); g-- > 0;) {
        out.decisions[g] = grids_[g][rest % grids_[g].size()];
        rest /= grids_[g].size();
    }
    return out;
}

std::size_t ActionSpace::encode(const AgnosticAction& action) const {
    if (action.decisions.size() != grids_.size()) throw ContractViolation("decision count mismatch");
    std::size_t combo = 0;
    for (std::size_t g = 0; g < grids_.size(); ++g) {
        const auto& grid = grids_[g];
        const auto it = std::find(grid.begin(), grid.end(), action.decisions[g]);
        if (it == grid.end()) throw ContractViolation("decision value not in its grid");
        combo = combo * grid.size() + static_cast<std::size_t>(it - grid.begin());
    }
    return flatten_condition(action.condition, shape_) * combos_ + combo;
}

std::vector<std::uint8_t> ActionSpace::feasible_mask(const AgnosticState& state) const {
    if (state.occupancy.size() != cells_) throw ContractViolation("agnostic state does not match action space");
    std::vector<std::uint8_t> mask(size(), 0);
    for (std::size_t cell = 0; cell < cells_; ++cell)
        if (state.occupied(cell)) std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(cell * combos_), combos_, 1);
    return mask;
}

std::vector<AgnosticAction> feasible_actions(const AgnosticState& state,
                                             const std::vector<std::vector<double>>& decision_grids) {
    if (state.occupied_count() == 0) throw InvariantViolation("agnostic state has no occupied condition");
    const ActionSpace space(state.shape, decision_grids);
    std::vector<AgnosticAction> out;
    for (std::size_t cell = 0; cell < space.cell_count(); ++cell) {
        if (!state.occupied(cell)) continue;
        for (std::size_t d = 0; d < space.decision_combinations(); ++d)
            out.push_back(space.decode(cell * space.decision_combinations() + d));
    }
    return out;
}

EdgeAction translate_action(const AgnosticAction& action, const EdgeState& state, const PartitionSpec& spec,
                            Rng& rng) {
    std::vector<std::size_t> matches;
    for (std::size_t m = 0; m < state.device_count(); ++m)
        if (device_condition(state.device(m), spec) == action.condition) matches.push_back(m);
    if (matches.empty()) throw InvariantViolation("no device in the requested condition (stale encoding)");
    const std::size_t pick = matches.size() == 1 ? 0 : uniform_index(rng, matches.size());
    return EdgeAction{matches[pick], action.decisions};
}

}  // namespace frl
