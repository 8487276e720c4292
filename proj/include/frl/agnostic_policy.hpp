#pragma once

// Edge-agnostic encoding of states and actions.
//
// Each state-information axis k is cut into H_k half-open intervals
// [lo, b_1), [b_1, b_2), ..., [b_{H-1}, hi]; a device's condition is the tuple
// of interval indices of its K values. The agnostic state is the binary
// occupancy tensor over conditions, flattened row-major over (h_1, ..., h_K)
// for the network input. An agnostic action names a condition plus one value
// per decision grid; it is executed by scheduling any device in that condition.
//
// Indices are 0-based throughout.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "frl/env_core.hpp"
#include "frl/random.hpp"

namespace frl {

struct AxisPartition {
    std::vector<double> boundaries;  // strictly increasing interior cut points
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    std::size_t interval_count() const { return boundaries.size() + 1; }
    void validate() const;
};

struct PartitionSpec {
    std::vector<AxisPartition> axes;  // one per state-information type

    std::vector<std::size_t> shape() const;
    std::size_t cell_count() const;
    void validate() const;
};

/// Interval holding `value`; the last interval is closed at `upper`.
std::size_t partition_index(double value, const AxisPartition& axis);

using Condition = std::vector<std::size_t>;

Condition device_condition(std::span<const double> info, const PartitionSpec& spec);
std::size_t flatten_condition(const Condition& condition, const std::vector<std::size_t>& shape);
Condition unflatten_condition(std::size_t cell, const std::vector<std::size_t>& shape);

struct AgnosticState {
    std::vector<std::size_t> shape;
    std::vector<std::uint8_t> occupancy;  // row-major, one byte per cell

    bool occupied(std::size_t cell) const { return occupancy[cell] != 0; }
    std::size_t occupied_count() const;
    /// 0/1 network input.
    std::vector<double> as_input() const;

    friend bool operator==(const AgnosticState&, const AgnosticState&) = default;
};

AgnosticState encode_state(const EdgeState& state, const PartitionSpec& spec);

struct AgnosticAction {
    Condition condition;
    std::vector<double> decisions;

    friend bool operator==(const AgnosticAction&, const AgnosticAction&) = default;
};

/// Full (unmasked) agnostic action space of a task. Action index =
/// cell * decision_combinations + decision_index, decisions row-major over grids.
class ActionSpace {
public:
    ActionSpace(std::vector<std::size_t> shape, std::vector<std::vector<double>> decision_grids);

    std::size_t size() const { return cells_ * combos_; }
    std::size_t cell_count() const { return cells_; }
    std::size_t decision_combinations() const { return combos_; }
    const std::vector<std::size_t>& shape() const { return shape_; }
    const std::vector<std::vector<double>>& decision_grids() const { return grids_; }

    std::size_t cell_of(std::size_t action) const { return action / combos_; }
    AgnosticAction decode(std::size_t action) const;
    std::size_t encode(const AgnosticAction& action) const;

    /// mask[a] = 1 iff the condition of action a is occupied.
    std::vector<std::uint8_t> feasible_mask(const AgnosticState& state) const;

private:
    std::vector<std::size_t> shape_;
    std::vector<std::vector<double>> grids_;
    std::size_t cells_ = 1;
    std::size_t combos_ = 1;
};

/// {(h, g) : occupancy(h) = 1, g in grids}, ordered by action index.
std::vector<AgnosticAction> feasible_actions(const AgnosticState& state,
                                             const std::vector<std::vector<double>>& decision_grids);

/// Picks uniformly among devices whose condition equals action.condition.
EdgeAction translate_action(const AgnosticAction& action, const EdgeState& state, const PartitionSpec& spec,
                            Rng& rng);

}  // namespace frl
