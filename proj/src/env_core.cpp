#include "frl/env_core.hpp"

#include <cmath>

#include "frl/errors.hpp"
#include "frl/tasks.hpp"

namespace frl {

std::string_view task_label(TaskId id) {
    switch (id) {
        case TaskId::wireless_power_transfer: return "A";
        case TaskId::data_gathering: return "B";
        case TaskId::radio_resource: return "C";
    }
    return "?";
}

TaskId parse_task(std::string_view label) {
    if (label == "A") return TaskId::wireless_power_transfer;
    if (label == "B") return TaskId::data_gathering;
    if (label == "C") return TaskId::radio_resource;
    throw ConfigError("unknown task '" + std::string(label) + "' (expected A, B or C)");
}

void TaskSpec::validate() const {
    if (state_info_count < 1) throw ConfigError("task needs at least one state-information type");
    for (const auto& grid : decision_grids)
        if (grid.empty()) throw ConfigError("decision grid must not be empty");
}

EdgeState::EdgeState(std::size_t devices, std::size_t info_count)
    : devices_(devices), info_count_(info_count), values_(devices * info_count, 0.0) {
    if (devices == 0) throw ContractViolation("an edge needs at least one device");
    if (info_count == 0) throw ContractViolation("state information vector must not be empty");
}

Transition env_step(const EdgeConfig& config, const EdgeState& state, const EdgeAction& action, Rng& rng) {
    if (state.device_count() == 0) throw ContractViolation("edge state has no devices");
    if (action.device >= state.device_count())
        throw ContractViolation("scheduled device " + std::to_string(action.device) + " out of range");
    return std::visit(
        [&](const auto& params) -> Transition {
            using T = std::decay_t<decltype(params)>;
            if constexpr (std::is_same_v<T, WptConfig>) return wpt_step(params, state, action, rng);
            else if constexpr (std::is_same_v<T, DgConfig>) return dg_step(params, state, action, rng);
            else return rrs_step(params, state, action, rng);
        },
        config.params);
}

double discounted_return(std::span<const double> rewards, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("discount factor must lie in [0, 1)");
    double total = 0.0;
    double weight = 1.0;
    for (double r : rewards) {
        total += weight * r;
        weight *= gamma;
    }
    return total;
}

}  // namespace frl
