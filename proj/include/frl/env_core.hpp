#pragma once

// Generic dynamic scheduling MDP contract shared by every task.
//
// An edge observes, for each of its M devices, a vector of K state-information
// values. Each slot it schedules exactly one device and fixes G auxiliary
// decisions, then receives a reward and the next state. Slots last one second,
// so every rate in the task models is a per-slot quantity.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frl/random.hpp"

namespace frl {

enum class TaskId : std::uint8_t {
    wireless_power_transfer = 0,  // task "A"
    data_gathering = 1,           // task "B"
    radio_resource = 2,           // task "C"
};

inline constexpr std::size_t task_count = 3;

std::string_view task_label(TaskId id);
TaskId parse_task(std::string_view label);

struct TaskSpec {
    TaskId id{};
    std::size_t state_info_count = 1;               // K
    std::vector<std::vector<double>> decision_grids;  // one grid per auxiliary decision (G of them)

    std::size_t decision_count() const { return decision_grids.size(); }
    void validate() const;
};

/// Row-major M x K matrix of per-device state information.
class EdgeState {
public:
    EdgeState() = default;
    EdgeState(std::size_t devices, std::size_t info_count);

    std::size_t device_count() const { return devices_; }
    std::size_t info_count() const { return info_count_; }

    std::span<const double> device(std::size_t m) const {
        return {values_.data() + m * info_count_, info_count_};
    }
    std::span<double> device(std::size_t m) { return {values_.data() + m * info_count_, info_count_}; }

    double& at(std::size_t m, std::size_t k) { return values_[m * info_count_ + k]; }
    double at(std::size_t m, std::size_t k) const { return values_[m * info_count_ + k]; }

    const std::vector<double>& values() const { return values_; }

    friend bool operator==(const EdgeState&, const EdgeState&) = default;

private:
    std::size_t devices_ = 0;
    std::size_t info_count_ = 0;
    std::vector<double> values_;
};

struct EdgeAction {
    std::size_t device = 0;
    std::vector<double> decisions;  // one value per decision grid

    friend bool operator==(const EdgeAction&, const EdgeAction&) = default;
};

struct Transition {
    EdgeState next_state;
    double reward = 0.0;  // task-native units
};

struct EdgeConfig;  // see tasks.hpp

/// Initial state of a scenario instance. Identical (config, seed) gives an identical state.
EdgeState env_reset(const EdgeConfig& config, std::uint64_t seed);

/// One slot of the task dynamics. The input state is never modified.
Transition env_step(const EdgeConfig& config, const EdgeState& state, const EdgeAction& action, Rng& rng);

/// sum_t gamma^t r_t, gamma in [0, 1).
double discounted_return(std::span<const double> rewards, double gamma);

}  // namespace frl
