#pragma once

// The three concrete scheduling environments and the scenario catalog.
//
// State-information layout per device:
//   wireless power transfer: [battery (mJ), active (0/1), charge rate (mW)]
//   data gathering:          [remaining buffer (samples), capacity (samples)]
//   radio resource:          [channel power gain (linear), dissatisfaction (Mb)]
//
// Every quantity the dynamics need is either static (held in EdgeConfig) or
// part of the observed state, so a step is a pure function of
// (config, state, action, rng).

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "frl/env_core.hpp"

namespace frl {

// ---------------------------------------------------------------------------
// Wireless power transfer

struct WptDevice {
    double max_battery = 100.0;     // B_m, mJ
    double low_threshold = 10.0;    // B_m^low, mJ
    double outage_cost = 5.0;       // C_m
    double discharge_rate = 1.0;    // P_m^dch, mW
    double initial_battery = 20.0;  // mJ
};

struct WptConfig {
    std::vector<WptDevice> devices;
    /// Charging rate levels (mW) drawn uniformly each slot for each device.
    std::vector<double> charge_levels{1.0, 2.0, 3.0, 4.0, 5.0};
    double activity_flip_probability = 0.5;  // p^ai = p^ia
};

namespace wpt {
inline constexpr std::size_t battery = 0;
inline constexpr std::size_t active = 1;
inline constexpr std::size_t charge_rate = 2;
}  // namespace wpt

// ---------------------------------------------------------------------------
// Data gathering

struct DgDevice {
    double mean_capacity = 50.0;  // C_m, samples per slot
    double arrival_rate = 10.0;   // D_m, samples per slot
    double max_buffer = 90.0;     // B_m, samples
};

struct DgConfig {
    std::vector<DgDevice> devices;
    double capacity_variance = 9.0;
};

namespace dg {
inline constexpr std::size_t remaining_buffer = 0;
inline constexpr std::size_t capacity = 1;
}  // namespace dg

/// Per-device bookkeeping of one data-gathering slot.
struct DgSlotDetail {
    double buffer = 0.0;
    double arrivals = 0.0;
    double gathered = 0.0;
    double dropped = 0.0;
    double next_buffer = 0.0;
};

// ---------------------------------------------------------------------------
// Radio resource scheduling

struct RrsDevice {
    double distance_m = 50.0;
    double rate_requirement_mbps = 1.0;
};

struct RrsConfig {
    std::vector<RrsDevice> devices;
    double bandwidth_hz = 1.0e6;
    double noise_dbm = -104.0;
    double pathloss_intercept_db = 35.0;  // PL(d) = intercept + slope * log10(d)
    double pathloss_slope_db = 35.0;
    double shadowing_db = 10.0;
    /// Transmit power levels in watts. The first level is "off" (0 W).
    std::vector<double> power_grid_w = default_power_grid();
    /// Reward weight on transmit power (per watt).
    double power_cost = 1.0;

    static std::vector<double> default_power_grid();
};

namespace rrs {
inline constexpr std::size_t channel_gain = 0;
inline constexpr std::size_t dissatisfaction = 1;

double dbm_to_watt(double dbm);
double pathloss_db(const RrsConfig& config, double distance_m);
/// Linear channel power gain for a given shadowing realization (dB).
double channel_gain_for(const RrsConfig& config, double distance_m, double shadowing_db);
/// Shannon rate in Mbps.
double achievable_rate_mbps(const RrsConfig& config, double power_w, double gain);
}  // namespace rrs

// ---------------------------------------------------------------------------

struct EdgeConfig {
    TaskId task{};
    std::string scenario;
    std::variant<WptConfig, DgConfig, RrsConfig> params;

    std::size_t device_count() const;
    void validate() const;
};

TaskSpec task_spec(const EdgeConfig& config);

/// Built-in scenario table (A..E for each task) with default task constants.
EdgeConfig load_scenario(TaskId task, const std::string& scenario);

/// Two-state activity chain: flips with the configured probability.
int sample_active(int previous, Rng& rng, double flip_probability = 0.5);

Transition wpt_step(const WptConfig& config, const EdgeState& state, const EdgeAction& action, Rng& rng);
/// Buffer bookkeeping of one device for given arrivals; `served` is the capacity if scheduled, else 0.
DgSlotDetail dg_device_update(double buffer, double arrivals, double served, double max_buffer);
Transition dg_step(const DgConfig& config, const EdgeState& state, const EdgeAction& action, Rng& rng,
                   std::vector<DgSlotDetail>* detail = nullptr);
Transition rrs_step(const RrsConfig& config, const EdgeState& state, const EdgeAction& action, Rng& rng);

/// Task-A reward on post-update batteries.
double wpt_reward(const WptConfig& config, std::span<const double> batteries);

/// Task-B capacity draw: floor(Normal(mean, variance)) clamped below at 0.
double sample_capacity(double mean, double variance, Rng& rng);

}  // namespace frl
