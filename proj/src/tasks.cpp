#include "frl/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "frl/errors.hpp"

namespace frl {

namespace {

template <class Device>
void append(std::vector<Device>& out, std::size_t count, const Device& proto) {
    out.insert(out.end(), count, proto);
}

std::size_t scenario_index(const std::string& scenario) {
    if (scenario.size() == 1 && scenario[0] >= 'A' && scenario[0] <= 'E')
        return static_cast<std::size_t>(scenario[0] - 'A');
    throw ConfigError("unknown scenario '" + scenario + "' (built-in scenarios are A-E)");
}

void check_decisions(const EdgeAction& action, std::size_t expected) {
    if (action.decisions.size() != expected)
        throw ContractViolation("action carries " + std::to_string(action.decisions.size()) +
                                " decisions, task expects " + std::to_string(expected));
}

}  // namespace

std::vector<double> RrsConfig::default_power_grid() {
    std::vector<double> grid{0.0};
    for (int dbm = 5; dbm <= 40; dbm += 5) grid.push_back(rrs::dbm_to_watt(dbm));
    return grid;
}

namespace rrs {

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double pathloss_db(const RrsConfig& config, double distance_m) {
    return config.pathloss_intercept_db + config.pathloss_slope_db * std::log10(distance_m);
}

double channel_gain_for(const RrsConfig& config, double distance_m, double shadowing_db) {
    return std::pow(10.0, -(pathloss_db(config, distance_m) + shadowing_db) / 10.0);
}

double achievable_rate_mbps(const RrsConfig& config, double power_w, double gain) {
    const double noise_w = dbm_to_watt(config.noise_dbm);
    return config.bandwidth_hz * std::log2(1.0 + power_w * gain / noise_w) / 1.0e6;
}

}  // namespace rrs

std::size_t EdgeConfig::device_count() const {
    return std::visit([](const auto& p) { return p.devices.size(); }, params);
}

void EdgeConfig::validate() const {
    if (device_count() == 0) throw ConfigError("scenario '" + scenario + "' has no devices");
    const bool matches = std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, WptConfig>) return task == TaskId::wireless_power_transfer;
            else if constexpr (std::is_same_v<T, DgConfig>) return task == TaskId::data_gathering;
            else return task == TaskId::radio_resource;
        },
        params);
    if (!matches) throw ConfigError("scenario parameters do not match task " + std::string(task_label(task)));

    if (const auto* a = std::get_if<WptConfig>(&params)) {
        if (a->charge_levels.empty()) throw ConfigError("charge_levels must not be empty");
        for (const auto& d : a->devices)
            if (d.max_battery <= 0 || d.initial_battery < 0 || d.initial_battery > d.max_battery)
                throw ConfigError("battery parameters out of range in scenario '" + scenario + "'");
    } else if (const auto* b = std::get_if<DgConfig>(&params)) {
        for (const auto& d : b->devices)
            if (d.max_buffer <= 0 || d.arrival_rate < 0 || d.mean_capacity < 0)
                throw ConfigError("buffer parameters out of range in scenario '" + scenario + "'");
    } else {
        const auto& c = std::get<RrsConfig>(params);
        if (c.power_grid_w.empty()) throw ConfigError("power grid must not be empty");
        for (const auto& d : c.devices)
            if (d.distance_m <= 0 || d.rate_requirement_mbps < 0)
                throw ConfigError("radio parameters out of range in scenario '" + scenario + "'");
    }
}

TaskSpec task_spec(const EdgeConfig& config) {
    TaskSpec spec;
    spec.id = config.task;
    switch (config.task) {
        case TaskId::wireless_power_transfer: spec.state_info_count = 3; break;
        case TaskId::data_gathering: spec.state_info_count = 2; break;
        case TaskId::radio_resource:
            spec.state_info_count = 2;
            spec.decision_grids.push_back(std::get<RrsConfig>(config.params).power_grid_w);
            break;
    }
    return spec;
}

EdgeConfig load_scenario(TaskId task, const std::string& scenario) {
    const std::size_t s = scenario_index(scenario);
    EdgeConfig config;
    config.task = task;
    config.scenario = scenario;
    switch (task) {
        case TaskId::wireless_power_transfer: {
            constexpr std::size_t devices[] = {7, 8, 9, 8, 8};
            constexpr double initial[] = {20, 30, 40, 30, 40};
            WptConfig p;
            WptDevice proto;
            proto.initial_battery = initial[s];
            append(p.devices, devices[s], proto);
            config.params = std::move(p);
            break;
        }
        case TaskId::data_gathering: {
            // devices with mean capacity 30 / 50 / 70 samples
            constexpr std::size_t split[][3] = {{1, 2, 1}, {3, 2, 2}, {3, 4, 3}, {2, 2, 2}, {3, 3, 3}};
            constexpr double arrival[] = {15, 10, 5, 10, 5};
            constexpr double capacity[] = {30, 50, 70};
            DgConfig p;
            for (std::size_t i = 0; i < 3; ++i)
                append(p.devices, split[s][i], DgDevice{capacity[i], arrival[s], 90.0});
            config.params = std::move(p);
            break;
        }
        case TaskId::radio_resource: {
            // devices at 20 / 50 / 80 m from the AP
            constexpr std::size_t split[][3] = {{1, 2, 1}, {3, 3, 3}, {5, 10, 5}, {2, 2, 2}, {4, 4, 4}};
            constexpr double requirement[] = {1.0, 0.5, 0.2, 0.4, 0.3};
            constexpr double distance[] = {20, 50, 80};
            RrsConfig p;
            for (std::size_t i = 0; i < 3; ++i)
                append(p.devices, split[s][i], RrsDevice{distance[i], requirement[s]});
            config.params = std::move(p);
            break;
        }
    }
    return config;
}

int sample_active(int previous, Rng& rng, double flip_probability) {
    return bernoulli(rng, flip_probability) ? 1 - previous : previous;
}

double sample_capacity(double mean, double variance, Rng& rng) {
    std::normal_distribution<double> normal(mean, std::sqrt(variance));
    return std::max(0.0, std::floor(normal(rng)));
}

namespace {

double draw_charge(const WptConfig& config, Rng& rng) {
    return config.charge_levels[uniform_index(rng, config.charge_levels.size())];
}

double draw_gain(const RrsConfig& config, const RrsDevice& device, Rng& rng) {
    std::normal_distribution<double> shadow(0.0, config.shadowing_db);
    return rrs::channel_gain_for(config, device.distance_m, shadow(rng));
}

}  // namespace

EdgeState env_reset(const EdgeConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng{seed};
    return std::visit(
        [&](const auto& p) -> EdgeState {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, WptConfig>) {
                EdgeState s(p.devices.size(), 3);
                for (std::size_t m = 0; m < p.devices.size(); ++m) {
                    s.at(m, wpt::battery) = p.devices[m].initial_battery;
                    s.at(m, wpt::active) = bernoulli(rng, 0.5) ? 1.0 : 0.0;
                    s.at(m, wpt::charge_rate) = draw_charge(p, rng);
                }
                return s;
            } else if constexpr (std::is_same_v<T, DgConfig>) {
                EdgeState s(p.devices.size(), 2);
                for (std::size_t m = 0; m < p.devices.size(); ++m) {
                    s.at(m, dg::remaining_buffer) = p.devices[m].max_buffer;  // empty buffer
                    s.at(m, dg::capacity) = sample_capacity(p.devices[m].mean_capacity, p.capacity_variance, rng);
                }
                return s;
            } else {
                EdgeState s(p.devices.size(), 2);
                for (std::size_t m = 0; m < p.devices.size(); ++m) {
                    s.at(m, rrs::channel_gain) = draw_gain(p, p.devices[m], rng);
                    s.at(m, rrs::dissatisfaction) = 0.0;
                }
                return s;
            }
        },
        config.params);
}

double wpt_reward(const WptConfig& config, std::span<const double> batteries) {
    double cost = 0.0;
    for (std::size_t m = 0; m < batteries.size(); ++m) {
        const auto& d = config.devices[m];
        if (batteries[m] <= d.low_threshold) cost += 1.0;
        if (batteries[m] == 0.0) cost += d.outage_cost;
    }
    return -cost;
}

Transition wpt_step(const WptConfig& config, const EdgeState& state, const EdgeAction& action, Rng& rng) {
    check_decisions(action, 0);
    const std::size_t n = state.device_count();
    Transition out{state, 0.0};
    std::vector<double> batteries(n);
    for (std::size_t m = 0; m < n; ++m) {
        const auto& d = config.devices[m];
        const double scheduled = (m == action.device) ? 1.0 : 0.0;
        const double b = state.at(m, wpt::battery) - state.at(m, wpt::active) * d.discharge_rate +
                         scheduled * state.at(m, wpt::charge_rate);
        batteries[m] = std::min(std::max(0.0, b), d.max_battery);
        out.next_state.at(m, wpt::battery) = batteries[m];
    }
    out.reward = wpt_reward(config, batteries);
    for (std::size_t m = 0; m < n; ++m) {
        const int active = static_cast<int>(state.at(m, wpt::active));
        out.next_state.at(m, wpt::active) = sample_active(active, rng, config.activity_flip_probability);
        out.next_state.at(m, wpt::charge_rate) = draw_charge(config, rng);
    }
    return out;
}

DgSlotDetail dg_device_update(double buffer, double arrivals, double served, double max_buffer) {
    const double raw = buffer + arrivals - served;
    DgSlotDetail out;
    out.buffer = buffer;
    out.arrivals = arrivals;
    out.gathered = std::min(served, buffer + arrivals);
    out.next_buffer = std::min(std::max(0.0, raw), max_buffer);
    out.dropped = std::max(0.0, raw - max_buffer);
    return out;
}

Transition dg_step(const DgConfig& config, const EdgeState& state, const EdgeAction& action, Rng& rng,
                   std::vector<DgSlotDetail>* detail) {
    check_decisions(action, 0);
    const std::size_t n = state.device_count();
    Transition out{state, 0.0};
    if (detail) detail->assign(n, {});
    for (std::size_t m = 0; m < n; ++m) {
        const auto& d = config.devices[m];
        std::poisson_distribution<long> arrivals_dist(d.arrival_rate);
        const double buffer = d.max_buffer - state.at(m, dg::remaining_buffer);
        const double capacity = state.at(m, dg::capacity);
        const double arrivals = d.arrival_rate > 0 ? static_cast<double>(arrivals_dist(rng)) : 0.0;
        const auto slot = dg_device_update(buffer, arrivals, (m == action.device) ? capacity : 0.0, d.max_buffer);
        out.reward += slot.gathered - slot.dropped;
        out.next_state.at(m, dg::remaining_buffer) = d.max_buffer - slot.next_buffer;
        out.next_state.at(m, dg::capacity) = sample_capacity(d.mean_capacity, config.capacity_variance, rng);
        if (detail) (*detail)[m] = slot;
    }
    return out;
}

Transition rrs_step(const RrsConfig& config, const EdgeState& state, const EdgeAction& action, Rng& rng) {
    check_decisions(action, 1);
    const double power = action.decisions[0];
    if (std::find(config.power_grid_w.begin(), config.power_grid_w.end(), power) == config.power_grid_w.end())
        throw ContractViolation("transmit power is not a grid level");
    const std::size_t n = state.device_count();
    Transition out{state, 0.0};
    double weighted_rate = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double dod = state.at(m, rrs::dissatisfaction);
        const double rate =
            (m == action.device) ? rrs::achievable_rate_mbps(config, power, state.at(m, rrs::channel_gain)) : 0.0;
        weighted_rate += dod * rate;
        out.next_state.at(m, rrs::dissatisfaction) =
            std::max(0.0, dod + config.devices[m].rate_requirement_mbps - rate);
    }
    out.reward = weighted_rate - config.power_cost * power;
    for (std::size_t m = 0; m < n; ++m)
        out.next_state.at(m, rrs::channel_gain) = draw_gain(config, config.devices[m], rng);
    return out;
}

}  // namespace frl
