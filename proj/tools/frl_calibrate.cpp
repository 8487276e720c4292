// Reward-range calibration with a uniformly random scheduler.
//
// For the radio task the power weight is calibrated first: beta is the mean
// dissatisfaction-weighted rate at full power divided by the full power, so a
// full-power transmission to an average device nets roughly zero reward.
// Then every task is run with the random scheduler over all five scenarios and
// the per-slot reward range is reported.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "frl/config.hpp"
#include "frl/env_core.hpp"
#include "frl/tasks.hpp"

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    std::size_t n = 0;
};

frl::EdgeAction random_action(const frl::EdgeState& state, const frl::TaskSpec& spec, frl::Rng& rng) {
    frl::EdgeAction a;
    a.device = frl::uniform_index(rng, state.device_count());
    for (const auto& grid : spec.decision_grids) a.decisions.push_back(grid[frl::uniform_index(rng, grid.size())]);
    return a;
}

double calibrate_power_cost(std::size_t slots, std::uint64_t seed) {
    double total = 0.0;
    std::size_t n = 0;
    double full = 0.0;
    for (const char* s : {"A", "B", "C", "D", "E"}) {
        auto config = frl::load_scenario(frl::TaskId::radio_resource, s);
        auto& p = std::get<frl::RrsConfig>(config.params);
        p.power_cost = 0.0;
        full = *std::max_element(p.power_grid_w.begin(), p.power_grid_w.end());
        const auto spec = frl::task_spec(config);
        frl::Rng rng = frl::make_stream(seed, frl::StreamKind::environment, n + 1);
        auto state = frl::env_reset(config, seed + n);
        for (std::size_t t = 0; t < slots; ++t) {
            const auto a = random_action(state, spec, rng);
            const double dod = state.at(a.device, frl::rrs::dissatisfaction);
            total += dod * frl::rrs::achievable_rate_mbps(p, full, state.at(a.device, frl::rrs::channel_gain));
            ++n;
            state = frl::env_step(config, state, a, rng).next_state;
        }
    }
    return total / static_cast<double>(n) / full;
}

Range reward_range(frl::TaskId task, std::size_t slots, std::uint64_t seed, double power_cost) {
    Range r;
    std::size_t k = 0;
    for (const char* s : {"A", "B", "C", "D", "E"}) {
        auto config = frl::load_scenario(task, s);
        if (auto* p = std::get_if<frl::RrsConfig>(&config.params)) p->power_cost = power_cost;
        const auto spec = frl::task_spec(config);
        frl::Rng rng = frl::make_stream(seed, frl::StreamKind::environment, 100 + k);
        auto state = frl::env_reset(config, seed + 100 + k);
        ++k;
        for (std::size_t t = 0; t < slots; ++t) {
            auto tr = frl::env_step(config, state, random_action(state, spec, rng), rng);
            r.lo = std::min(r.lo, tr.reward);
            r.hi = std::max(r.hi, tr.reward);
            r.sum += tr.reward;
            ++r.n;
            state = std::move(tr.next_state);
        }
    }
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reward calibration with a random scheduler"};
    std::size_t slots = 20000;
    std::uint64_t seed = 7;
    app.add_option("--slots", slots, "Slots per scenario")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed");
    CLI11_PARSE(app, argc, argv);

    const double beta = calibrate_power_cost(slots, seed);
    std::printf("power_cost %.6g\n", beta);
    for (std::size_t l = 0; l < frl::task_count; ++l) {
        const auto id = static_cast<frl::TaskId>(l);
        const auto r = reward_range(id, slots, seed, beta);
        std::printf("task %s: lo %.6g hi %.6g mean %.6g\n", std::string(frl::task_label(id)).c_str(), r.lo, r.hi,
                    r.sum / static_cast<double>(r.n));
    }
    return 0;
}
