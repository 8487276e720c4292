// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// non-zero if any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "frl/config.hpp"
#include "frl/errors.hpp"
#include "frl/knapsack.hpp"
#include "frl/mlp.hpp"
#include "frl/orchestrator.hpp"
#include "frl/task_selection.hpp"
#include "oracles.hpp"

using namespace frl;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::vector<std::uint64_t> seeds{1, 2, 3};

// ---------------------------------------------------------------------------

Outcome mdkp_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    std::size_t mismatches = 0;
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 1 + uniform_index(rng, 12);
        std::vector<double> values(n);
        std::vector<ResourceVector> demands(n);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = 10.0 * uniform01(rng);
            for (auto& d : demands[i]) d = static_cast<double>(uniform_index(rng, 21));
        }
        ResourceVector caps;
        for (auto& c : caps) c = static_cast<double>(uniform_index(rng, 61));
        const auto got = solve_mdkp(values, demands, caps);
        if (got.objective != oracle::mdkp_best_objective(values, demands, caps)) ++mismatches;
    }
    const double t = seconds_since(t0);
    return {mismatches == 0 && t < 5.0, fmt("%zu mismatches in 200 instances, %.2f s", mismatches, t)};
}

Outcome gradient_check() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(77);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> sizes{1 + uniform_index(rng, 32)};
        const std::size_t hidden = 1 + uniform_index(rng, 2);
        for (std::size_t h = 0; h < hidden; ++h) sizes.push_back(1 + uniform_index(rng, 32));
        sizes.push_back(1 + uniform_index(rng, 32));
        PolicyParams p(sizes);
        for (double& v : p.values()) v = 2 * uniform01(rng) - 1;
        std::vector<double> in(sizes.front()), target(sizes.back());
        for (double& v : in) v = 2 * uniform01(rng) - 1;
        for (double& v : target) v = 2 * uniform01(rng) - 1;

        ForwardTrace trace;
        net_forward(p, in, trace);
        std::vector<double> out_grad(target.size());
        for (std::size_t i = 0; i < target.size(); ++i) out_grad[i] = trace.output()[i] - target[i];
        std::vector<double> analytic(p.values().size(), 0.0);
        net_backward(p, trace, out_grad, analytic);
        worst = std::max(worst, oracle::relative_error(analytic, oracle::numeric_gradient(p, in, target)));
    }
    const double t = seconds_since(t0);
    return {worst < 1e-4 && t < 10.0, fmt("worst relative error %.3g, %.2f s", worst, t)};
}

Outcome aggregation_identity() {
    Rng rng(31);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> sizes{1 + uniform_index(rng, 10), 1 + uniform_index(rng, 20), 1 + uniform_index(rng, 10)};
        CentralPolicy c{TaskId::data_gathering, PolicyParams(sizes), 1};
        for (double& v : c.theta.values()) v = 2 * uniform01(rng) - 1;
        const std::size_t n = 1 + uniform_index(rng, 10);
        std::vector<std::size_t> k(n);
        std::vector<PolicyParams> w(n, c.theta);
        std::vector<LocalDelta> deltas;
        for (std::size_t i = 0; i < n; ++i) {
            k[i] = uniform_index(rng, 500) + 1;
            for (double& v : w[i].values()) v += 2 * uniform01(rng) - 1;
            deltas.push_back(local_gradient(i, c.theta, w[i], k[i]));
        }
        const auto weights = central_weights(k);
        aggregate(c, deltas, weights, n);
        std::vector<double> expected(c.theta.values().size(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < expected.size(); ++j) expected[j] += weights[i] * w[i].values()[j];
        for (std::size_t j = 0; j < expected.size(); ++j)
            worst = std::max(worst, std::abs(expected[j] - c.theta.values()[j]));
    }
    return {worst <= 1e-9, fmt("max abs deviation %.3g over 50 sets", worst)};
}

// Selection-only setup shared by the fairness and participant checks.
constexpr double min_participants = 3.0;

std::vector<double> selection_averages(SelectionPolicy policy, std::uint64_t seed) {
    const std::vector<TaskDemand> demands(3, TaskDemand{1, 1, 1, min_participants});
    TaskSelector selector(policy, demands, CloudCapacity{10, 10, 10}, {1, 1, 1}, {10, 10, 10});
    const std::vector<double> rates{0.7, 0.4, 0.4};
    const std::vector<std::size_t> edges{10, 10, 10};
    return simulate_selection(selector, rates, edges, 2000, seed).average_participants();
}

Outcome fairness() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (auto seed : seeds) {
        const auto pf = selection_averages(SelectionPolicy::fl_pf, seed);
        const auto gr = selection_averages(SelectionPolicy::fl_greedy, seed);
        for (double p : pf) ok = ok && p >= min_participants - 0.15;
        ok = ok && (gr[1] < min_participants || gr[2] < min_participants);
        detail += fmt("seed %llu PF [%.2f %.2f %.2f] Greedy [%.2f %.2f %.2f]; ", static_cast<unsigned long long>(seed),
                      pf[0], pf[1], pf[2], gr[0], gr[1], gr[2]);
    }
    const double t = seconds_since(t0);
    return {ok && t < 30.0, detail + fmt("%.2f s", t)};
}

Outcome participants_vs_round_robin() {
    bool ok = true;
    std::string detail;
    for (auto seed : seeds) {
        const auto pf = selection_averages(SelectionPolicy::fl_pf, seed);
        const auto rr = selection_averages(SelectionPolicy::fl_rr, seed);
        const double tp = std::accumulate(pf.begin(), pf.end(), 0.0);
        const double tr = std::accumulate(rr.begin(), rr.end(), 0.0);
        ok = ok && tp >= tr;
        detail += fmt("seed %llu PF %.3f RR %.3f; ", static_cast<unsigned long long>(seed), tp, tr);
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------

ExperimentConfig desk(SelectionPolicy policy, std::uint64_t seed) {
    auto c = desk_preset();
    c.policy = policy;
    c.seed = seed;
    return c;
}

double final_quartile_mean(const MetricsLog& log) {
    const auto s = log.sum_reward_series();
    const std::size_t from = s.size() - s.size() / 4;
    double sum = 0.0;
    for (std::size_t i = from; i < s.size(); ++i) sum += s[i];
    return sum / static_cast<double>(s.size() - from);
}

Outcome reward_ordering() {
    const auto t0 = std::chrono::steady_clock::now();
    int wins = 0;
    std::string detail;
    for (auto seed : seeds) {
        const double b = final_quartile_mean(run_simulation(desk(SelectionPolicy::bench, seed)));
        const double pf = final_quartile_mean(run_simulation(desk(SelectionPolicy::fl_pf, seed)));
        const double nf = final_quartile_mean(run_simulation(desk(SelectionPolicy::no_fl, seed)));
        const bool ok = b >= pf && pf > nf && pf >= 1.05 * nf;
        wins += ok;
        detail += fmt("seed %llu Bench %.4f PF %.4f NoFL %.4f %s; ", static_cast<unsigned long long>(seed), b, pf, nf,
                      ok ? "ok" : "no");
    }
    const double t = seconds_since(t0);
    return {wins >= 2 && t < 1200.0, detail + fmt("%.0f s", t)};
}

double arrival_window_reward(SelectionPolicy policy, std::uint64_t seed) {
    auto c = desk(policy, seed);
    const std::size_t slot = c.total_slots() * 6 / 10;
    for (std::size_t l = 0; l < task_count; ++l)
        for (const char* scen : {"D", "E"}) c.arrivals.push_back({slot, static_cast<TaskId>(l), scen, 2});
    const auto log = run_simulation(c);
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& e : log.edges) {
        if (e.spawn_slot == 0) continue;
        const std::size_t w = std::min<std::size_t>(500, e.normalized_rewards.size());
        for (std::size_t i = 0; i < w; ++i) sum += e.normalized_rewards[i];
        n += w;
    }
    if (n == 0) throw InvariantViolation("no arriving edge produced rewards");
    return sum / static_cast<double>(n);
}

Outcome new_edge_adaptation() {
    int wins = 0;
    std::string detail;
    for (auto seed : seeds) {
        const double pf = arrival_window_reward(SelectionPolicy::fl_pf, seed);
        const double nf = arrival_window_reward(SelectionPolicy::no_fl, seed);
        wins += pf > nf;
        detail += fmt("seed %llu PF %.4f NoFL %.4f; ", static_cast<unsigned long long>(seed), pf, nf);
    }
    return {wins >= 2, detail};
}

Outcome invariants() {
    std::atomic<std::size_t> transitions{0}, violations{0};
    const Simulation* sim = nullptr;
    SimulationHooks hooks;
    hooks.on_step = [&](const StepRecord& s) {
        ++transitions;
        std::size_t bad = 0;
        const auto& edge = *sim->edges()[s.edge_id].agent;
        const auto& next = s.transition.next_state;
        bad += !(s.agnostic_action < s.feasible.size() && s.feasible[s.agnostic_action]);
        if (s.action.device >= s.state.device_count()) {
            violations += bad + 1;
            return;
        }
        // the scheduled device must sit in the cell the agnostic action named
        const auto& partition = sim->config().task(edge.task()).partition;
        const auto cell =
            flatten_condition(device_condition(s.state.device(s.action.device), partition), partition.shape());
        bad += cell != edge.action_space().cell_of(s.agnostic_action);
        const auto& grids = edge.action_space().decision_grids();
        for (std::size_t g = 0; g < grids.size(); ++g)
            bad += std::find(grids[g].begin(), grids[g].end(), s.action.decisions[g]) == grids[g].end();
        bad += !std::isfinite(s.transition.reward);
        if (const auto* w = std::get_if<WptConfig>(&edge.config().params)) {
            for (std::size_t m = 0; m < next.device_count(); ++m) {
                const double b = next.at(m, wpt::battery);
                bad += b < 0 || b > w->devices[m].max_battery;
            }
        } else if (const auto* d = std::get_if<DgConfig>(&edge.config().params)) {
            for (std::size_t m = 0; m < next.device_count(); ++m) {
                const double b = next.at(m, dg::remaining_buffer);
                bad += b < 0 || b > d->devices[m].max_buffer;
            }
        } else {
            for (std::size_t m = 0; m < next.device_count(); ++m) bad += next.at(m, rrs::dissatisfaction) < 0;
        }
        violations += bad;
    };
    hooks.after_round = [&](const RoundView& v) {
        for (std::size_t l = 0; l < task_count; ++l)
            violations += v.selector.multipliers().lambda[l] < 0 || v.selector.multipliers().mu[l] < 0;
    };
    Simulation run(desk(SelectionPolicy::fl_pf, 1), hooks);
    sim = &run;
    run.run();
    const std::size_t t = transitions.load(), v = violations.load();
    return {v == 0 && t >= 100000, fmt("%zu transitions, %zu violations", t, v)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "frl_acceptance_determinism";
    std::filesystem::remove_all(root);
    const std::vector<std::string> files{"rewards.csv", "participants.csv", "selection.csv", "summary.csv"};
    std::vector<std::vector<std::string>> outputs;
    for (std::size_t threads : {1, 1, 4, 4}) {
        auto c = desk(SelectionPolicy::fl_pf, 5);
        c.threads = threads;
        const auto dir = root / std::to_string(outputs.size());
        write_metrics(run_simulation(c), dir.string(), c.smoothing_rounds);
        std::vector<std::string> contents;
        for (const auto& f : files) contents.push_back(slurp(dir / f));
        outputs.push_back(std::move(contents));
    }
    std::filesystem::remove_all(root);
    const bool single = outputs[0] == outputs[1];
    const bool threaded = outputs[2] == outputs[3];
    const bool across = outputs[0] == outputs[2];
    return {single && threaded && across && !outputs[0][0].empty(),
            fmt("single-threaded %s, 4 threads %s, across modes %s, rewards.csv %zu bytes", single ? "identical" : "differ",
                threaded ? "identical" : "differ", across ? "identical" : "differ", outputs[0][0].size())};
}

struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "knapsack solver matches exhaustive enumeration", mdkp_oracle},
        {2, "backprop matches finite differences", gradient_check},
        {3, "full-participation aggregation is the weighted average", aggregation_identity},
        {4, "FL-PF meets minimum participants, FL-Greedy does not", fairness},
        {5, "reward ordering Bench >= FL-PF > No-FL", reward_ordering},
        {6, "arriving edges learn faster under FL-PF", new_edge_adaptation},
        {7, "environment and selection invariants over a full run", invariants},
        {8, "byte-identical outputs across runs and thread counts", determinism},
        {9, "FL-PF has at least as many participants as FL-RR", participants_vs_round_robin},
    };

    CLI::App app{"Acceptance checks"};
    std::vector<int> only;
    app.add_option("-c,--criterion", only, "Run only these criteria (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.number) == only.end()) continue;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
