#include "frl/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "frl/errors.hpp"
#include "frl/mlp.hpp"

namespace frl {

std::vector<std::size_t> task_network_shape(const ExperimentConfig& config, TaskId task) {
    const auto& setup = config.task(task);
    const std::string scenario = !setup.edges.empty() ? setup.edges.front().scenario : "A";
    const ActionSpace space(setup.partition.shape(), task_spec(config.edge_config(task, scenario)).decision_grids);
    return network_shape(space, config.dqn.hidden_layers);
}

namespace {

std::vector<std::size_t> selector_caps(const ExperimentConfig& config) {
    std::vector<std::size_t> caps;
    for (const auto& t : config.tasks) {
        std::size_t n = 0;
        for (const auto& e : t.edges) n += e.count;
        caps.push_back(n);
    }
    return caps;
}

TaskSelector make_selector(const ExperimentConfig& config) {
    std::vector<TaskDemand> demands;
    std::vector<double> weights;
    std::vector<double> y_caps;
    const auto caps = selector_caps(config);
    for (std::size_t l = 0; l < task_count; ++l) {
        demands.push_back(config.tasks[l].demand);
        weights.push_back(config.tasks[l].utility_weight);
        y_caps.push_back(std::max<double>(1.0, static_cast<double>(caps[l])));
    }
    return TaskSelector(config.policy, std::move(demands), config.capacity, std::move(weights), std::move(y_caps),
                        config.selection);
}

}  // namespace

Simulation::Simulation(ExperimentConfig config, SimulationHooks hooks)
    : config_(std::move(config)),
      hooks_(std::move(hooks)),
      selector_((config_.validate(), make_selector(config_))),
      availability_rng_(make_stream(config_.seed, StreamKind::availability, 0)) {
    for (std::size_t l = 0; l < task_count; ++l) {
        const auto id = static_cast<TaskId>(l);
        central_[l].task = id;
        central_[l].theta = PolicyParams(task_network_shape(config_, id));
        Rng init = make_stream(config_.seed, StreamKind::central_init, l);
        initialize_fan_in_uniform(central_[l].theta, init);
    }
    arrival_done_.assign(config_.arrivals.size(), 0);
    log_.policy = config_.policy;
    log_.slots_per_round = config_.slots_per_round;
    for (std::size_t l = 0; l < task_count; ++l)
        for (const auto& e : config_.tasks[l].edges)
            for (std::size_t i = 0; i < e.count; ++i) spawn_edge(static_cast<TaskId>(l), e.scenario, 0);
}

std::size_t Simulation::spawn_edge(TaskId task, const std::string& scenario, std::size_t slot) {
    const std::size_t id = edges_.size();
    const auto& setup = config_.task(task);
    PolicyParams initial = central_[static_cast<std::size_t>(task)].theta;
    if (config_.policy == SelectionPolicy::no_fl && slot > 0) {
        Rng init = make_stream(config_.seed, StreamKind::edge_init, id);
        initialize_fan_in_uniform(initial, init);
    }
    LiveEdge e;
    e.agent = std::make_unique<EdgeAgent>(id, config_.edge_config(task, scenario), setup.partition, config_.dqn, initial,
                                          setup.reward_bounds, config_.seed);
    e.spawn_slot = slot;
    e.scenario = scenario;
    edges_.push_back(std::move(e));
    log_.edges.push_back(EdgeRecord{id, task, scenario, slot, {}, {}});
    return id;
}

void Simulation::set_federation_order(const std::array<std::size_t, task_count>& order) {
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t l = 0; l < task_count; ++l)
        if (sorted[l] != l) throw ContractViolation("federation order must be a permutation of the tasks");
    federation_order_ = order;
}

void Simulation::run_edges(std::size_t first_slot, const EpsilonSchedule& epsilon) {
    const std::size_t slots = config_.slots_per_round;
    const std::size_t workers = std::min(config_.threads, edges_.size());
    if (workers <= 1) {
        for (auto& e : edges_) e.agent->run_local_slots(slots, first_slot, epsilon, hooks_.on_step);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < edges_.size(); i = next++)
                        edges_[i].agent->run_local_slots(slots, first_slot, epsilon, hooks_.on_step);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

bool Simulation::step_round() {
    if (finished()) return false;
    const std::size_t r = round_ + 1;
    const std::size_t first_slot = round_ * config_.slots_per_round;

    for (std::size_t i = 0; i < config_.arrivals.size(); ++i) {
        const auto& a = config_.arrivals[i];
        if (arrival_done_[i] || a.slot > first_slot) continue;
        for (std::size_t k = 0; k < a.count; ++k) spawn_edge(a.task, a.scenario, first_slot);
        arrival_done_[i] = 1;
    }

    std::vector<std::size_t> edge_tasks;
    edge_tasks.reserve(edges_.size());
    for (const auto& e : edges_) edge_tasks.push_back(static_cast<std::size_t>(e.agent->task()));
    std::vector<double> rates;
    for (const auto& t : config_.tasks) rates.push_back(t.arrival_rate);
    const auto avail = sample_availability(rates, edge_tasks, availability_rng_);

    const auto decision = selector_.select(avail.task_available);
    for (std::size_t l : federation_order_) {
        if (!decision.selected[l]) continue;
        std::vector<EdgeAgent*> members;
        std::vector<std::uint8_t> up;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            if (edge_tasks[i] != l) continue;
            members.push_back(edges_[i].agent.get());
            up.push_back(avail.edge_available[i]);
        }
        fed_ds_round(central_[l], members, up);
    }
    if (hooks_.after_federation) hooks_.after_federation({r, edges_, avail, decision, selector_, central_});

    for (auto& e : edges_) e.agent->begin_round();
    const EpsilonSchedule epsilon{config_.dqn.epsilon_start, config_.dqn.epsilon_end,
                                  std::max(1.0, config_.dqn.epsilon_decay_fraction *
                                                    static_cast<double>(config_.total_slots()))};
    run_edges(first_slot, epsilon);

    std::array<double, task_count> lambda{}, mu{};
    for (std::size_t l = 0; l < task_count; ++l) {
        lambda[l] = selector_.multipliers().lambda[l];
        mu[l] = selector_.multipliers().mu[l];
    }
    selector_.end_round(decision, avail.task_available);
    round_ = r;
    record_round(avail, decision, lambda, mu);
    if (hooks_.after_round) hooks_.after_round({r, edges_, avail, decision, selector_, central_});
    return true;
}

void Simulation::record_round(const AvailabilityVector& avail, const RoundDecision& decision,
                              const std::array<double, task_count>& lambda, const std::array<double, task_count>& mu) {
    const std::size_t slots = config_.slots_per_round;
    std::array<double, task_count> reward_sum{};
    std::array<std::size_t, task_count> reward_n{};
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& agent = *edges_[i].agent;
        auto& rec = log_.edges[i];
        const auto& raw = agent.raw_rewards();
        const auto& norm = agent.normalized_rewards();
        const std::size_t l = static_cast<std::size_t>(agent.task());
        for (std::size_t s = raw.size() - slots; s < raw.size(); ++s) {
            rec.raw_rewards.push_back(raw[s]);
            rec.normalized_rewards.push_back(norm[s]);
            reward_sum[l] += norm[s];
        }
        reward_n[l] += slots;
    }
    std::array<double, task_count> mean{};
    for (std::size_t l = 0; l < task_count; ++l) {
        mean[l] = reward_n[l] ? reward_sum[l] / static_cast<double>(reward_n[l]) : 0.0;
        const std::size_t x = avail.task_available[l];
        const bool q = decision.selected[l] != 0;
        log_.participants.push_back({round_, static_cast<TaskId>(l), x, q, q ? x : 0});
        log_.selection.push_back({round_, static_cast<TaskId>(l), lambda[l], mu[l], decision.weights[l], q});
    }
    log_.round_task_reward.push_back(mean);
    log_.rounds_completed = round_;
}

void Simulation::run() {
    while (step_round()) {
    }
}

MetricsLog run_simulation(const ExperimentConfig& config, const SimulationHooks& hooks) {
    Simulation sim(config, hooks);
    sim.run();
    return sim.metrics();
}

// ---------------------------------------------------------------------------

std::vector<double> MetricsLog::sum_reward_series() const {
    std::vector<double> out;
    out.reserve(round_task_reward.size());
    for (const auto& row : round_task_reward) {
        double s = 0.0;
        for (double v : row) s += v;
        out.push_back(s);
    }
    return out;
}

std::vector<SummaryRow> MetricsLog::summary(std::size_t smoothing_rounds) const {
    std::vector<SummaryRow> rows;
    for (std::size_t l = 0; l < task_count; ++l) {
        const auto id = static_cast<TaskId>(l);
        SummaryRow row{id, 0.0, 0.0, 0};
        double participants = 0.0;
        for (const auto& p : this->participants)
            if (p.task == id) participants += static_cast<double>(p.participants);
        double reward = 0.0;
        std::size_t n = 0;
        for (const auto& e : edges) {
            if (e.task != id) continue;
            for (double v : e.normalized_rewards) reward += v;
            n += e.normalized_rewards.size();
        }
        if (rounds_completed > 0) {
            row.avg_participants = participants / static_cast<double>(rounds_completed);
            std::vector<double> series;
            for (const auto& r : round_task_reward) series.push_back(r[l]);
            row.learning_speed = learning_speed(series, smoothing_rounds);
        }
        if (n > 0) row.avg_normalized_reward = reward / static_cast<double>(n);
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void write_metrics(const MetricsLog& log, const std::string& dir, std::size_t smoothing_rounds) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);

    {
        auto out = open_csv(base / "rewards.csv");
        out << "slot,edge_id,task,scenario,raw_reward,normalized_reward\n";
        const std::size_t total = log.rounds_completed * log.slots_per_round;
        for (std::size_t slot = 0; slot < total; ++slot) {
            for (const auto& e : log.edges) {
                if (slot < e.spawn_slot) continue;
                const std::size_t k = slot - e.spawn_slot;
                if (k >= e.raw_rewards.size()) continue;
                out << slot << ',' << e.id << ',' << task_label(e.task) << ',' << e.scenario << ','
                    << fmt(e.raw_rewards[k]) << ',' << fmt(e.normalized_rewards[k]) << '\n';
            }
        }
    }
    {
        auto out = open_csv(base / "participants.csv");
        out << "round,task,available,selected,participants\n";
        for (const auto& p : log.participants)
            out << p.round << ',' << task_label(p.task) << ',' << p.available << ',' << (p.selected ? 1 : 0) << ','
                << p.participants << '\n';
    }
    {
        auto out = open_csv(base / "selection.csv");
        out << "round,task,lambda,mu,weight,selected\n";
        for (const auto& s : log.selection)
            out << s.round << ',' << task_label(s.task) << ',' << fmt(s.lambda) << ',' << fmt(s.mu) << ','
                << fmt(s.weight) << ',' << (s.selected ? 1 : 0) << '\n';
    }
    {
        auto out = open_csv(base / "summary.csv");
        out << "policy,task,avg_participants,avg_normalized_reward,learning_speed\n";
        for (const auto& s : log.summary(smoothing_rounds))
            out << policy_name(log.policy) << ',' << task_label(s.task) << ',' << fmt(s.avg_participants) << ','
                << fmt(s.avg_normalized_reward) << ',' << s.learning_speed << '\n';
    }
}

}  // namespace frl
