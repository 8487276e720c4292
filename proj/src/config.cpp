#include "frl/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "frl/errors.hpp"

namespace frl {

using nlohmann::json;

PartitionSpec default_partition(TaskId task) {
    PartitionSpec p;
    switch (task) {
        case TaskId::wireless_power_transfer:
            p.axes = {AxisPartition{{10, 40, 70}, 0, 100}, AxisPartition{{0.5}, 0, 1}, AxisPartition{{3}, 1, 5}};
            break;
        case TaskId::data_gathering:
            p.axes = {AxisPartition{{30, 60}, 0, 90}, AxisPartition{{40, 60}, 0}};
            break;
        case TaskId::radio_resource:
            p.axes = {AxisPartition{{1e-10, 1e-9}, 0}, AxisPartition{{0.25, 1.5}, 0}};
            break;
    }
    return p;
}

EdgeConfig ExperimentConfig::edge_config(TaskId id, const std::string& scenario) const {
    const auto& setup = task(id);
    EdgeConfig config;
    if (auto it = setup.custom_scenarios.find(scenario); it != setup.custom_scenarios.end()) config = it->second;
    else config = load_scenario(id, scenario);
    if (auto* rrs = std::get_if<RrsConfig>(&config.params); rrs && setup.power_cost) rrs->power_cost = *setup.power_cost;
    return config;
}

void ExperimentConfig::validate() const {
    if (slots_per_round < 1) throw ConfigError("slots_per_round must be at least 1");
    if (threads < 1) throw ConfigError("threads must be at least 1");
    if (smoothing_rounds < 1) throw ConfigError("smoothing_rounds must be at least 1");
    if (capacity.bandwidth < 0 || capacity.memory < 0 || capacity.compute < 0)
        throw ConfigError("cloud capacities must be non-negative");
    if (!(selection.step_size > 0)) throw ConfigError("selection step_size must be positive");
    if (selection.initial_multiplier < 0) throw ConfigError("initial multiplier must be non-negative");
    dqn.validate();
    for (std::size_t l = 0; l < task_count; ++l) {
        const auto id = static_cast<TaskId>(l);
        const auto& t = tasks[l];
        if (!(t.arrival_rate >= 0 && t.arrival_rate <= 1))
            throw ConfigError("arrival_rate of task " + std::string(task_label(id)) + " must lie in [0, 1]");
        const auto& d = t.demand;
        if (d.bandwidth < 0 || d.memory < 0 || d.compute < 0 || d.min_participants < 0)
            throw ConfigError("demands of task " + std::string(task_label(id)) + " must be non-negative");
        if (!(t.utility_weight > 0)) throw ConfigError("utility_weight must be positive");
        t.partition.validate();
        t.reward_bounds.validate();
        if (t.power_cost && (*t.power_cost < 0 || id != TaskId::radio_resource))
            throw ConfigError("power_cost applies to task C only and must be non-negative");
        for (const auto& e : t.edges) edge_config(id, e.scenario).validate();
        for (const auto& [name, c] : t.custom_scenarios) {
            if (c.task != id) throw ConfigError("custom scenario '" + name + "' belongs to another task");
            c.validate();
        }
    }
    for (const auto& a : arrivals) edge_config(a.task, a.scenario).validate();
}

// ---------------------------------------------------------------------------
// Presets. Reward bounds come from tools/frl_calibrate (random policy, min and
// max per-slot reward per task).

namespace {

void set_scenarios(TaskSetup& t, std::vector<ScenarioCount> edges) { t.edges = std::move(edges); }

ExperimentConfig common_preset() {
    ExperimentConfig c;
    const double rates[] = {0.7, 0.4, 0.4};
    for (std::size_t l = 0; l < task_count; ++l) {
        auto& t = c.tasks[l];
        t.arrival_rate = rates[l];
        t.partition = default_partition(static_cast<TaskId>(l));
    }
    c.task(TaskId::wireless_power_transfer).reward_bounds = {-44.0, 0.0};
    c.task(TaskId::data_gathering).reward_bounds = {-63.0, 76.0};
    c.task(TaskId::radio_resource).reward_bounds = {-80.7438, 1449.49};
    c.task(TaskId::radio_resource).power_cost = 8.07438;
    return c;
}

}  // namespace

ExperimentConfig desk_preset() {
    ExperimentConfig c = common_preset();
    c.rounds = 80;
    c.slots_per_round = 100;
    c.capacity = {16.2, 16.2, 16.2};
    for (auto& t : c.tasks) {
        set_scenarios(t, {{"A", 3}, {"B", 3}, {"C", 3}});
        t.demand = {1, 1, 1, 3};
    }
    c.dqn.hidden_layers = {64, 64};
    c.dqn.learning_rate = 1e-3;
    c.dqn.batch_size = 32;
    c.dqn.train_interval = 4;
    c.dqn.target_update_interval = 100;
    c.smoothing_rounds = 10;
    c.output_dir = "out";
    return c;
}

ExperimentConfig paper_preset() {
    ExperimentConfig c = common_preset();
    c.rounds = 200;
    c.slots_per_round = 250;
    c.capacity = {21, 21, 21};
    for (auto& t : c.tasks) {
        set_scenarios(t, {{"A", 7}, {"B", 7}, {"C", 6}});
        t.demand = {1, 1, 1, 5};
    }
    c.dqn = DqnConfig{};
    for (std::size_t l = 0; l < task_count; ++l) {
        const auto id = static_cast<TaskId>(l);
        c.arrivals.push_back({25000, id, "D", 2});
        c.arrivals.push_back({25000, id, "E", 2});
    }
    c.smoothing_rounds = 10;
    return c;
}

ExperimentConfig preset(const std::string& name) {
    if (name == "desk") return desk_preset();
    if (name == "paper") return paper_preset();
    throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

/// Object view that remembers which keys were read and rejects the rest.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    const json* get(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <class T>
    void read(const std::string& key, T& out) {
        if (const json* v = get(key)) {
            try {
                out = v->get<T>();
            } catch (const json::exception& e) {
                throw ConfigError(path_ + "." + key + ": " + e.what());
            }
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown key '" + path_ + "." + it.key() + "'");
    }

    std::string child(const std::string& key) const { return path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

double read_bound(const json& v, const std::string& path, double missing) {
    if (v.is_null()) return missing;
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        throw ConfigError(path + ": expected a number, \"inf\" or \"-inf\"");
    }
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    return v.get<double>();
}

AxisPartition read_axis(const json& j, const std::string& path) {
    Section s(j, path);
    AxisPartition a;
    s.read("boundaries", a.boundaries);
    if (const json* v = s.get("lower")) a.lower = read_bound(*v, s.child("lower"), -INFINITY);
    if (const json* v = s.get("upper")) a.upper = read_bound(*v, s.child("upper"), INFINITY);
    s.finish();
    return a;
}

EdgeConfig read_custom_scenario(TaskId task, const std::string& name, const json& j, const std::string& path) {
    Section s(j, path);
    EdgeConfig c;
    c.task = task;
    c.scenario = name;
    const json* devices = s.get("devices");
    if (!devices || !devices->is_array()) throw ConfigError(path + ".devices: expected an array");
    switch (task) {
        case TaskId::wireless_power_transfer: {
            WptConfig p;
            s.read("charge_levels", p.charge_levels);
            s.read("activity_flip_probability", p.activity_flip_probability);
            for (std::size_t i = 0; i < devices->size(); ++i) {
                Section d((*devices)[i], path + ".devices[" + std::to_string(i) + "]");
                WptDevice dev;
                d.read("max_battery", dev.max_battery);
                d.read("low_threshold", dev.low_threshold);
                d.read("outage_cost", dev.outage_cost);
                d.read("discharge_rate", dev.discharge_rate);
                d.read("initial_battery", dev.initial_battery);
                d.finish();
                p.devices.push_back(dev);
            }
            c.params = std::move(p);
            break;
        }
        case TaskId::data_gathering: {
            DgConfig p;
            s.read("capacity_variance", p.capacity_variance);
            for (std::size_t i = 0; i < devices->size(); ++i) {
                Section d((*devices)[i], path + ".devices[" + std::to_string(i) + "]");
                DgDevice dev;
                d.read("mean_capacity", dev.mean_capacity);
                d.read("arrival_rate", dev.arrival_rate);
                d.read("max_buffer", dev.max_buffer);
                d.finish();
                p.devices.push_back(dev);
            }
            c.params = std::move(p);
            break;
        }
        case TaskId::radio_resource: {
            RrsConfig p;
            s.read("bandwidth_hz", p.bandwidth_hz);
            s.read("noise_dbm", p.noise_dbm);
            s.read("pathloss_intercept_db", p.pathloss_intercept_db);
            s.read("pathloss_slope_db", p.pathloss_slope_db);
            s.read("shadowing_db", p.shadowing_db);
            s.read("power_grid_w", p.power_grid_w);
            s.read("power_cost", p.power_cost);
            for (std::size_t i = 0; i < devices->size(); ++i) {
                Section d((*devices)[i], path + ".devices[" + std::to_string(i) + "]");
                RrsDevice dev;
                d.read("distance_m", dev.distance_m);
                d.read("rate_requirement_mbps", dev.rate_requirement_mbps);
                d.finish();
                p.devices.push_back(dev);
            }
            c.params = std::move(p);
            break;
        }
    }
    s.finish();
    return c;
}

void read_task(TaskId id, TaskSetup& t, const json& j, const std::string& path) {
    Section s(j, path);
    if (const json* e = s.get("edges")) {
        Section edges(*e, s.child("edges"));
        t.edges.clear();
        for (auto it = e->begin(); it != e->end(); ++it) {
            std::size_t n = 0;
            edges.read(it.key(), n);
            t.edges.push_back({it.key(), n});
        }
        edges.finish();
    }
    s.read("arrival_rate", t.arrival_rate);
    if (const json* d = s.get("demand")) {
        Section ds(*d, s.child("demand"));
        ds.read("bandwidth", t.demand.bandwidth);
        ds.read("memory", t.demand.memory);
        ds.read("compute", t.demand.compute);
        ds.read("min_participants", t.demand.min_participants);
        ds.finish();
    }
    s.read("utility_weight", t.utility_weight);
    if (const json* b = s.get("reward_bounds")) {
        Section bs(*b, s.child("reward_bounds"));
        bs.read("lo", t.reward_bounds.lo);
        bs.read("hi", t.reward_bounds.hi);
        bs.finish();
    }
    if (const json* p = s.get("partition")) {
        if (!p->is_array()) throw ConfigError(s.child("partition") + ": expected an array of axes");
        t.partition.axes.clear();
        for (std::size_t i = 0; i < p->size(); ++i)
            t.partition.axes.push_back(read_axis((*p)[i], s.child("partition") + "[" + std::to_string(i) + "]"));
    }
    if (const json* pc = s.get("power_cost")) {
        if (!pc->is_number()) throw ConfigError(s.child("power_cost") + ": expected a number");
        t.power_cost = pc->get<double>();
    }
    if (const json* cs = s.get("scenarios")) {
        Section scen(*cs, s.child("scenarios"));
        for (auto it = cs->begin(); it != cs->end(); ++it) {
            scen.get(it.key());
            t.custom_scenarios[it.key()] = read_custom_scenario(id, it.key(), *it, scen.child(it.key()));
        }
        scen.finish();
    }
    s.finish();
}

}  // namespace

ExperimentConfig load_config(const std::string& json_text, ExperimentConfig c) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    Section root(j, "config");
    root.read("seed", c.seed);
    root.read("rounds", c.rounds);
    root.read("slots_per_round", c.slots_per_round);
    if (const json* p = root.get("policy")) {
        if (!p->is_string()) throw ConfigError("config.policy: expected a string");
        c.policy = parse_policy(p->get<std::string>());
    }
    root.read("smoothing_rounds", c.smoothing_rounds);
    root.read("threads", c.threads);
    root.read("output_dir", c.output_dir);
    if (const json* cap = root.get("capacity")) {
        Section s(*cap, "config.capacity");
        s.read("bandwidth", c.capacity.bandwidth);
        s.read("memory", c.capacity.memory);
        s.read("compute", c.capacity.compute);
        s.finish();
    }
    if (const json* sel = root.get("selection")) {
        Section s(*sel, "config.selection");
        s.read("step_size", c.selection.step_size);
        s.read("decaying_step", c.selection.decaying_step);
        s.read("initial_multiplier", c.selection.initial_multiplier);
        if (const json* u = s.get("utility")) {
            if (!u->is_string()) throw ConfigError("config.selection.utility: expected a string");
            c.selection.utility = parse_utility(u->get<std::string>());
        }
        s.finish();
    }
    if (const json* d = root.get("dqn")) {
        Section s(*d, "config.dqn");
        s.read("hidden_layers", c.dqn.hidden_layers);
        s.read("learning_rate", c.dqn.learning_rate);
        s.read("batch_size", c.dqn.batch_size);
        s.read("train_interval", c.dqn.train_interval);
        s.read("target_update_interval", c.dqn.target_update_interval);
        s.read("gamma", c.dqn.gamma);
        s.read("epsilon_start", c.dqn.epsilon_start);
        s.read("epsilon_end", c.dqn.epsilon_end);
        s.read("epsilon_decay_fraction", c.dqn.epsilon_decay_fraction);
        s.read("replay_capacity", c.dqn.replay_capacity);
        s.finish();
    }
    if (const json* t = root.get("tasks")) {
        Section s(*t, "config.tasks");
        for (auto it = t->begin(); it != t->end(); ++it) {
            s.get(it.key());
            TaskId id;
            try {
                id = parse_task(it.key());
            } catch (const std::exception&) {
                throw ConfigError("unknown key 'config.tasks." + it.key() + "'");
            }
            read_task(id, c.task(id), *it, s.child(it.key()));
        }
        s.finish();
    }
    if (const json* a = root.get("arrivals")) {
        if (!a->is_array()) throw ConfigError("config.arrivals: expected an array");
        c.arrivals.clear();
        for (std::size_t i = 0; i < a->size(); ++i) {
            Section s((*a)[i], "config.arrivals[" + std::to_string(i) + "]");
            ArrivalEvent ev;
            std::string task;
            s.read("slot", ev.slot);
            s.read("task", task);
            s.read("scenario", ev.scenario);
            s.read("count", ev.count);
            s.finish();
            ev.task = parse_task(task);
            c.arrivals.push_back(ev);
        }
    }
    root.finish();
    c.validate();
    return c;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return load_config(text.str(), std::move(base));
}

namespace {

json bound_json(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return v;
}

json scenario_json(const EdgeConfig& c) {
    json j;
    j["devices"] = json::array();
    if (const auto* a = std::get_if<WptConfig>(&c.params)) {
        j["charge_levels"] = a->charge_levels;
        j["activity_flip_probability"] = a->activity_flip_probability;
        for (const auto& d : a->devices)
            j["devices"].push_back({{"max_battery", d.max_battery},
                                    {"low_threshold", d.low_threshold},
                                    {"outage_cost", d.outage_cost},
                                    {"discharge_rate", d.discharge_rate},
                                    {"initial_battery", d.initial_battery}});
    } else if (const auto* b = std::get_if<DgConfig>(&c.params)) {
        j["capacity_variance"] = b->capacity_variance;
        for (const auto& d : b->devices)
            j["devices"].push_back(
                {{"mean_capacity", d.mean_capacity}, {"arrival_rate", d.arrival_rate}, {"max_buffer", d.max_buffer}});
    } else {
        const auto& r = std::get<RrsConfig>(c.params);
        j["bandwidth_hz"] = r.bandwidth_hz;
        j["noise_dbm"] = r.noise_dbm;
        j["pathloss_intercept_db"] = r.pathloss_intercept_db;
        j["pathloss_slope_db"] = r.pathloss_slope_db;
        j["shadowing_db"] = r.shadowing_db;
        j["power_grid_w"] = r.power_grid_w;
        j["power_cost"] = r.power_cost;
        for (const auto& d : r.devices)
            j["devices"].push_back({{"distance_m", d.distance_m}, {"rate_requirement_mbps", d.rate_requirement_mbps}});
    }
    return j;
}

}  // namespace

std::string dump_config(const ExperimentConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["rounds"] = c.rounds;
    j["slots_per_round"] = c.slots_per_round;
    j["policy"] = std::string(policy_name(c.policy));
    j["smoothing_rounds"] = c.smoothing_rounds;
    j["threads"] = c.threads;
    j["output_dir"] = c.output_dir;
    j["capacity"] = {{"bandwidth", c.capacity.bandwidth}, {"memory", c.capacity.memory}, {"compute", c.capacity.compute}};
    j["selection"] = {{"step_size", c.selection.step_size},
                      {"decaying_step", c.selection.decaying_step},
                      {"initial_multiplier", c.selection.initial_multiplier},
                      {"utility", "log"}};
    j["dqn"] = {{"hidden_layers", c.dqn.hidden_layers},
                {"learning_rate", c.dqn.learning_rate},
                {"batch_size", c.dqn.batch_size},
                {"train_interval", c.dqn.train_interval},
                {"target_update_interval", c.dqn.target_update_interval},
                {"gamma", c.dqn.gamma},
                {"epsilon_start", c.dqn.epsilon_start},
                {"epsilon_end", c.dqn.epsilon_end},
                {"epsilon_decay_fraction", c.dqn.epsilon_decay_fraction},
                {"replay_capacity", c.dqn.replay_capacity}};
    for (std::size_t l = 0; l < task_count; ++l) {
        const auto& t = c.tasks[l];
        json tj;
        tj["edges"] = json::object();
        for (const auto& e : t.edges) tj["edges"][e.scenario] = e.count;
        tj["arrival_rate"] = t.arrival_rate;
        tj["demand"] = {{"bandwidth", t.demand.bandwidth},
                        {"memory", t.demand.memory},
                        {"compute", t.demand.compute},
                        {"min_participants", t.demand.min_participants}};
        tj["utility_weight"] = t.utility_weight;
        tj["reward_bounds"] = {{"lo", t.reward_bounds.lo}, {"hi", t.reward_bounds.hi}};
        tj["partition"] = json::array();
        for (const auto& a : t.partition.axes)
            tj["partition"].push_back(
                {{"boundaries", a.boundaries}, {"lower", bound_json(a.lower)}, {"upper", bound_json(a.upper)}});
        if (t.power_cost) tj["power_cost"] = *t.power_cost;
        if (!t.custom_scenarios.empty()) {
            tj["scenarios"] = json::object();
            for (const auto& [name, sc] : t.custom_scenarios) tj["scenarios"][name] = scenario_json(sc);
        }
        j["tasks"][std::string(task_label(static_cast<TaskId>(l)))] = tj;
    }
    j["arrivals"] = json::array();
    for (const auto& a : c.arrivals)
        j["arrivals"].push_back(
            {{"slot", a.slot}, {"task", std::string(task_label(a.task))}, {"scenario", a.scenario}, {"count", a.count}});
    return j.dump(2);
}

}  // namespace frl
