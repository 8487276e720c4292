#include <doctest.h>

#include <cmath>
#include <memory>

#include "frl/config.hpp"
#include "frl/errors.hpp"
#include "frl/federation.hpp"

using namespace frl;

namespace {

PolicyParams random_params(const std::vector<std::size_t>& sizes, Rng& rng) {
    PolicyParams p(sizes);
    for (double& v : p.values()) v = 2 * uniform01(rng) - 1;
    return p;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

struct TaskFixture {
    ExperimentConfig config = desk_preset();
    TaskId task = TaskId::data_gathering;
    std::vector<std::unique_ptr<EdgeAgent>> agents;
    CentralPolicy central;

    explicit TaskFixture(std::size_t n) {
        config.dqn.hidden_layers = {8};
        config.dqn.train_interval = 5;
        config.dqn.learning_rate = 0.05;
        const auto edge = config.edge_config(task, "A");
        const ActionSpace space(config.task(task).partition.shape(), task_spec(edge).decision_grids);
        central.task = task;
        central.theta = PolicyParams(network_shape(space, config.dqn.hidden_layers));
        Rng rng(5);
        initialize_fan_in_uniform(central.theta, rng);
        for (std::size_t i = 0; i < n; ++i)
            agents.push_back(std::make_unique<EdgeAgent>(i, edge, config.task(task).partition, config.dqn,
                                                         central.theta, config.task(task).reward_bounds, 11));
    }

    std::vector<EdgeAgent*> pointers() {
        std::vector<EdgeAgent*> out;
        for (auto& a : agents) out.push_back(a.get());
        return out;
    }
};

}  // namespace

TEST_CASE("central weights") {
    const std::vector<std::size_t> k{10, 30};
    CHECK(central_weights(k) == std::vector<double>{0.25, 0.75});
    const std::vector<std::size_t> one{7};
    CHECK(central_weights(one) == std::vector<double>{1.0});
    const std::vector<std::size_t> four{5, 5, 5, 5};
    for (double c : central_weights(four)) CHECK(c == 0.25);
    const std::vector<std::size_t> none{0, 0};
    CHECK_THROWS_AS(central_weights(none), InvariantViolation);
}

TEST_CASE("local gradient") {
    Rng rng(1);
    const auto w = random_params({3, 4, 2}, rng);
    for (double d : local_gradient(0, w, w).delta) CHECK(d == 0.0);
    auto moved = w;
    std::vector<double> d(w.values().size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = 0.01 * double(i);
        moved.values()[i] -= d[i];
    }
    CHECK(max_abs_diff(local_gradient(0, w, moved).delta, d) < 1e-15);
    const PolicyParams other({3, 2});
    CHECK_THROWS_AS(local_gradient(0, w, other), ContractViolation);
}

TEST_CASE("local gradient equals one hand-computed SGD step") {
    const ActionSpace space({2}, {{0, 1}});
    PolicyParams start({2, 4});
    PolicyParams p = start;
    const AgnosticState s{{2}, {1, 0}};
    const std::vector<Experience> batch{{s, 3, 0.5, s}};
    train_step(p, start, batch, 0.0, 0.2, space);
    // d/dq (q - 0.5)^2 at q = 0 is -1; the step moves w[3][0] and b[3] by 0.2 each
    const auto delta = local_gradient(0, start, p).delta;
    double norm = 0.0;
    for (double v : delta) norm += v * v;
    CHECK(std::sqrt(norm) == doctest::Approx(0.2 * std::sqrt(2.0)));
}

TEST_CASE("aggregation") {
    Rng rng(2);
    const std::vector<std::size_t> sizes{3, 5, 2};
    SUBCASE("two available edges with equal weight average their parameters") {
        CentralPolicy c{TaskId::radio_resource, random_params(sizes, rng), 1};
        const auto w1 = random_params(sizes, rng), w2 = random_params(sizes, rng);
        const std::vector<LocalDelta> d{local_gradient(0, c.theta, w1), local_gradient(1, c.theta, w2)};
        const std::vector<double> weights{0.5, 0.5};
        aggregate(c, d, weights, 2);
        std::vector<double> expected(w1.values().size());
        for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = 0.5 * (w1.values()[i] + w2.values()[i]);
        CHECK(max_abs_diff(c.theta.values(), expected) < 1e-12);
        CHECK(c.round_index == 2);
    }
    SUBCASE("one of two available: its parameters are adopted") {
        CentralPolicy c{TaskId::radio_resource, random_params(sizes, rng), 1};
        const auto w1 = random_params(sizes, rng);
        const std::vector<LocalDelta> d{local_gradient(0, c.theta, w1)};
        const std::vector<double> weights{0.5};
        aggregate(c, d, weights, 2);
        CHECK(max_abs_diff(c.theta.values(), w1.values()) < 1e-12);
    }
    SUBCASE("zero deltas are a fixed point") {
        CentralPolicy c{TaskId::radio_resource, random_params(sizes, rng), 1};
        const auto before = c.theta;
        const std::vector<LocalDelta> d{local_gradient(0, c.theta, c.theta), local_gradient(1, c.theta, c.theta)};
        const std::vector<double> weights{0.3, 0.7};
        aggregate(c, d, weights, 2);
        CHECK(c.theta == before);
    }
    SUBCASE("no available edge") {
        CentralPolicy c{TaskId::radio_resource, random_params(sizes, rng), 1};
        CHECK_THROWS_AS(aggregate(c, {}, {}, 2), ContractViolation);
    }
    SUBCASE("full participation equals the experience-weighted average") {
        for (int trial = 0; trial < 50; ++trial) {
            CentralPolicy c{TaskId::radio_resource, random_params(sizes, rng), 1};
            const std::size_t n = 1 + uniform_index(rng, 6);
            std::vector<std::size_t> k;
            std::vector<PolicyParams> w;
            std::vector<LocalDelta> d;
            for (std::size_t i = 0; i < n; ++i) {
                k.push_back(1 + uniform_index(rng, 300));
                w.push_back(random_params(sizes, rng));
                d.push_back(local_gradient(i, c.theta, w.back(), k.back()));
            }
            const auto weights = central_weights(k);
            aggregate(c, d, weights, n);
            std::vector<double> expected(c.theta.values().size(), 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < expected.size(); ++j) expected[j] += weights[i] * w[i].values()[j];
            CHECK(max_abs_diff(c.theta.values(), expected) < 1e-9);
        }
    }
}

TEST_CASE("federation round broadcasts to every edge") {
    TaskFixture fx(3);
    const EpsilonSchedule eps{1.0, 0.05, 1000};
    for (auto& a : fx.agents) a->run_local_slots(40, 0, eps);
    CHECK(!(fx.agents[0]->params() == fx.agents[1]->params()));
    auto edges = fx.pointers();

    SUBCASE("partial availability") {
        const auto w0 = fx.agents[0]->params();
        const std::vector<std::uint8_t> up{1, 0, 0};
        fed_ds_round(fx.central, edges, up);
        // N = 3, x = 1, c = 1/3: the single available edge's parameters become central
        double diff = 0.0;
        for (std::size_t i = 0; i < w0.values().size(); ++i)
            diff = std::max(diff, std::abs(fx.central.theta.values()[i] - w0.values()[i]));
        CHECK(diff < 1e-12);
        for (auto* e : edges) {
            CHECK(e->params() == fx.central.theta);
            CHECK(e->round_start_params() == fx.central.theta);
        }
        const auto after = fx.central.theta;
        const std::vector<std::uint8_t> all{1, 1, 1};
        for (auto* e : edges) e->begin_round();
        fed_ds_round(fx.central, edges, all);
        CHECK(fx.central.theta == after);  // nothing learned since the last broadcast
    }
    SUBCASE("no edge available") {
        const std::vector<std::uint8_t> none{0, 0, 0};
        CHECK_THROWS_AS(fed_ds_round(fx.central, edges, none), ContractViolation);
    }
}
