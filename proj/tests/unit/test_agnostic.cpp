#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "frl/agnostic_policy.hpp"
#include "frl/config.hpp"
#include "frl/errors.hpp"
#include "frl/tasks.hpp"

using namespace frl;

namespace {

PartitionSpec two_by_two() {
    PartitionSpec p;
    p.axes = {AxisPartition{{10}, 0, 20}, AxisPartition{{5}, 0, 10}};
    return p;
}

EdgeState make_state(std::initializer_list<std::pair<double, double>> rows) {
    EdgeState s(rows.size(), 2);
    std::size_t m = 0;
    for (auto [a, b] : rows) {
        s.at(m, 0) = a;
        s.at(m, 1) = b;
        ++m;
    }
    return s;
}

}  // namespace

TEST_CASE("partition index uses half-open intervals") {
    const AxisPartition axis{{10, 20}, 0};
    CHECK(partition_index(5, axis) == 0);
    CHECK(partition_index(10, axis) == 1);
    CHECK(partition_index(25, axis) == 2);
    CHECK(partition_index(0, axis) == 0);

    const AxisPartition closed{{10, 40, 70}, 0, 100};
    CHECK(partition_index(100, closed) == 3);
    CHECK(partition_index(70, closed) == 3);
    CHECK_THROWS_AS(partition_index(100.5, closed), DomainError);
    CHECK_THROWS_AS(partition_index(-1, closed), DomainError);
}

TEST_CASE("partition validation") {
    CHECK_THROWS(AxisPartition{{20, 10}, 0}.validate());
    CHECK_THROWS(AxisPartition{{10, 10}, 0}.validate());
    CHECK_THROWS(AxisPartition{{-1}, 0}.validate());
    CHECK_NOTHROW(AxisPartition{{}, 0}.validate());
}

TEST_CASE("flattening is row-major") {
    const std::vector<std::size_t> shape{4, 2, 2};
    CHECK(flatten_condition({0, 0, 0}, shape) == 0);
    CHECK(flatten_condition({0, 0, 1}, shape) == 1);
    CHECK(flatten_condition({0, 1, 0}, shape) == 2);
    CHECK(flatten_condition({1, 0, 0}, shape) == 4);
    CHECK(flatten_condition({3, 1, 1}, shape) == 15);
    for (std::size_t c = 0; c < 16; ++c) CHECK(flatten_condition(unflatten_condition(c, shape), shape) == c);
}

TEST_CASE("encode_state collapses devices into occupied cells") {
    const auto spec = two_by_two();
    SUBCASE("two devices in the same cell") {
        const auto agn = encode_state(make_state({{3, 7}, {4, 9}}), spec);
        CHECK(agn.occupancy == std::vector<std::uint8_t>{0, 1, 0, 0});
        CHECK(agn.occupied_count() == 1);
    }
    SUBCASE("every cell covered") {
        const auto agn = encode_state(make_state({{1, 1}, {1, 6}, {11, 1}, {11, 6}}), spec);
        CHECK(agn.occupied_count() == 4);
    }
    SUBCASE("permutation and scale independence") {
        const auto a = encode_state(make_state({{1, 1}, {11, 6}, {12, 7}}), spec);
        const auto b = encode_state(make_state({{15, 8}, {2, 2}}), spec);
        CHECK(a == b);
    }
}

TEST_CASE("feasible actions") {
    SUBCASE("no decisions: one action per occupied cell") {
        AgnosticState s{{2, 2}, {1, 0, 1, 1}};
        CHECK(feasible_actions(s, {}).size() == 3);
    }
    SUBCASE("one grid of four values") {
        AgnosticState s{{2, 2}, {1, 0, 0, 1}};
        CHECK(feasible_actions(s, {{1, 2, 3, 4}}).size() == 8);
    }
    SUBCASE("saturated occupancy spans the whole space") {
        AgnosticState s{{2, 2}, {1, 1, 1, 1}};
        const ActionSpace space({2, 2}, {{1, 2, 3}});
        CHECK(feasible_actions(s, {{1, 2, 3}}).size() == space.size());
    }
    SUBCASE("empty occupancy is an invariant violation") {
        AgnosticState s{{2, 2}, {0, 0, 0, 0}};
        CHECK_THROWS_AS(feasible_actions(s, {}), InvariantViolation);
    }
}

TEST_CASE("action space encode/decode and mask") {
    const ActionSpace space({3, 3}, {RrsConfig::default_power_grid()});
    CHECK(space.size() == 81);
    for (std::size_t a = 0; a < space.size(); ++a) CHECK(space.encode(space.decode(a)) == a);
    AgnosticState s{{3, 3}, {0, 0, 1, 0, 0, 0, 0, 0, 1}};
    const auto mask = space.feasible_mask(s);
    for (std::size_t a = 0; a < space.size(); ++a) CHECK((mask[a] != 0) == s.occupied(space.cell_of(a)));
    const auto listed = feasible_actions(s, space.decision_grids());
    CHECK(listed.size() == std::size_t(std::count(mask.begin(), mask.end(), 1)));
}

TEST_CASE("translate_action") {
    const auto spec = two_by_two();
    Rng rng(5);
    SUBCASE("single match is deterministic") {
        const auto s = make_state({{1, 1}, {11, 6}});
        for (int i = 0; i < 10; ++i) CHECK(translate_action({{1, 1}, {}}, s, spec, rng).device == 1);
    }
    SUBCASE("two matches: both get picked, both re-encode to the condition") {
        const auto s = make_state({{1, 1}, {2, 2}, {11, 6}});
        std::array<int, 3> hits{};
        for (int i = 0; i < 200; ++i) {
            const auto a = translate_action({{0, 0}, {}}, s, spec, rng);
            CHECK(device_condition(s.device(a.device), spec) == Condition{0, 0});
            ++hits[a.device];
        }
        CHECK(hits[0] > 0);
        CHECK(hits[1] > 0);
        CHECK(hits[2] == 0);
    }
    SUBCASE("decisions are copied through") {
        const auto s = make_state({{1, 1}});
        CHECK(translate_action({{0, 0}, {2.5}}, s, spec, rng).decisions == std::vector<double>{2.5});
    }
    SUBCASE("no match is an error") {
        const auto s = make_state({{1, 1}});
        CHECK_THROWS_AS(translate_action({{1, 1}, {}}, s, spec, rng), InvariantViolation);
    }
}

TEST_CASE("round trip over real scenarios") {
    for (std::size_t l = 0; l < task_count; ++l) {
        const auto task = static_cast<TaskId>(l);
        const auto spec = default_partition(task);
        for (const char* scen : {"A", "B", "C", "D", "E"}) {
            const auto c = load_scenario(task, scen);
            const ActionSpace space(spec.shape(), task_spec(c).decision_grids);
            Rng rng(l * 10 + 1);
            auto s = env_reset(c, 3);
            for (int t = 0; t < 300; ++t) {
                const auto agn = encode_state(s, spec);
                const auto mask = space.feasible_mask(agn);
                std::vector<std::size_t> ok;
                for (std::size_t a = 0; a < mask.size(); ++a)
                    if (mask[a]) ok.push_back(a);
                REQUIRE(!ok.empty());
                const auto chosen = space.decode(ok[uniform_index(rng, ok.size())]);
                const auto act = translate_action(chosen, s, spec, rng);
                CHECK(device_condition(s.device(act.device), spec) == chosen.condition);
                s = env_step(c, s, act, rng).next_state;
            }
        }
    }
}

TEST_CASE("default partition shapes") {
    CHECK(default_partition(TaskId::wireless_power_transfer).shape() == std::vector<std::size_t>{4, 2, 2});
    CHECK(default_partition(TaskId::data_gathering).shape() == std::vector<std::size_t>{3, 3});
    CHECK(default_partition(TaskId::radio_resource).shape() == std::vector<std::size_t>{3, 3});
}
