#include "frl/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frl/errors.hpp"

namespace frl {

namespace {

constexpr double tie_tolerance = 1e-12;

bool values_tie(double a, double b) {
    return std::abs(a - b) <= tie_tolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

void check_inputs(std::span<const double> values, std::span<const ResourceVector> demands,
                  const ResourceVector& capacity) {
    if (values.size() != demands.size()) throw ContractViolation("one demand vector per item required");
    for (double c : capacity)
        if (c < 0) throw DomainError("capacities must be non-negative");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0) throw DomainError("item values must be non-negative");
        for (double d : demands[i])
            if (d < 0) throw DomainError("demands must be non-negative");
    }
}

}  // namespace

bool mdkp_preferred(double value_a, std::span<const std::uint8_t> a, double value_b, std::span<const std::uint8_t> b) {
    if (!values_tie(value_a, value_b)) return value_a > value_b;
    const auto count_a = std::count(a.begin(), a.end(), std::uint8_t{1});
    const auto count_b = std::count(b.begin(), b.end(), std::uint8_t{1});
    if (count_a != count_b) return count_a > count_b;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] != 0;
    return false;
}

MdkpSolution solve_mdkp_enumerate(std::span<const double> values, std::span<const ResourceVector> demands,
                                  const ResourceVector& capacity) {
    check_inputs(values, demands, capacity);
    const std::size_t n = values.size();
    if (n > 30) throw ContractViolation("enumeration limited to 30 items");
    MdkpSolution best{std::vector<std::uint8_t>(n, 0), 0.0};
    std::vector<std::uint8_t> sel(n);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        ResourceVector used{0, 0, 0};
        double value = 0.0;
        bool feasible = true;
        for (std::size_t i = 0; i < n && feasible; ++i) {
            sel[i] = (mask >> i) & 1U;
            if (!sel[i]) continue;
            value += values[i];
            for (std::size_t d = 0; d < 3; ++d) {
                used[d] += demands[i][d];
                if (used[d] > capacity[d]) feasible = false;
            }
        }
        if (feasible && mdkp_preferred(value, sel, best.objective, best.selected)) {
            best.selected = sel;
            best.objective = value;
        }
    }
    return best;
}

namespace {

class BranchAndBound {
public:
    BranchAndBound(std::span<const double> values, std::span<const ResourceVector> demands,
                   const ResourceVector& capacity)
        : values_(values), demands_(demands), capacity_(capacity), current_(values.size(), 0) {
        best_.selected.assign(values.size(), 0);
    }

    MdkpSolution run() {
        visit(0, {0, 0, 0}, 0.0);
        return best_;
    }

private:
    // tightest of the three single-dimension fractional relaxations over items >= from
    double bound(std::size_t from, const ResourceVector& used) const {
        double tightest = std::numeric_limits<double>::infinity();
        for (std::size_t d = 0; d < 3; ++d) {
            std::vector<std::pair<double, std::size_t>> order;
            double free_value = 0.0;
            for (std::size_t i = from; i < values_.size(); ++i) {
                if (values_[i] <= 0) continue;
                if (demands_[i][d] == 0) free_value += values_[i];
                else order.emplace_back(values_[i] / demands_[i][d], i);
            }
            std::sort(order.begin(), order.end(), [](auto& a, auto& b) { return a.first > b.first; });
            double room = capacity_[d] - used[d];
            double total = free_value;
            for (const auto& [ratio, i] : order) {
                if (room <= 0) break;
                const double take = std::min(1.0, room / demands_[i][d]);
                total += take * values_[i];
                room -= take * demands_[i][d];
            }
            tightest = std::min(tightest, total);
        }
        return tightest;
    }

    void visit(std::size_t i, const ResourceVector& used, double value) {
        if (i == values_.size()) {
            if (mdkp_preferred(value, current_, best_.objective, best_.selected)) {
                best_.selected = current_;
                best_.objective = value;
            }
            return;
        }
        const double ub = value + bound(i, used);
        if (ub < best_.objective && !values_tie(ub, best_.objective)) return;

        ResourceVector with = used;
        bool fits = true;
        for (std::size_t d = 0; d < 3; ++d) {
            with[d] += demands_[i][d];
            if (with[d] > capacity_[d]) fits = false;
        }
        if (fits) {
            current_[i] = 1;
            visit(i + 1, with, value + values_[i]);
            current_[i] = 0;
        }
        visit(i + 1, used, value);
    }

    std::span<const double> values_;
    std::span<const ResourceVector> demands_;
    ResourceVector capacity_;
    std::vector<std::uint8_t> current_;
    MdkpSolution best_;
};

}  // namespace

MdkpSolution solve_mdkp_branch_and_bound(std::span<const double> values, std::span<const ResourceVector> demands,
                                         const ResourceVector& capacity) {
    check_inputs(values, demands, capacity);
    return BranchAndBound(values, demands, capacity).run();
}

MdkpSolution solve_mdkp(std::span<const double> values, std::span<const ResourceVector> demands,
                        const ResourceVector& capacity) {
    if (values.size() <= 20) return solve_mdkp_enumerate(values, demands, capacity);
    return solve_mdkp_branch_and_bound(values, demands, capacity);
}

}  // namespace frl
