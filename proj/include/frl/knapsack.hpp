#pragma once

// Exact 0/1 knapsack with three capacity dimensions (bandwidth, memory, compute).
//
// Among optimal selections the solver prefers the one with more items, then
// the lexicographically smallest index set. Objective ties are detected with a
// relative tolerance of 1e-12 so that summation order does not break them.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace frl {

using ResourceVector = std::array<double, 3>;

struct MdkpSolution {
    std::vector<std::uint8_t> selected;
    double objective = 0.0;
};

/// Dispatches to enumeration for up to 20 items and branch-and-bound above.
MdkpSolution solve_mdkp(std::span<const double> values, std::span<const ResourceVector> demands,
                        const ResourceVector& capacity);

MdkpSolution solve_mdkp_enumerate(std::span<const double> values, std::span<const ResourceVector> demands,
                                  const ResourceVector& capacity);

/// Depth-first branch and bound; the bound is the tightest single-dimension
/// fractional knapsack relaxation.
MdkpSolution solve_mdkp_branch_and_bound(std::span<const double> values, std::span<const ResourceVector> demands,
                                         const ResourceVector& capacity);

/// Tie-break order: true if `a` is strictly preferred to `b`.
bool mdkp_preferred(double value_a, std::span<const std::uint8_t> a, double value_b, std::span<const std::uint8_t> b);

}  // namespace frl
