#pragma once

// Central policy bookkeeping and the per-task federation round.
//
// For task l with edge set N(l) in round r:
//   c_n      = K_n / sum_{n' in N(l)} K_n'
//   c_n^r    = N_l * c_n / x_l                (x_l = number of available edges)
//   delta_n  = w_n^r - w_n                    (round-start minus current local params)
//   theta'   = theta - sum_{n available} c_n^r * delta_n
// after which theta' is broadcast to every edge of the task.

#include <cstddef>
#include <span>
#include <vector>

#include "frl/dqn.hpp"
#include "frl/mlp.hpp"

namespace frl {

struct CentralPolicy {
    TaskId task{};
    PolicyParams theta;
    std::size_t round_index = 1;
};

struct LocalDelta {
    std::size_t edge_id = 0;
    std::vector<double> delta;
    std::size_t k_count = 0;
};

/// Experience-proportional weights; they sum to one.
std::vector<double> central_weights(std::span<const std::size_t> k_counts);

LocalDelta local_gradient(std::size_t edge_id, const PolicyParams& round_start, const PolicyParams& current,
                          std::size_t k_count = 0);

/// Availability-weighted aggregation. `deltas` and `weights` are given only for
/// available edges (weights are their c_n), `task_edge_count` is N_l.
void aggregate(CentralPolicy& central, std::span<const LocalDelta> deltas, std::span<const double> weights,
               std::size_t task_edge_count);

/// One federation round for a selected task. `edges` are all edges of the task,
/// `available[i]` says whether edges[i] participates.
void fed_ds_round(CentralPolicy& central, std::span<EdgeAgent* const> edges, std::span<const std::uint8_t> available);

}  // namespace frl
