#include "frl/federation.hpp"

#include <algorithm>
#include <numeric>

#include "frl/errors.hpp"

namespace frl {

std::vector<double> central_weights(std::span<const std::size_t> k_counts) {
    const double total = static_cast<double>(std::accumulate(k_counts.begin(), k_counts.end(), std::size_t{0}));
    if (total == 0.0) throw InvariantViolation("degenerate round: no experiences from any edge");
    std::vector<double> c;
    c.reserve(k_counts.size());
    for (auto k : k_counts) c.push_back(static_cast<double>(k) / total);
    return c;
}

LocalDelta local_gradient(std::size_t edge_id, const PolicyParams& round_start, const PolicyParams& current,
                          std::size_t k_count) {
    if (!round_start.same_shape(current)) throw ContractViolation("local parameters changed shape during the round");
    LocalDelta out{edge_id, std::vector<double>(current.values().size()), k_count};
    for (std::size_t i = 0; i < out.delta.size(); ++i) out.delta[i] = round_start.values()[i] - current.values()[i];
    return out;
}

void aggregate(CentralPolicy& central, std::span<const LocalDelta> deltas, std::span<const double> weights,
               std::size_t task_edge_count) {
    if (deltas.empty()) throw ContractViolation("aggregation needs at least one available edge");
    if (deltas.size() != weights.size()) throw ContractViolation("one weight per delta required");
    const double available = static_cast<double>(deltas.size());
    const double scale = static_cast<double>(task_edge_count) / available;
    auto& theta = central.theta.values();
    for (std::size_t n = 0; n < deltas.size(); ++n) {
        if (deltas[n].delta.size() != theta.size()) throw ContractViolation("delta shape differs from the central policy");
        const double c = scale * weights[n];
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= c * deltas[n].delta[i];
    }
    ++central.round_index;
}

void fed_ds_round(CentralPolicy& central, std::span<EdgeAgent* const> edges, std::span<const std::uint8_t> available) {
    if (edges.size() != available.size()) throw ContractViolation("availability vector does not match the edges");
    std::vector<std::size_t> k_counts;
    k_counts.reserve(edges.size());
    for (const auto* e : edges) k_counts.push_back(e->round_experience_count());

    std::vector<LocalDelta> deltas;
    std::vector<double> weights;
    const bool any_experience = std::any_of(k_counts.begin(), k_counts.end(), [](auto k) { return k > 0; });
    if (any_experience) {
        const auto c = central_weights(k_counts);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            if (!available[i]) continue;
            deltas.push_back(local_gradient(edges[i]->id(), edges[i]->round_start_params(), edges[i]->params(), k_counts[i]));
            weights.push_back(c[i]);
        }
    }
    if (deltas.empty()) {
        if (std::none_of(available.begin(), available.end(), [](auto a) { return a; }))
            throw ContractViolation("federation invoked for a task with no available edge");
        // nothing was learned since the last boundary: theta^{r+1} = theta^r
        ++central.round_index;
    } else {
        aggregate(central, deltas, weights, edges.size());
    }
    for (auto* e : edges) e->adopt_params(central.theta);
}

}  // namespace frl
