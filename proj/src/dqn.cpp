#include "frl/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "frl/errors.hpp"

namespace frl {

void DqnConfig::validate() const {
    if (!(learning_rate > 0)) throw ConfigError("learning_rate must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (train_interval == 0 || target_update_interval == 0) throw ConfigError("intervals must be positive");
    if (!(gamma >= 0 && gamma < 1)) throw ConfigError("gamma must lie in [0, 1)");
    if (epsilon_start < 0 || epsilon_start > 1 || epsilon_end < 0 || epsilon_end > 1)
        throw ConfigError("epsilon values must lie in [0, 1]");
    if (epsilon_decay_fraction < 0) throw ConfigError("epsilon_decay_fraction must be non-negative");
    if (replay_capacity == 0) throw ConfigError("replay_capacity must be positive");
    for (auto h : hidden_layers)
        if (h == 0) throw ConfigError("hidden layer width must be positive");
}

double EpsilonSchedule::at(std::size_t global_slot) const {
    if (decay_slots <= 0) return end;
    const double progress = std::min(1.0, static_cast<double>(global_slot) / decay_slots);
    return start + (end - start) * progress;
}

std::vector<std::size_t> network_shape(const ActionSpace& space, const std::vector<std::size_t>& hidden) {
    std::vector<std::size_t> sizes{space.cell_count()};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(space.size());
    return sizes;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ContractViolation("replay capacity must be positive");
    items_.reserve(std::min<std::size_t>(capacity, 1 << 14));
}

void ReplayBuffer::push(Experience exp) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(exp));
    } else {
        items_[head_] = std::move(exp);
        head_ = (head_ + 1) % capacity_;
    }
    ++round_count_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
    if (i >= items_.size()) throw ContractViolation("replay index out of range");
    return items_[(head_ + i) % items_.size()];
}

std::vector<Experience> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
    if (items_.empty()) throw ContractViolation("cannot sample from an empty replay buffer");
    std::vector<Experience> batch;
    batch.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(items_[uniform_index(rng, items_.size())]);
    return batch;
}

std::size_t select_action(std::span<const double> q, std::span<const std::uint8_t> feasible, double epsilon,
                          Rng& rng) {
    if (q.size() != feasible.size()) throw ContractViolation("Q-vector and mask sizes differ");
    const auto count = static_cast<std::size_t>(std::count_if(feasible.begin(), feasible.end(), [](auto f) { return f; }));
    if (count == 0) throw InvariantViolation("no feasible action");
    if (epsilon > 0.0 && uniform01(rng) < epsilon) {
        std::size_t k = uniform_index(rng, count);
        for (std::size_t a = 0; a < feasible.size(); ++a)
            if (feasible[a] && k-- == 0) return a;
    }
    std::size_t best = feasible.size();
    for (std::size_t a = 0; a < feasible.size(); ++a)
        if (feasible[a] && (best == feasible.size() || q[a] > q[best])) best = a;
    return best;
}

namespace {

double max_feasible_q(std::span<const double> q, const AgnosticState& state, const ActionSpace& space) {
    double best = -std::numeric_limits<double>::infinity();
    const std::size_t combos = space.decision_combinations();
    for (std::size_t cell = 0; cell < space.cell_count(); ++cell) {
        if (!state.occupied(cell)) continue;
        for (std::size_t d = 0; d < combos; ++d) best = std::max(best, q[cell * combos + d]);
    }
    if (best == -std::numeric_limits<double>::infinity())
        throw InvariantViolation("next state has no feasible action");
    return best;
}

}  // namespace

double train_step(PolicyParams& params, const PolicyParams& target, std::span<const Experience> batch, double gamma,
                  double learning_rate, const ActionSpace& space) {
    if (batch.empty()) throw ContractViolation("training batch is empty");
    if (!params.same_shape(target)) throw ContractViolation("online and target networks differ in shape");
    if (params.output_size() != space.size()) throw ContractViolation("network output does not match action space");

    const double n = static_cast<double>(batch.size());
    std::vector<double> gradient(params.values().size(), 0.0);
    std::vector<double> out_grad(params.output_size(), 0.0);
    ForwardTrace trace;
    ForwardTrace target_trace;
    double loss = 0.0;
    for (const auto& exp : batch) {
        double y = exp.reward;
        if (gamma > 0.0) {
            net_forward(target, exp.next_state.as_input(), target_trace);
            y += gamma * max_feasible_q(target_trace.output(), exp.next_state, space);
        }
        net_forward(params, exp.state.as_input(), trace);
        const double err = trace.output()[exp.action] - y;
        loss += err * err;
        std::fill(out_grad.begin(), out_grad.end(), 0.0);
        out_grad[exp.action] = 2.0 * err / n;
        net_backward(params, trace, out_grad, gradient);
    }
    loss /= n;
    if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite TD loss (" << loss << ") over a batch of " << batch.size() << " experiences";
        throw TrainingDivergence(msg.str());
    }
    auto& values = params.values();
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= learning_rate * gradient[i];
    return loss;
}

EdgeAgent::EdgeAgent(std::size_t id, EdgeConfig config, PartitionSpec partition, const DqnConfig& dqn,
                     const PolicyParams& initial, RewardBounds bounds, std::uint64_t master_seed)
    : id_(id),
      config_(std::move(config)),
      partition_(std::move(partition)),
      dqn_(dqn),
      space_(partition_.shape(), task_spec(config_).decision_grids),
      bounds_(bounds),
      env_rng_(make_stream(master_seed, StreamKind::environment, id)),
      agent_rng_(make_stream(master_seed, StreamKind::agent, id)),
      params_(initial),
      target_(initial),
      round_start_(initial),
      replay_(dqn.replay_capacity) {
    config_.validate();
    partition_.validate();
    dqn_.validate();
    bounds_.validate();
    if (task_spec(config_).state_info_count != partition_.axes.size())
        throw ConfigError("partition axes do not match the task's state information");
    if (initial.layer_sizes() != network_shape(space_, dqn_.hidden_layers))
        throw ContractViolation("initial parameters do not match the task network shape");
    state_ = env_reset(config_, derive_seed(master_seed, StreamKind::environment, ~static_cast<std::uint64_t>(id)));
}

void EdgeAgent::adopt_params(const PolicyParams& central) {
    if (!central.same_shape(params_)) throw ContractViolation("broadcast parameters have the wrong shape");
    params_ = central;
    round_start_ = central;
}

void EdgeAgent::run_local_slots(std::size_t slots, std::size_t global_slot, const EpsilonSchedule& epsilon,
                                const StepObserver& observer) {
    AgnosticState agn = encode_state(state_, partition_);
    for (std::size_t s = 0; s < slots; ++s) {
        const auto mask = space_.feasible_mask(agn);
        const auto q = net_forward(params_, agn.as_input());
        const std::size_t a = select_action(q, mask, epsilon.at(global_slot + s), agent_rng_);
        const EdgeAction action = translate_action(space_.decode(a), state_, partition_, agent_rng_);
        Transition tr = env_step(config_, state_, action, env_rng_);
        const double normalized = normalize_reward(bounds_, tr.reward);
        AgnosticState next = encode_state(tr.next_state, partition_);

        if (observer) observer(StepRecord{id_, global_slot + s, state_, agn, mask, a, action, tr, normalized});
        raw_rewards_.push_back(tr.reward);
        normalized_rewards_.push_back(normalized);
        replay_.push(Experience{agn, a, normalized, next});

        state_ = std::move(tr.next_state);
        agn = std::move(next);
        ++local_slot_;

        if (local_slot_ % dqn_.train_interval == 0) {
            const auto batch = replay_.sample(dqn_.batch_size, agent_rng_);
            last_loss_ = train_step(params_, target_, batch, dqn_.gamma, dqn_.learning_rate, space_);
            ++train_steps_;
        }
        if (local_slot_ % dqn_.target_update_interval == 0) {
            target_ = params_;
            ++target_syncs_;
        }
    }
}

}  // namespace frl
