#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace frl {

/// Per-task affine normalization range for rewards.
struct RewardBounds {
    double lo = 0.0;
    double hi = 1.0;

    void validate() const;
};

/// (raw - lo) / (hi - lo), clamped to [0, 1].
double normalize_reward(const RewardBounds& bounds, double raw);

/// out[i] = mean of the last min(i + 1, window) values.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

/// 1-based round at which the smoothed series first reaches 90 % of its final
/// smoothed value; the series length when it never does.
std::size_t learning_speed(std::span<const double> per_round, std::size_t smoothing_window = 1,
                           double fraction = 0.9);

}  // namespace frl
