#include "frl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "frl/errors.hpp"

namespace frl {

void RewardBounds::validate() const {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
        throw ConfigError("reward normalization needs finite bounds with hi > lo");
}

double normalize_reward(const RewardBounds& bounds, double raw) {
    bounds.validate();
    return std::clamp((raw - bounds.lo) / (bounds.hi - bounds.lo), 0.0, 1.0);
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (window == 0) throw DomainError("moving-average window must be at least 1");
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t n = std::min(i + 1, window);
        double sum = 0.0;
        for (std::size_t j = i + 1 - n; j <= i; ++j) sum += series[j];
        out[i] = sum / static_cast<double>(n);
    }
    return out;
}

std::size_t learning_speed(std::span<const double> per_round, std::size_t smoothing_window, double fraction) {
    if (per_round.empty()) throw DomainError("learning speed needs a non-empty series");
    const auto smooth = moving_average(per_round, smoothing_window);
    const double threshold = fraction * smooth.back();
    for (std::size_t i = 0; i < smooth.size(); ++i)
        if (smooth[i] >= threshold) return i + 1;
    return smooth.size();
}

}  // namespace frl
