#pragma once

// Fully connected Q-network with rectified-linear hidden layers and a linear
// output layer.
//
// Parameter layout (also the snapshot layout): for each layer l in order,
// the weight matrix W_l (rows = outputs, columns = inputs, row-major)
// followed by the bias vector b_l.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "frl/random.hpp"

namespace frl {

class PolicyParams {
public:
    PolicyParams() = default;
    /// Zero-initialized network; sizes = {input, hidden..., output}.
    explicit PolicyParams(std::vector<std::size_t> layer_sizes);

    const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
    std::size_t layer_count() const { return sizes_.empty() ? 0 : sizes_.size() - 1; }
    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }

    std::span<double> weights(std::size_t layer);
    std::span<const double> weights(std::size_t layer) const;
    std::span<double> bias(std::size_t layer);
    std::span<const double> bias(std::size_t layer) const;

    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    bool same_shape(const PolicyParams& other) const { return sizes_ == other.sizes_; }
    bool all_finite() const;

    friend bool operator==(const PolicyParams&, const PolicyParams&) = default;

private:
    std::size_t offset(std::size_t layer) const { return offsets_[layer]; }

    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<double> values_;
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
void initialize_fan_in_uniform(PolicyParams& params, Rng& rng);

std::vector<double> net_forward(const PolicyParams& params, std::span<const double> input);

/// Post-activation values of every layer, input included.
struct ForwardTrace {
    std::vector<std::vector<double>> activations;
    std::span<const double> output() const { return activations.back(); }
};

void net_forward(const PolicyParams& params, std::span<const double> input, ForwardTrace& trace);

/// Adds d(loss)/d(params) to `gradient` (same layout as params.values()),
/// given d(loss)/d(output) for the traced forward pass.
void net_backward(const PolicyParams& params, const ForwardTrace& trace, std::span<const double> output_grad,
                  std::span<double> gradient);

/// Whitespace-separated text dump: layer sizes line, then one value per line.
void write_snapshot(std::ostream& out, const PolicyParams& params);
PolicyParams read_snapshot(std::istream& in);

}  // namespace frl
