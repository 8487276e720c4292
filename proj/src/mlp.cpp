#include "frl/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "frl/errors.hpp"

namespace frl {

PolicyParams::PolicyParams(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2) throw ContractViolation("network needs an input and an output layer");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        if (sizes_[l] == 0 || sizes_[l + 1] == 0) throw ContractViolation("layer width must be positive");
        offsets_.push_back(total);
        total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    }
    values_.assign(total, 0.0);
}

std::span<double> PolicyParams::weights(std::size_t layer) {
    return {values_.data() + offset(layer), sizes_[layer] * sizes_[layer + 1]};
}
std::span<const double> PolicyParams::weights(std::size_t layer) const {
    return {values_.data() + offset(layer), sizes_[layer] * sizes_[layer + 1]};
}
std::span<double> PolicyParams::bias(std::size_t layer) {
    return {values_.data() + offset(layer) + sizes_[layer] * sizes_[layer + 1], sizes_[layer + 1]};
}
std::span<const double> PolicyParams::bias(std::size_t layer) const {
    return {values_.data() + offset(layer) + sizes_[layer] * sizes_[layer + 1], sizes_[layer + 1]};
}

bool PolicyParams::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void initialize_fan_in_uniform(PolicyParams& params, Rng& rng) {
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(params.layer_sizes()[l]));
        for (double& w : params.weights(l)) w = (2.0 * uniform01(rng) - 1.0) * bound;
        std::fill(params.bias(l).begin(), params.bias(l).end(), 0.0);
    }
}

namespace {

// out = W x + b, optionally rectified
void dense(std::span<const double> w, std::span<const double> b, std::span<const double> x, std::vector<double>& out,
           bool relu) {
    const std::size_t n_in = x.size();
    const std::size_t n_out = b.size();
    out.assign(b.begin(), b.end());
    for (std::size_t i = 0; i < n_in; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;  // agnostic inputs are mostly zero
        for (std::size_t j = 0; j < n_out; ++j) out[j] += w[j * n_in + i] * xi;
    }
    if (relu)
        for (double& v : out) v = v > 0.0 ? v : 0.0;
}

}  // namespace

void net_forward(const PolicyParams& params, std::span<const double> input, ForwardTrace& trace) {
    if (input.size() != params.input_size())
        throw ContractViolation("network input has " + std::to_string(input.size()) + " values, expected " +
                                std::to_string(params.input_size()));
    const std::size_t layers = params.layer_count();
    trace.activations.resize(layers + 1);
    trace.activations[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < layers; ++l)
        dense(params.weights(l), params.bias(l), trace.activations[l], trace.activations[l + 1], l + 1 < layers);
}

std::vector<double> net_forward(const PolicyParams& params, std::span<const double> input) {
    ForwardTrace trace;
    net_forward(params, input, trace);
    return std::move(trace.activations.back());
}

void net_backward(const PolicyParams& params, const ForwardTrace& trace, std::span<const double> output_grad,
                  std::span<double> gradient) {
    if (gradient.size() != params.values().size()) throw ContractViolation("gradient buffer has wrong size");
    if (output_grad.size() != params.output_size()) throw ContractViolation("output gradient has wrong size");
    const std::size_t layers = params.layer_count();

    // delta holds d(loss)/d(pre-activation) of the current layer
    std::vector<double> delta(output_grad.begin(), output_grad.end());
    std::vector<double> prev;
    std::size_t offset = params.values().size();
    for (std::size_t l = layers; l-- > 0;) {
        const std::size_t n_in = params.layer_sizes()[l];
        const std::size_t n_out = params.layer_sizes()[l + 1];
        offset -= n_in * n_out + n_out;
        const auto& x = trace.activations[l];
        double* gw = gradient.data() + offset;
        double* gb = gw + n_in * n_out;
        for (std::size_t j = 0; j < n_out; ++j) {
            const double d = delta[j];
            if (d == 0.0) continue;
            gb[j] += d;
            double* row = gw + j * n_in;
            for (std::size_t i = 0; i < n_in; ++i) row[i] += d * x[i];
        }
        if (l == 0) break;
        const auto w = params.weights(l);
        prev.assign(n_in, 0.0);
        for (std::size_t j = 0; j < n_out; ++j) {
            const double d = delta[j];
            if (d == 0.0) continue;
            const double* row = w.data() + j * n_in;
            for (std::size_t i = 0; i < n_in; ++i) prev[i] += row[i] * d;
        }
        // ReLU derivative: active iff the post-activation value is positive
        for (std::size_t i = 0; i < n_in; ++i)
            if (!(x[i] > 0.0)) prev[i] = 0.0;
        delta.swap(prev);
    }
}

void write_snapshot(std::ostream& out, const PolicyParams& params) {
    for (std::size_t i = 0; i < params.layer_sizes().size(); ++i)
        out << (i ? " " : "") << params.layer_sizes()[i];
    out << '\n' << std::setprecision(17);
    for (double v : params.values()) out << v << '\n';
}

PolicyParams read_snapshot(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("empty parameter snapshot");
    std::istringstream hs(header);
    std::vector<std::size_t> sizes;
    for (std::size_t s; hs >> s;) sizes.push_back(s);
    PolicyParams params(std::move(sizes));
    for (double& v : params.values())
        if (!(in >> v)) throw ConfigError("parameter snapshot is truncated");
    return params;
}

}  // namespace frl
