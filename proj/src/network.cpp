#include "addiplication/network.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace addi {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::tanh:
      return "tanh";
    case Variant::trainable_exp_n:
      return "expn";
    case Variant::fixed_log_exp:
      return "logexp";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  if (name == "tanh") return Variant::tanh;
  if (name == "expn") return Variant::trainable_exp_n;
  if (name == "logexp") return Variant::fixed_log_exp;
  return std::nullopt;
}

void validate(const NetworkConfig& cfg) {
  if (cfg.input_size == 0) throw std::invalid_argument("network: input size must be positive");
  if (cfg.hidden.empty()) throw std::invalid_argument("network: at least one hidden layer required");
  for (std::size_t h : cfg.hidden) {
    if (h == 0) throw std::invalid_argument("network: hidden layer sizes must be positive");
  }
  if (!(cfg.init_variance > 0.0) || !std::isfinite(cfg.init_variance)) {
    throw std::invalid_argument("network: init variance must be positive");
  }
  if (cfg.variant == Variant::fixed_log_exp && cfg.hidden.size() != 2) {
    throw std::invalid_argument("network: the log-exp variant needs exactly two hidden layers");
  }
}

ExtendedReal affine(std::span<const double> weights, double bias, std::span<const ExtendedReal> input) {
  double sum = bias;
  bool saturated = false;
  bool positive_infinity = false;
  bool negative_infinity = false;
  for (std::size_t j = 0; j < input.size(); ++j) {
    const ExtendedReal& a = input[j];
    saturated = saturated || a.saturated;
    if (a.is_finite()) {
      sum += weights[j] * a.value;
    } else if (weights[j] != 0.0) {
      const bool up = a.is_positive_infinity() == (weights[j] > 0.0);
      (up ? positive_infinity : negative_infinity) = true;
    }
  }
  // Opposite infinities: an exp^(1) unit downstream of log^(1) units computes
  // prod_j a_j^w_j, where a zero base with mixed-sign exponents is 0 * inf.
  // Resolve toward the -inf (zero-product) side.
  if (negative_infinity) return ExtendedReal::negative_infinity();
  if (positive_infinity) return ExtendedReal::positive_infinity();
  return {sum, saturated};
}

Network::Network(NetworkConfig cfg) : config_(std::move(cfg)) {
  validate(config_);
  std::mt19937_64 rng(config_.seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(config_.init_variance));

  std::vector<std::size_t> sizes;
  sizes.push_back(config_.input_size);
  sizes.insert(sizes.end(), config_.hidden.begin(), config_.hidden.end());
  sizes.push_back(1);

  const std::size_t n_layers = sizes.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    Layer layer;
    layer.fan_in = sizes[l];
    layer.fan_out = sizes[l + 1];
    layer.weights.resize(layer.fan_in * layer.fan_out);
    layer.bias.assign(layer.fan_out, 0.0);
    for (double& w : layer.weights) w = normal(rng);
    for (double& b : layer.bias) {
      const double draw = normal(rng);
      if (config_.use_bias) b = draw;
    }

    const bool output_layer = l + 1 == n_layers;
    if (!output_layer) {
      layer.m.assign(layer.fan_out, 0.0);
      layer.n.assign(layer.fan_out, 0.0);
      switch (config_.variant) {
        case Variant::tanh:
          layer.nonlinearity = Nonlinearity::tanh;
          break;
        case Variant::trainable_exp_n:
          layer.transfer_trainable = true;
          for (double& v : layer.m) v = normal(rng);
          for (double& v : layer.n) v = normal(rng);
          break;
        case Variant::fixed_log_exp:
          if (l == 0) layer.n.assign(layer.fan_out, -1.0);
          if (l == 1) layer.m.assign(layer.fan_out, 1.0);
          break;
      }
    }
    layers_.push_back(std::move(layer));
  }
}

SampleTrace Network::forward_sample(std::span<const double> x) const {
  if (x.size() != config_.input_size) {
    throw std::invalid_argument("network: input has the wrong dimension");
  }
  SampleTrace trace;
  trace.layers.resize(layers_.size());
  std::vector<ExtendedReal> activation;
  activation.reserve(x.size());
  for (double v : x) activation.push_back(ExtendedReal::finite(v));

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    LayerTrace& lt = trace.layers[l];
    lt.input = activation;
    lt.pre_activation.resize(layer.fan_out);
    for (std::size_t i = 0; i < layer.fan_out; ++i) {
      const std::span<const double> row(layer.weights.data() + i * layer.fan_in, layer.fan_in);
      lt.pre_activation[i] = affine(row, layer.bias[i], lt.input);
    }
    if (!layer.has_transfer()) {
      activation = lt.pre_activation;
      continue;
    }
    lt.transfer.resize(layer.fan_out);
    activation.resize(layer.fan_out);
    for (std::size_t i = 0; i < layer.fan_out; ++i) {
      TransferResult r = transfer_forward(lt.pre_activation[i], layer.transfer(i), layer.nonlinearity);
      trace.saturated = trace.saturated || r.value.saturated;
      activation[i] = r.value;
      lt.transfer[i] = r.cache;
    }
  }
  trace.output = activation.front();
  trace.saturated = trace.saturated || trace.output.saturated || !trace.output.is_finite();
  return trace;
}

ForwardResult Network::forward(std::span<const Input> batch) const {
  ForwardResult result;
  result.outputs.reserve(batch.size());
  result.traces.reserve(batch.size());
  for (const Input& x : batch) {
    SampleTrace trace = forward_sample(x);
    if (trace.saturated) ++result.saturated_samples;
    result.outputs.push_back(trace.output);
    result.traces.push_back(std::move(trace));
  }
  return result;
}

std::vector<ParameterGroup> Network::parameters() {
  std::vector<ParameterGroup> groups;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Layer& layer = layers_[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    groups.push_back({prefix + "weights", layer.weights, true});
    groups.push_back({prefix + "bias", layer.bias, config_.use_bias});
    if (layer.has_transfer()) {
      groups.push_back({prefix + "m", layer.m, layer.transfer_trainable});
      groups.push_back({prefix + "n", layer.n, layer.transfer_trainable});
    }
  }
  return groups;
}

std::size_t Network::parameter_count() const {
  std::size_t count = 0;
  for (const Layer& layer : layers_) {
    count += layer.weights.size() + layer.bias.size() + layer.m.size() + layer.n.size();
  }
  return count;
}

Gradients Network::backward(std::span<const SampleTrace> traces,
                            std::span<const double> d_outputs) const {
  if (traces.size() != d_outputs.size()) {
    throw std::invalid_argument("network: trace and gradient counts differ");
  }
  Gradients grads;
  for (const Layer& layer : layers_) {
    grads.emplace_back(layer.weights.size(), 0.0);
    grads.emplace_back(layer.bias.size(), 0.0);
    if (layer.has_transfer()) {
      grads.emplace_back(layer.m.size(), 0.0);
      grads.emplace_back(layer.n.size(), 0.0);
    }
  }
  for (std::size_t s = 0; s < traces.size(); ++s) add_gradient(traces[s], d_outputs[s], grads);
  return grads;
}

void Network::add_gradient(const SampleTrace& trace, double d_output, Gradients& grads) const {
  if (!trace.output.is_finite() || d_output == 0.0) return;

  std::vector<std::size_t> group_offset(layers_.size());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    group_offset[l] = offset;
    offset += layers_[l].has_transfer() ? 4 : 2;
  }

  std::vector<double> upstream{d_output};
  std::vector<double> d_pre;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    const LayerTrace& lt = trace.layers[l];
    const std::size_t g = group_offset[l];

    d_pre.assign(layer.fan_out, 0.0);
    for (std::size_t i = 0; i < layer.fan_out; ++i) {
      if (upstream[i] == 0.0) continue;
      if (layer.has_transfer()) {
        const TransferGradient tg = transfer_backward(lt.transfer[i], upstream[i], layer.transfer_trainable);
        d_pre[i] = tg.d_t;
        if (layer.transfer_trainable) {
          grads[g + 2][i] += tg.d_m;
          grads[g + 3][i] += tg.d_n;
        }
      } else if (lt.pre_activation[i].is_finite()) {
        d_pre[i] = upstream[i];
      }
    }

    std::vector<double> next(layer.fan_in, 0.0);
    for (std::size_t i = 0; i < layer.fan_out; ++i) {
      const double dt = d_pre[i];
      if (dt == 0.0) continue;
      if (config_.use_bias) grads[g + 1][i] += dt;
      for (std::size_t j = 0; j < layer.fan_in; ++j) {
        const ExtendedReal& a = lt.input[j];
        if (a.is_finite()) grads[g][i * layer.fan_in + j] += dt * a.value;
        next[j] += layer.weight(i, j) * dt;
      }
    }
    upstream = std::move(next);
  }
}

}  // namespace addi
