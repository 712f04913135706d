#pragma once

// Feed-forward network whose hidden neurons use the parameterized transfer
// sigma_{m,n}.  Three variants share one forward/backward engine:
//
//   tanh             m = n = 0 frozen, sigma_std = tanh (additive baseline)
//   trainable_exp_n  m, n trained per neuron, sigma_std = identity
//   fixed_log_exp    first hidden layer n = -1 (log), second m = +1 (exp),
//                    frozen; a product-unit network
//
// The output layer is affine with no transfer.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "addiplication/transfer.hpp"

namespace addi {

enum class Variant { tanh, trainable_exp_n, fixed_log_exp };

/// Command-line names: "tanh", "expn", "logexp".
std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);

struct NetworkConfig {
  Variant variant = Variant::trainable_exp_n;
  std::size_t input_size = 2;
  std::vector<std::size_t> hidden = {10, 10};
  std::uint64_t seed = 0;
  double init_variance = 1e-2;
  bool use_bias = true;
};

/// Throws std::invalid_argument on an unusable config.
void validate(const NetworkConfig& cfg);

struct Layer {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::vector<double> weights;  // fan_out x fan_in, row-major
  std::vector<double> bias;     // fan_out
  std::vector<double> m;        // fan_out, empty for the affine output layer
  std::vector<double> n;        // fan_out, empty for the affine output layer
  Nonlinearity nonlinearity = Nonlinearity::identity;
  bool transfer_trainable = false;

  bool has_transfer() const { return !m.empty(); }
  double& weight(std::size_t out, std::size_t in) { return weights[out * fan_in + in]; }
  double weight(std::size_t out, std::size_t in) const { return weights[out * fan_in + in]; }
  TransferParams transfer(std::size_t i) const {
    return {IterationOrder{m[i]}, IterationOrder{n[i]}};
  }
};

struct LayerTrace {
  std::vector<ExtendedReal> input;
  std::vector<ExtendedReal> pre_activation;
  std::vector<TransferCache> transfer;  // empty for the output layer
};

struct SampleTrace {
  std::vector<LayerTrace> layers;
  ExtendedReal output;
  /// Some neuron saturated on the way to the output.
  bool saturated = false;
};

struct ForwardResult {
  std::vector<ExtendedReal> outputs;
  std::vector<SampleTrace> traces;
  std::size_t saturated_samples = 0;
};

/// A named view of one parameter tensor.
struct ParameterGroup {
  std::string name;
  std::span<double> values;
  bool trainable = true;
};

/// Gradients aligned one-to-one with Network::parameters().
using Gradients = std::vector<std::vector<double>>;

using Input = std::vector<double>;

class Network {
 public:
  /// Draws every weight, bias and (for trainable_exp_n) every m and n
  /// i.i.d. from N(0, init_variance) with a generator seeded by cfg.seed.
  explicit Network(NetworkConfig cfg);

  const NetworkConfig& config() const { return config_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  SampleTrace forward_sample(std::span<const double> x) const;
  ForwardResult forward(std::span<const Input> batch) const;

  /// Accumulates parameter gradients over the batch.  Samples whose output is
  /// not finite, and every path through a saturated neuron, contribute zero.
  Gradients backward(std::span<const SampleTrace> traces, std::span<const double> d_outputs) const;

  std::vector<ParameterGroup> parameters();
  std::size_t parameter_count() const;

 private:
  void add_gradient(const SampleTrace& trace, double d_output, Gradients& grads) const;

  NetworkConfig config_;
  std::vector<Layer> layers_;
};

/// Extended-real affine map b + sum_j w_j a_j.  A term with an infinite input
/// and a nonzero weight contributes that infinity.
ExtendedReal affine(std::span<const double> weights, double bias, std::span<const ExtendedReal> input);

}  // namespace addi
