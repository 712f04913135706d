#pragma once

// Central finite-difference check of Network::backward against the MSE loss.

#include <cstddef>
#include <span>
#include <string>

#include "addiplication/dataset.hpp"
#include "addiplication/network.hpp"

namespace addi {

struct GradientCheckReport {
  std::size_t checked = 0;
  double max_rel_error = 0.0;
  std::string worst_parameter;
  /// Frozen parameters whose analytic gradient was nonzero.
  std::size_t frozen_nonzero = 0;
};

/// MSE of the network over `batch`, restricted to finite outputs.
double batch_mse(const Network& net, std::span<const LabeledPoint> batch);

/// Relative error |analytic - fd| / max(|fd|, floor) for every trainable
/// parameter; frozen ones must have an exactly zero analytic gradient.
GradientCheckReport check_network_gradients(const Network& net, std::span<const LabeledPoint> batch,
                                            double step = 1e-6, double floor = 1e-5);

}  // namespace addi
