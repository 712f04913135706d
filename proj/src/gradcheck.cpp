#include "addiplication/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "addiplication/training.hpp"

namespace addi {
double batch_mse(const Network& net, std::span<const LabeledPoint> batch) {
  return evaluate_loss(net, batch).loss;
}

GradientCheckReport check_network_gradients(const Network& net, std::span<const LabeledPoint> batch,
                                            double step, double floor) {
  Network probe = net;
  const std::vector<Input> inputs = to_inputs(batch);
  const ForwardResult fwd = probe.forward(inputs);
  std::vector<double> d_out(batch.size(), 0.0);
  std::size_t used = 0;
  for (const ExtendedReal& o : fwd.outputs) used += o.is_finite() ? 1 : 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (fwd.outputs[i].is_finite()) {
      d_out[i] = 2.0 * (fwd.outputs[i].value - batch[i].target) / static_cast<double>(used);
    }
  }
  const Gradients analytic = probe.backward(fwd.traces, d_out);

  GradientCheckReport report;
  std::vector<ParameterGroup> groups = probe.parameters();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    ParameterGroup& group = groups[g];
    for (std::size_t i = 0; i < group.values.size(); ++i) {
      if (!group.trainable) {
        if (analytic[g][i] != 0.0) ++report.frozen_nonzero;
        continue;
      }
      const double saved = group.values[i];
      group.values[i] = saved + step;
      const double up = batch_mse(probe, batch);
      group.values[i] = saved - step;
      const double down = batch_mse(probe, batch);
      group.values[i] = saved;
      const double fd = (up - down) / (2.0 * step);
      const double err = std::abs(analytic[g][i] - fd) / std::max(std::abs(fd), floor);
      ++report.checked;
      if (!(err <= report.max_rel_error)) {
        report.max_rel_error = err;
        report.worst_parameter = group.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

}  // namespace addi
