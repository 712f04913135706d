#include "addiplication/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>

#include "addiplication/csv.hpp"

namespace addi {

LossResult mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) throw std::invalid_argument("mse_loss: length mismatch");
  if (pred.empty()) throw std::invalid_argument("mse_loss: empty input");
  LossResult r;
  r.gradient.resize(pred.size());
  const double scale = 1.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - target[i];
    r.loss += diff * diff;
    r.gradient[i] = 2.0 * diff * scale;
  }
  r.loss *= scale;
  return r;
}

Adam::Adam(AdamConfig cfg, std::span<const ParameterGroup> groups) : cfg_(cfg) {
  if (!(cfg_.learning_rate > 0.0) || !(cfg_.epsilon > 0.0) || !(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0) ||
      !(cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0)) {
    throw std::invalid_argument("adam: invalid hyperparameters");
  }
  for (const ParameterGroup& g : groups) {
    first_moment_.emplace_back(g.values.size(), 0.0);
    second_moment_.emplace_back(g.values.size(), 0.0);
  }
}

void Adam::step(std::span<ParameterGroup> groups, const Gradients& grads) {
  if (groups.size() != first_moment_.size() || grads.size() != groups.size()) {
    throw std::invalid_argument("adam: parameter group count changed");
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(cfg_.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg_.beta2, t);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    ParameterGroup& group = groups[g];
    const std::vector<double>& grad = grads[g];
    if (grad.size() != group.values.size()) throw std::invalid_argument("adam: gradient shape mismatch");
    if (!group.trainable) continue;
    if (!std::all_of(grad.begin(), grad.end(), [](double v) { return std::isfinite(v); })) {
      ++skipped_;
      continue;
    }
    std::vector<double>& m = first_moment_[g];
    std::vector<double>& v = second_moment_[g];
    for (std::size_t i = 0; i < grad.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * grad[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      group.values[i] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
  }
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::plateau:
      return "plateau";
    case RunStatus::diverged:
      return "diverged";
  }
  return "unknown";
}

TransferStats transfer_stats(const Network& net) {
  TransferStats stats;
  std::size_t count = 0;
  for (const Layer& layer : net.layers()) {
    for (std::size_t i = 0; i < layer.m.size(); ++i) {
      const double am = std::abs(layer.m[i]);
      const double an = std::abs(layer.n[i]);
      stats.mean_abs_m += am;
      stats.mean_abs_n += an;
      stats.max_abs_m = std::max(stats.max_abs_m, am);
      stats.max_abs_n = std::max(stats.max_abs_n, an);
      ++count;
    }
  }
  if (count > 0) {
    stats.mean_abs_m /= static_cast<double>(count);
    stats.mean_abs_n /= static_cast<double>(count);
  }
  return stats;
}

std::vector<Input> to_inputs(std::span<const LabeledPoint> points) {
  std::vector<Input> inputs;
  inputs.reserve(points.size());
  for (const LabeledPoint& p : points) inputs.push_back({p.x1, p.x2});
  return inputs;
}

namespace {

struct BatchLoss {
  EvaluatedLoss loss;
  std::vector<double> d_outputs;  // per sample, zero for excluded ones
};

BatchLoss batch_loss(const ForwardResult& fwd, std::span<const LabeledPoint> points) {
  std::vector<double> pred;
  std::vector<double> target;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!fwd.outputs[i].is_finite()) continue;
    pred.push_back(fwd.outputs[i].value);
    target.push_back(points[i].target);
    used.push_back(i);
  }
  BatchLoss r;
  r.d_outputs.assign(points.size(), 0.0);
  r.loss.excluded = points.size() - used.size();
  r.loss.used = used.size();
  if (used.empty()) {
    r.loss.loss = std::numeric_limits<double>::infinity();
    return r;
  }
  const LossResult mse = mse_loss(pred, target);
  r.loss.loss = mse.loss;
  for (std::size_t k = 0; k < used.size(); ++k) r.d_outputs[used[k]] = mse.gradient[k];
  return r;
}

// Flat means the whole window spans less than the tolerance, so a run that
// is still recovering from an Adam spike keeps going.
bool plateaued(const std::vector<EpochLoss>& epochs, const TrainConfig& cfg) {
  const auto window = std::span(epochs).last(cfg.plateau_window + 1);
  const auto [lo, hi] = std::minmax_element(window.begin(), window.end(), [](const EpochLoss& a, const EpochLoss& b) {
    return a.train_loss < b.train_loss;
  });
  return hi->train_loss > 0.0 && (hi->train_loss - lo->train_loss) / hi->train_loss < cfg.plateau_tolerance;
}

}  // namespace

EvaluatedLoss evaluate_loss(const Network& net, std::span<const LabeledPoint> points) {
  if (points.empty()) return {};
  const std::vector<Input> inputs = to_inputs(points);
  return batch_loss(net.forward(inputs), points).loss;
}

RunRecord train(Network& net, const DatasetSplit& data, const TrainConfig& cfg) {
  if (data.train.empty()) throw std::invalid_argument("train: empty training set");
  RunRecord record;
  record.initial_transfer = transfer_stats(net);
  const std::vector<Input> train_inputs = to_inputs(data.train);

  std::vector<ParameterGroup> groups = net.parameters();
  Adam adam(cfg.adam, groups);

  for (std::size_t epoch = 0;; ++epoch) {
    const ForwardResult fwd = net.forward(train_inputs);
    const BatchLoss bl = batch_loss(fwd, data.train);
    const EvaluatedLoss test = evaluate_loss(net, data.test);
    record.epochs.push_back({epoch, bl.loss.loss, test.loss, bl.loss.excluded, test.excluded});

    if (!(bl.loss.loss <= cfg.divergence_threshold)) {
      record.status = RunStatus::diverged;
      record.diagnostic = bl.loss.used == 0 ? "no finite network outputs on the training set"
                                            : "training loss exceeded the divergence threshold";
      break;
    }
    if (epoch == cfg.epochs) break;
    if (epoch >= cfg.plateau_window && plateaued(record.epochs, cfg)) {
      record.status = RunStatus::plateau;
      break;
    }
    const Gradients grads = net.backward(fwd.traces, bl.d_outputs);
    adam.step(groups, grads);
  }
  record.adam_steps = adam.step_count();
  record.adam_skipped = adam.skipped_updates();
  record.final_transfer = transfer_stats(net);
  return record;
}

std::vector<GridPoint> relative_error_grid(const Predictor& predict, const Multinomial& poly,
                                           std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("relative_error_grid: resolution must be >= 2");
  std::vector<GridPoint> grid;
  grid.reserve(resolution * resolution);
  const double step = 1.0 / static_cast<double>(resolution - 1);
  for (std::size_t i = 0; i < resolution; ++i) {
    for (std::size_t j = 0; j < resolution; ++j) {
      GridPoint g;
      g.x1 = static_cast<double>(i) * step;
      g.x2 = static_cast<double>(j) * step;
      g.target = eval_multinomial(poly, g.x1, g.x2);
      g.pred = predict(g.x1, g.x2);
      g.rel_err = std::abs(g.pred - g.target) / (std::abs(g.target) + 1e-8);
      grid.push_back(g);
    }
  }
  return grid;
}

std::vector<GridPoint> relative_error_grid(const Network& net, const Multinomial& poly,
                                           std::size_t resolution) {
  return relative_error_grid(
      [&net](double x1, double x2) {
        const double x[] = {x1, x2};
        return net.forward_sample(x).output.value;
      },
      poly, resolution);
}

void write_losses_csv(std::ostream& out, const RunRecord& record) {
  out << "epoch,train_loss,test_loss\n";
  for (const EpochLoss& e : record.epochs) {
    out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.test_loss) << '\n';
  }
}

void write_grid_csv(std::ostream& out, std::span<const GridPoint> grid) {
  out << "x1,x2,target,pred,rel_err\n";
  for (const GridPoint& g : grid) {
    out << format_double(g.x1) << ',' << format_double(g.x2) << ',' << format_double(g.target) << ','
        << format_double(g.pred) << ',' << format_double(g.rel_err) << '\n';
  }
}

}  // namespace addi
