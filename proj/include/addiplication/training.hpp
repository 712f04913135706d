#pragma once

// Full-batch training with Adam on mean squared error, plus the evaluation
// artifacts of a run: per-epoch loss curves and a relative-error grid.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "addiplication/dataset.hpp"
#include "addiplication/network.hpp"

namespace addi {

struct LossResult {
  double loss = 0.0;
  std::vector<double> gradient;  // d loss / d pred
};

/// Mean squared error and its gradient 2 (pred - target) / N.
LossResult mse_loss(std::span<const double> pred, std::span<const double> target);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class Adam {
 public:
  Adam(AdamConfig cfg, std::span<const ParameterGroup> groups);

  /// One bias-corrected update.  Frozen groups are left alone; a trainable
  /// group whose gradient holds a non-finite entry is skipped and counted.
  void step(std::span<ParameterGroup> groups, const Gradients& grads);

  const AdamConfig& config() const { return cfg_; }
  std::int64_t step_count() const { return step_; }
  std::int64_t skipped_updates() const { return skipped_; }

 private:
  AdamConfig cfg_;
  std::int64_t step_ = 0;
  std::int64_t skipped_ = 0;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;
};

struct TrainConfig {
  std::size_t epochs = 5000;
  AdamConfig adam;
  /// Stop when the train loss over the last `plateau_window` epochs stays
  /// within this relative band.
  std::size_t plateau_window = 200;
  double plateau_tolerance = 1e-9;
  double divergence_threshold = 1e12;
};

enum class RunStatus { completed, plateau, diverged };
std::string_view to_string(RunStatus s);

struct EpochLoss {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double test_loss = 0.0;
  /// Samples whose output was not finite; left out of the averages.
  std::size_t train_excluded = 0;
  std::size_t test_excluded = 0;
};

/// Mean |m| and |n| over the hidden neurons, with the maxima.
struct TransferStats {
  double mean_abs_m = 0.0;
  double mean_abs_n = 0.0;
  double max_abs_m = 0.0;
  double max_abs_n = 0.0;
};
TransferStats transfer_stats(const Network& net);

struct RunRecord {
  std::vector<EpochLoss> epochs;  // epochs[0] is the untrained network
  RunStatus status = RunStatus::completed;
  std::string diagnostic;
  std::int64_t adam_steps = 0;
  std::int64_t adam_skipped = 0;
  TransferStats initial_transfer;
  TransferStats final_transfer;

  double initial_train_loss() const { return epochs.front().train_loss; }
  double final_train_loss() const { return epochs.back().train_loss; }
  double final_test_loss() const { return epochs.back().test_loss; }
};

struct EvaluatedLoss {
  double loss = 0.0;
  std::size_t excluded = 0;
  std::size_t used = 0;
};

std::vector<Input> to_inputs(std::span<const LabeledPoint> points);

/// MSE over the samples whose output is finite.
EvaluatedLoss evaluate_loss(const Network& net, std::span<const LabeledPoint> points);

/// Trains `net` in place; deterministic given the network and data.
RunRecord train(Network& net, const DatasetSplit& data, const TrainConfig& cfg);

struct GridPoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double target = 0.0;
  double pred = 0.0;
  double rel_err = 0.0;
};

using Predictor = std::function<double(double x1, double x2)>;

/// |pred - f| / (|f| + 1e-8) on a resolution x resolution lattice of [0, 1]^2,
/// x1 major.
std::vector<GridPoint> relative_error_grid(const Predictor& predict, const Multinomial& poly,
                                           std::size_t resolution = 101);
std::vector<GridPoint> relative_error_grid(const Network& net, const Multinomial& poly,
                                           std::size_t resolution = 101);

/// `epoch,train_loss,test_loss`
void write_losses_csv(std::ostream& out, const RunRecord& record);
/// `x1,x2,target,pred,rel_err`
void write_grid_csv(std::ostream& out, std::span<const GridPoint> grid);

}  // namespace addi
