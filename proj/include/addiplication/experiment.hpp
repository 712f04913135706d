#pragma once

// Multi-variant, multi-seed training sweeps and their on-disk artifacts.
//
// Layout under the output directory:
//   dataset.csv, dataset.meta.jsonl
//   <variant>_seed<k>/losses.csv, grid.csv, run.meta
//   summary.csv

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "addiplication/dataset.hpp"
#include "addiplication/network.hpp"
#include "addiplication/training.hpp"

namespace addi {

struct ExperimentConfig {
  std::vector<Variant> variants = {Variant::tanh, Variant::trainable_exp_n, Variant::fixed_log_exp};
  std::vector<std::uint64_t> seeds = {0};
  std::uint64_t data_seed = 0;
  int degree = 4;
  SplitConfig split;
  std::vector<std::size_t> hidden = {10, 10};
  double init_variance = 1e-2;
  bool use_bias = true;
  TrainConfig train;
  std::size_t grid_resolution = 101;
  std::filesystem::path out_dir = "runs";
  /// 0 picks std::thread::hardware_concurrency().
  std::size_t threads = 0;
};

/// Throws std::invalid_argument on an unusable config.
void validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);

struct Dataset {
  Multinomial poly{4};
  DatasetSplit split;
};

Dataset make_dataset(const ExperimentConfig& cfg);

/// dataset.csv and dataset.meta.jsonl.
void write_dataset_artifacts(const ExperimentConfig& cfg, const Dataset& data);

struct RunResult {
  Variant variant = Variant::tanh;
  std::uint64_t seed = 0;
  RunRecord record;
  std::filesystem::path dir;
};

std::string run_name(Variant v, std::uint64_t seed);

/// Trains every (variant, seed) pair, writes its artifacts, and returns the
/// results ordered by variant then seed regardless of worker scheduling.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

}  // namespace addi
