#include "addiplication/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "addiplication/csv.hpp"

namespace addi {
namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

nlohmann::json to_json(const TransferStats& s) {
  return {{"mean_abs_m", s.mean_abs_m}, {"mean_abs_n", s.mean_abs_n},
          {"max_abs_m", s.max_abs_m},   {"max_abs_n", s.max_abs_n}};
}

// JSON has no infinity; non-finite losses are written as strings.
nlohmann::json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

RunResult run_one(const ExperimentConfig& cfg, const Dataset& data, Variant variant, std::uint64_t seed) {
  NetworkConfig nc;
  nc.variant = variant;
  nc.hidden = cfg.hidden;
  nc.seed = seed;
  nc.init_variance = cfg.init_variance;
  nc.use_bias = cfg.use_bias;
  Network net(nc);

  RunResult result;
  result.variant = variant;
  result.seed = seed;
  result.record = train(net, data.split, cfg.train);
  result.dir = cfg.out_dir / run_name(variant, seed);
  std::filesystem::create_directories(result.dir);

  {
    std::ofstream out = open_for_write(result.dir / "losses.csv");
    write_losses_csv(out, result.record);
  }
  {
    std::ofstream out = open_for_write(result.dir / "grid.csv");
    write_grid_csv(out, relative_error_grid(net, data.poly, cfg.grid_resolution));
  }
  {
    const RunRecord& r = result.record;
    nlohmann::json meta = {
        {"kind", "run"},
        {"variant", std::string(to_string(variant))},
        {"seed", seed},
        {"config", to_json(cfg)},
        {"status", std::string(to_string(r.status))},
        {"diagnostic", r.diagnostic},
        {"epochs_run", r.epochs.size() - 1},
        {"initial_train_loss", number_or_string(r.initial_train_loss())},
        {"final_train_loss", number_or_string(r.final_train_loss())},
        {"final_test_loss", number_or_string(r.final_test_loss())},
        {"final_train_excluded", r.epochs.back().train_excluded},
        {"final_test_excluded", r.epochs.back().test_excluded},
        {"adam_steps", r.adam_steps},
        {"adam_skipped_updates", r.adam_skipped},
        {"initial_transfer", to_json(r.initial_transfer)},
        {"final_transfer", to_json(r.final_transfer)},
        {"parameter_count", net.parameter_count()},
    };
    std::ofstream out = open_for_write(result.dir / "run.meta");
    out << meta.dump() << '\n';
  }
  return result;
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.variants.empty()) throw std::invalid_argument("experiment: no variants selected");
  if (cfg.seeds.empty()) throw std::invalid_argument("experiment: no seeds selected");
  if (cfg.degree < 0) throw std::invalid_argument("experiment: degree must be non-negative");
  if (cfg.split.n_points == 0) throw std::invalid_argument("experiment: points must be positive");
  if (!(cfg.split.radius >= 0.0)) throw std::invalid_argument("experiment: radius must be non-negative");
  if (!(cfg.train.adam.learning_rate > 0.0)) throw std::invalid_argument("experiment: lr must be positive");
  if (cfg.grid_resolution < 2) throw std::invalid_argument("experiment: grid resolution must be >= 2");
  NetworkConfig nc;
  nc.hidden = cfg.hidden;
  nc.init_variance = cfg.init_variance;
  for (Variant v : cfg.variants) {
    nc.variant = v;
    validate(nc);
  }
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json variants = nlohmann::json::array();
  for (Variant v : cfg.variants) variants.push_back(std::string(to_string(v)));
  return {
      {"variants", variants},
      {"seeds", cfg.seeds},
      {"data_seed", cfg.data_seed},
      {"degree", cfg.degree},
      {"coefficient_distribution", "uniform(-1,1)"},
      {"points", cfg.split.n_points},
      {"radius", cfg.split.radius},
      {"center", {cfg.split.center_x1, cfg.split.center_x2}},
      {"hidden", cfg.hidden},
      {"init_variance", cfg.init_variance},
      {"use_bias", cfg.use_bias},
      {"epochs", cfg.train.epochs},
      {"batching", "full"},
      {"adam",
       {{"learning_rate", cfg.train.adam.learning_rate},
        {"beta1", cfg.train.adam.beta1},
        {"beta2", cfg.train.adam.beta2},
        {"epsilon", cfg.train.adam.epsilon}}},
      {"plateau_window", cfg.train.plateau_window},
      {"plateau_tolerance", cfg.train.plateau_tolerance},
      {"divergence_threshold", cfg.train.divergence_threshold},
      {"grid_resolution", cfg.grid_resolution},
  };
}

Dataset make_dataset(const ExperimentConfig& cfg) {
  Dataset d{sample_multinomial(cfg.data_seed, cfg.degree), {}};
  d.split = generate_split(d.poly, cfg.data_seed, cfg.split);
  return d;
}

void write_dataset_artifacts(const ExperimentConfig& cfg, const Dataset& data) {
  std::filesystem::create_directories(cfg.out_dir);
  {
    std::ofstream out = open_for_write(cfg.out_dir / "dataset.csv");
    write_dataset_csv(out, data.split);
  }
  const nlohmann::json meta = {
      {"kind", "dataset"},
      {"data_seed", cfg.data_seed},
      {"degree", data.poly.degree()},
      {"coefficient_order", "i ascending then j ascending, a_ij multiplies x1^i x2^j"},
      {"coefficients", data.poly.coefficients()},
      {"train_points", data.split.train.size()},
      {"test_points", data.split.test.size()},
      {"config", to_json(cfg)},
  };
  std::ofstream out = open_for_write(cfg.out_dir / "dataset.meta.jsonl");
  out << meta.dump() << '\n';
}

std::string run_name(Variant v, std::uint64_t seed) {
  return std::string(to_string(v)) + "_seed" + std::to_string(seed);
}

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const Dataset data = make_dataset(cfg);
  write_dataset_artifacts(cfg, data);

  struct Job {
    Variant variant;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Variant v : cfg.variants) {
    for (std::uint64_t s : cfg.seeds) jobs.push_back({v, s});
  }

  std::vector<RunResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_one(cfg, data, jobs[i].variant, jobs[i].seed);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  std::size_t threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::min(threads, jobs.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::ofstream summary = open_for_write(cfg.out_dir / "summary.csv");
  summary << "variant,seed,status,epochs_run,initial_train_loss,final_train_loss,final_test_loss,"
             "final_test_excluded,initial_mean_abs_n,final_mean_abs_n\n";
  for (const RunResult& r : results) {
    const RunRecord& rec = r.record;
    summary << to_string(r.variant) << ',' << r.seed << ',' << to_string(rec.status) << ','
            << rec.epochs.size() - 1 << ',' << format_double(rec.initial_train_loss()) << ','
            << format_double(rec.final_train_loss()) << ',' << format_double(rec.final_test_loss()) << ','
            << rec.epochs.back().test_excluded << ',' << format_double(rec.initial_transfer.mean_abs_n) << ','
            << format_double(rec.final_transfer.mean_abs_n) << '\n';
  }
  return results;
}

}  // namespace addi
