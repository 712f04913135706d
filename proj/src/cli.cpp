#include "addiplication/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "addiplication/abel.hpp"
#include "addiplication/csv.hpp"
#include "addiplication/experiment.hpp"
#include "addiplication/verification.hpp"

namespace addi::cli {
namespace {

struct Flags {
  std::string variant = "all";
  std::uint64_t seed = 0;
  std::string seeds;
  std::uint64_t data_seed = 0;
  int epochs = 5000;
  double lr = 1e-3;
  std::vector<std::size_t> hidden = {10, 10};
  std::string out = "runs";
  int degree = 4;
  std::size_t points = 600;
  double radius = 0.33;
  std::vector<double> center = {0.5, 0.5};
  std::size_t grid = 101;
  std::size_t threads = 1;
  bool no_bias = false;
};

// "3", "0..4" or "0,2,5".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  const auto number = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
      throw std::invalid_argument("bad seed list: " + text);
    }
    return v;
  };
  std::vector<std::uint64_t> seeds;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const std::uint64_t lo = number(std::string_view(text).substr(0, dots));
    const std::uint64_t hi = number(std::string_view(text).substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("bad seed range: " + text);
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::string_view rest(text);
  while (true) {
    const auto comma = rest.find(',');
    seeds.push_back(number(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return seeds;
}

std::vector<Variant> parse_variants(const std::string& text) {
  if (text == "all") return {Variant::tanh, Variant::trainable_exp_n, Variant::fixed_log_exp};
  const auto v = parse_variant(text);
  if (!v) throw std::invalid_argument("unknown variant: " + text);
  return {*v};
}

ExperimentConfig to_config(const Flags& f, bool training) {
  ExperimentConfig cfg;
  if (training) {
    cfg.variants = parse_variants(f.variant);
    cfg.seeds = f.seeds.empty() ? std::vector<std::uint64_t>{f.seed} : parse_seeds(f.seeds);
  }
  cfg.data_seed = f.data_seed;
  cfg.degree = f.degree;
  cfg.split.n_points = f.points;
  cfg.split.radius = f.radius;
  cfg.split.center_x1 = f.center.at(0);
  cfg.split.center_x2 = f.center.at(1);
  cfg.hidden = f.hidden;
  cfg.use_bias = !f.no_bias;
  if (f.epochs < 0) throw std::invalid_argument("epochs must be non-negative");
  cfg.train.epochs = static_cast<std::size_t>(f.epochs);
  cfg.train.adam.learning_rate = f.lr;
  cfg.grid_resolution = f.grid;
  cfg.threads = f.threads;
  cfg.out_dir = f.out;
  validate(cfg);
  return cfg;
}

void add_data_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--degree", f.degree, "multinomial degree")->capture_default_str();
  cmd.add_option("--points", f.points, "number of sampled points")->capture_default_str();
  cmd.add_option("--radius", f.radius, "test disc radius")->capture_default_str();
  cmd.add_option("--center", f.center, "test disc center x,y")->delimiter(',')->expected(2);
  cmd.add_option("--out", f.out, "output directory")->capture_default_str();
}

std::string shortest(double v) {
  if (!std::isfinite(v)) return format_double(v);
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

int cmd_gen_data(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = to_config(f, false);
  const Dataset data = make_dataset(cfg);
  write_dataset_artifacts(cfg, data);
  out << "wrote " << (cfg.out_dir / "dataset.csv").string() << " (" << data.split.train.size() << " train, "
      << data.split.test.size() << " test)\n";
  return kSuccess;
}

int cmd_train(const Flags& f, std::ostream& out) {
  const ExperimentConfig cfg = to_config(f, true);
  const std::vector<RunResult> results = run_experiment(cfg);
  bool diverged = false;
  for (const RunResult& r : results) {
    const RunRecord& rec = r.record;
    out << std::left << std::setw(16) << run_name(r.variant, r.seed) << ' ' << std::setw(9)
        << to_string(rec.status) << " epochs " << std::setw(5) << rec.epochs.size() - 1 << " train "
        << shortest(rec.initial_train_loss()) << " -> " << shortest(rec.final_train_loss()) << "  test "
        << shortest(rec.final_test_loss()) << '\n';
    if (rec.status == RunStatus::diverged) {
      diverged = true;
      out << "  " << rec.diagnostic << '\n';
    }
  }
  out << "wrote " << results.size() << " runs under " << cfg.out_dir.string() << '\n';
  return diverged ? kDivergence : kSuccess;
}

int cmd_verify(std::uint64_t seed, std::ostream& out) {
  const std::vector<CheckResult> results = run_property_suite(seed);
  bool all = true;
  for (const CheckResult& r : results) {
    all = all && r.passed;
    out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(52) << r.name << " n=" << std::setw(7)
        << r.samples << " worst " << std::setw(12) << std::setprecision(3) << r.worst << " tol "
        << r.tolerance;
    if (!r.detail.empty()) out << "  (" << r.detail << ')';
    out << '\n';
  }
  out << (all ? "all checks passed\n" : "verification FAILED\n");
  return all ? kSuccess : kVerificationFailure;
}

struct OpFlags {
  std::vector<double> addiplicate;
  std::optional<double> exp_n;
  std::optional<double> psi;
  std::optional<double> psi_inv;
  double n = 0.0;
};

int cmd_eval_op(const OpFlags& f, std::ostream& out) {
  const int selected = !f.addiplicate.empty() + f.exp_n.has_value() + f.psi.has_value() + f.psi_inv.has_value();
  if (selected != 1) throw std::invalid_argument("eval-op needs exactly one of --addiplicate, --exp-n, --psi, --psi-inv");
  const IterationOrder n{f.n};
  if (!f.addiplicate.empty()) {
    const double x = f.addiplicate[0];
    const double y = f.addiplicate[1];
    const ExtendedReal v = addiplicate(x, y, n);
    const AddiplicationGradient g = addiplicate_gradient(x, y, n);
    out << "addiplicate(" << shortest(x) << ", " << shortest(y) << "; n=" << shortest(f.n)
        << ") = " << shortest(v.value) << (v.saturated ? " (saturated)" : "") << '\n';
    out << "d/dx = " << shortest(g.d_x) << '\n' << "d/dy = " << shortest(g.d_y) << '\n'
        << "d/dn = " << shortest(g.d_n) << '\n';
  } else if (f.exp_n) {
    const double x = *f.exp_n;
    const ExtendedReal v = exp_n(n, x);
    out << "exp_n(n=" << shortest(f.n) << ", x=" << shortest(x) << ") = " << shortest(v.value)
        << (v.saturated ? " (saturated)" : "") << '\n';
    out << "d/dn = " << shortest(exp_n_dn(n, x).value) << '\n'
        << "d/dx = " << shortest(exp_n_dx(n, x).value) << '\n';
  } else if (f.psi) {
    out << "psi(" << shortest(*f.psi) << ") = " << shortest(psi(*f.psi)) << " (k = " << branch_index(*f.psi)
        << ")\n"
        << "psi'(x) = " << shortest(psi_prime(*f.psi)) << '\n';
  } else {
    const ExtendedReal v = psi_inv(*f.psi_inv);
    out << "psi_inv(" << shortest(*f.psi_inv) << ") = " << shortest(v.value) << (v.saturated ? " (saturated)" : "")
        << '\n';
    if (*f.psi_inv > -1.0) out << "psi_inv'(y) = " << shortest(psi_inv_prime(*f.psi_inv).value) << '\n';
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-integer iterates of exp and the addiplication operator"};
  app.name("addi");
  app.require_subcommand(1);

  Flags data_flags;
  CLI::App* gen = app.add_subcommand("gen-data", "sample a multinomial and write the train/test split");
  gen->add_option("--seed,--data-seed", data_flags.data_seed, "dataset seed")->capture_default_str();
  add_data_flags(*gen, data_flags);

  Flags train_flags;
  CLI::App* tr = app.add_subcommand("train", "train network variants and write run artifacts");
  tr->add_option("--variant", train_flags.variant, "tanh, expn, logexp or all")
      ->check(CLI::IsMember({"tanh", "expn", "logexp", "all"}))
      ->capture_default_str();
  CLI::Option* seed_opt = tr->add_option("--seed", train_flags.seed, "init seed")->capture_default_str();
  tr->add_option("--seeds", train_flags.seeds, "init seeds: a..b or a,b,c")->excludes(seed_opt);
  tr->add_option("--data-seed", train_flags.data_seed, "dataset seed")->capture_default_str();
  tr->add_option("--epochs", train_flags.epochs, "full-batch epochs")->capture_default_str();
  tr->add_option("--lr", train_flags.lr, "Adam learning rate")->capture_default_str();
  tr->add_option("--hidden", train_flags.hidden, "hidden layer sizes a,b")->delimiter(',');
  tr->add_option("--grid", train_flags.grid, "relative-error grid resolution per axis")->capture_default_str();
  tr->add_option("--threads", train_flags.threads, "parallel runs (0 = all cores)")->capture_default_str();
  tr->add_flag("--no-bias", train_flags.no_bias, "drop bias terms");
  add_data_flags(*tr, train_flags);

  std::uint64_t verify_seed = 0;
  CLI::App* ver = app.add_subcommand("verify", "run the property suite");
  ver->add_option("--seed", verify_seed, "sampling seed")->capture_default_str();

  OpFlags op;
  CLI::App* ev = app.add_subcommand("eval-op", "evaluate exp_n, addiplicate, psi or psi_inv");
  ev->add_option("--addiplicate", op.addiplicate, "x y")->expected(2);
  ev->add_option("--exp-n", op.exp_n, "x");
  ev->add_option("--psi", op.psi, "x");
  ev->add_option("--psi-inv", op.psi_inv, "y");
  ev->add_option("--n", op.n, "iteration order")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (*gen) return cmd_gen_data(data_flags, out);
    if (*tr) return cmd_train(train_flags, out);
    if (*ver) return cmd_verify(verify_seed, out);
    return cmd_eval_op(op, out);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace addi::cli
