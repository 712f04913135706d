// Acceptance gate.  Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.  Criteria 8-10 train 15 networks twice at default
// settings and take several minutes.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "abel_golden.hpp"
#include "addiplication/abel.hpp"
#include "addiplication/experiment.hpp"
#include "addiplication/network.hpp"
#include "addiplication/training.hpp"
#include "addiplication/transfer.hpp"
#include "reference_abel.hpp"

namespace {

using namespace addi;
namespace ref = addi::reference;
using Clock = std::chrono::steady_clock;

constexpr double kE = std::numbers::e;
constexpr double kInf = std::numeric_limits<double>::infinity();

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double max_rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

bool near_integer(double v, double margin) { return std::abs(v - std::round(v)) < margin; }

bool near_boundary(double x) {
  for (double s : {0.0, 1.0, kE, std::exp(kE)}) {
    if (std::abs(x - s) < 1e-3) return true;
  }
  return near_integer(psi(x), 1e-3);
}

void criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> xs(-5.0, 2.5);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = xs(rng);
    worst = std::max(worst, std::abs(psi(std::exp(x)) - psi(x) - 1.0));
  }
  const double t = seconds_since(t0);
  report(1, worst < 1e-9 && t < 1.0,
         "Abel identity worst " + fmt("%.3g", worst) + " (tol 1e-9), " + fmt("%.3f", t) + " s (limit 1 s)");
}

void criterion2() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> small(-10.0, 10.0);
  std::uniform_real_distribution<double> log_large(0.0, 6.0);
  double worst_x = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = i % 2 == 0 ? small(rng) : std::pow(10.0, log_large(rng));
    const ExtendedReal back = psi_inv(psi(x));
    worst_x = std::max(worst_x, back.is_finite() ? max_rel(back.value, x) : kInf);
  }
  // Above psi(DBL_MAX) = 4.632 no double has that psi; +inf is the only answer.
  const double top = static_cast<double>(ref::psi(std::numeric_limits<double>::max()));
  std::uniform_real_distribution<double> ys(std::nextafter(-1.0, 0.0), 6.0);
  double worst_y = 0.0;
  int above = 0;
  bool ceiling_ok = true;
  for (int i = 0; i < 10000; ++i) {
    const double y = ys(rng);
    const ExtendedReal x = psi_inv(y);
    if (y > top) {
      ++above;
      ceiling_ok = ceiling_ok && x.is_positive_infinity();
      continue;
    }
    worst_y = std::max(worst_y, x.is_finite() ? std::abs(psi(x.value) - y) : kInf);
  }
  bool mono = true;
  double prev = -1.0;
  for (int i = 0; i < 10000; ++i) {
    const double v = psi(-10.0 + 1e6 * std::pow(i / 9999.0, 4.0));
    mono = mono && v > prev;
    prev = v;
  }
  double prev_inv = -kInf;
  for (int i = 1; i <= 10000; ++i) {
    const ExtendedReal v = psi_inv(-1.0 + 7.0 * i / 10000.0);
    if (v.is_positive_infinity()) break;
    mono = mono && v.value > prev_inv;
    prev_inv = v.value;
  }
  report(2, worst_x < 1e-9 && worst_y < 1e-9 && ceiling_ok && mono,
         "psi_inv(psi(x)) worst " + fmt("%.3g", worst_x) + ", psi(psi_inv(y)) worst " + fmt("%.3g", worst_y) +
             " (tol 1e-9); " + std::to_string(above) + " y above psi(DBL_MAX) saturate to +inf: " +
             (ceiling_ok ? "yes" : "no") + "; monotone: " + (mono ? "yes" : "no"));
}

void criterion3() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> orders(-1.0, 1.0);
  std::uniform_real_distribution<double> xs(-5.0, 20.0);
  double worst = 0.0;
  int n = 0;
  while (n < 10000) {
    const double a = orders(rng);
    const double b = orders(rng);
    const double x = xs(rng);
    const double p = static_cast<double>(ref::psi(x));
    if (p + b < -0.999 || p + a + b < -0.999 || p + b > 4.5 || p + a + b > 4.5) continue;
    const ExtendedReal lhs = exp_n(IterationOrder{a}, exp_n(IterationOrder{b}, x));
    const ExtendedReal rhs = exp_n(IterationOrder{a + b}, x);
    worst = std::max(worst, lhs.is_finite() && rhs.is_finite() ? max_rel(lhs.value, rhs.value) : kInf);
    ++n;
  }
  double worst_half = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = -2.0 + 4.0 * i / 10000.0;
    const double twice = exp_n(IterationOrder{0.5}, exp_n(IterationOrder{0.5}, x)).value;
    worst_half = std::max(worst_half, std::abs(twice - std::exp(x)) / std::exp(x));
  }
  report(3, worst < 1e-6 && worst_half < 1e-6,
         "semigroup worst " + fmt("%.3g", worst) + ", half-iterate worst " + fmt("%.3g", worst_half) +
             " (tol 1e-6)");
}

// Long-double transfer composition used as the finite-difference oracle.
ref::real ref_transfer(ref::real t, ref::real m, ref::real n, Nonlinearity nl) {
  ref::real u = ref::exp_n(m, t);
  if (nl == Nonlinearity::tanh) u = std::tanh(u);
  if (nl == Nonlinearity::sigmoid) u = 1 / (1 + std::exp(-u));
  return ref::exp_n(n, u);
}

double network_loss(const Network& net, const std::vector<LabeledPoint>& batch) {
  double sum = 0.0;
  int used = 0;
  for (const LabeledPoint& p : batch) {
    const SampleTrace t = net.forward_sample(std::vector<double>{p.x1, p.x2});
    if (!t.output.is_finite()) continue;
    sum += (t.output.value - p.target) * (t.output.value - p.target);
    ++used;
  }
  return sum / used;
}

double network_gradient_error(Variant v, std::uint64_t seed) {
  NetworkConfig nc;
  nc.variant = v;
  nc.seed = seed;
  Network net(nc);
  std::mt19937_64 rng(seed + 1000);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  const Multinomial poly = sample_multinomial(seed);
  std::vector<LabeledPoint> batch;
  for (int i = 0; i < 8; ++i) {
    const double x1 = unit(rng);
    const double x2 = unit(rng);
    batch.push_back({x1, x2, eval_multinomial(poly, x1, x2)});
  }
  std::vector<SampleTrace> traces;
  std::vector<double> upstream;
  for (const LabeledPoint& p : batch) traces.push_back(net.forward_sample(std::vector<double>{p.x1, p.x2}));
  int used = 0;
  for (const SampleTrace& t : traces) used += t.output.is_finite() ? 1 : 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    upstream.push_back(traces[i].output.is_finite() ? 2.0 * (traces[i].output.value - batch[i].target) / used : 0.0);
  }
  const Gradients g = net.backward(traces, upstream);
  auto groups = net.parameters();
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    for (std::size_t i = 0; i < groups[k].values.size(); ++i) {
      if (!groups[k].trainable) {
        if (g[k][i] != 0.0) worst = kInf;
        continue;
      }
      const double saved = groups[k].values[i];
      groups[k].values[i] = saved + h;
      const double up = network_loss(net, batch);
      groups[k].values[i] = saved - h;
      const double down = network_loss(net, batch);
      groups[k].values[i] = saved;
      const double fd = (up - down) / (2 * h);
      // Absolute floor for parameters whose true gradient is ~0.
      worst = std::max(worst, std::abs(g[k][i] - fd) / std::max(std::abs(fd), 1e-5));
    }
  }
  return worst;
}

void criterion4() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(104);
  const ref::real h = 1e-6L;
  const auto rel = [](double a, long double b) { return static_cast<double>(std::abs(a - b) / std::abs(b)); };
  double worst_abel = 0.0;
  {
    std::uniform_real_distribution<double> xs(-3.0, 20.0);
    std::uniform_real_distribution<double> ys(-0.9, 4.0);
    std::uniform_real_distribution<double> orders(-1.0, 1.0);
    int n = 0;
    while (n < 5000) {
      const double x = xs(rng);
      const double y = ys(rng);
      const double order = orders(rng);
      const double target = psi(x) + order;
      if (near_boundary(x) || near_integer(y, 1e-3) || near_integer(target, 1e-3)) continue;
      if (target < -0.9 || target > 4.0) continue;
      worst_abel = std::max(worst_abel, rel(psi_prime(x), ref::central_difference(ref::psi, x, h)));
      worst_abel = std::max(worst_abel, rel(psi_inv_prime(y).value, ref::central_difference(ref::psi_inv, y, h)));
      const auto in_x = [order](ref::real v) { return ref::exp_n(order, v); };
      const auto in_n = [x](ref::real v) { return ref::exp_n(v, x); };
      worst_abel = std::max(worst_abel, rel(exp_n_dx(IterationOrder{order}, x).value, ref::central_difference(in_x, x, h)));
      worst_abel = std::max(worst_abel, rel(exp_n_dn(IterationOrder{order}, x).value, ref::central_difference(in_n, order, h)));
      ++n;
    }
  }
  double worst_transfer = 0.0;
  {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Nonlinearity nl : {Nonlinearity::identity, Nonlinearity::tanh, Nonlinearity::sigmoid}) {
      int n = 0;
      while (n < 1000) {
        const double t = dist(rng);
        const double m = dist(rng);
        const double nn = dist(rng);
        const TransferResult r = transfer_forward(t, {IterationOrder{m}, IterationOrder{nn}}, nl);
        if (r.cache.saturated()) continue;
        const double s = r.cache.s.value;
        if (near_boundary(t) || near_boundary(s) || near_integer(psi(t) + m, 1e-3) || near_integer(psi(s) + nn, 1e-3)) continue;
        if (psi(t) + m < -0.9 || psi(s) + nn < -0.9) continue;
        const TransferGradient g = transfer_backward(r.cache, 1.0);
        const auto fd_t = ref::central_difference([&](ref::real v) { return ref_transfer(v, m, nn, nl); }, t, h);
        const auto fd_m = ref::central_difference([&](ref::real v) { return ref_transfer(t, v, nn, nl); }, m, h);
        const auto fd_n = ref::central_difference([&](ref::real v) { return ref_transfer(t, m, v, nl); }, nn, h);
        const auto r8 = [](double a, long double b) {
          return static_cast<double>(std::abs(a - b) / std::max(std::abs(b), 1e-8L));
        };
        worst_transfer = std::max({worst_transfer, r8(g.d_t, fd_t), r8(g.d_m, fd_m), r8(g.d_n, fd_n)});
        ++n;
      }
    }
  }
  double worst_net = 0.0;
  for (Variant v : {Variant::tanh, Variant::trainable_exp_n, Variant::fixed_log_exp}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) worst_net = std::max(worst_net, network_gradient_error(v, seed));
  }
  const double t = seconds_since(t0);
  report(4, worst_abel < 1e-5 && worst_transfer < 1e-5 && worst_net < 1e-4 && t < 30.0,
         "abel derivatives worst " + fmt("%.3g", worst_abel) + ", transfer worst " + fmt("%.3g", worst_transfer) +
             " (tol 1e-5), network worst " + fmt("%.3g", worst_net) + " (tol 1e-4), " + fmt("%.2f", t) +
             " s (limit 30 s)");
}

void criterion5() {
  double worst = 0.0;
  for (double x0 : {0.0, 1.0, kE, std::exp(kE)}) {
    const double h = 1e-7 * std::max(1.0, x0);
    const double left = (psi(x0) - psi(x0 - h)) / h;
    const double right = (psi(x0 + h) - psi(x0)) / h;
    worst = std::max(worst, std::abs(left - right));
  }
  report(5, worst < 1e-6, "one-sided slope mismatch worst " + fmt("%.3g", worst) + " (tol 1e-6)");
}

void criterion6() {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> any(-5.0, 5.0);
  std::uniform_real_distribution<double> positive(1e-3, 10.0);
  std::uniform_real_distribution<double> orders(-1.5, 1.5);
  double worst_add = 0.0;
  double worst_mul = 0.0;
  bool commutative = true;
  for (int i = 0; i < 10000; ++i) {
    const double x = any(rng);
    const double y = any(rng);
    worst_add = std::max(worst_add, max_rel(addiplicate(x, y, IterationOrder{0.0}).value, x + y));
    const double px = positive(rng);
    const double py = positive(rng);
    worst_mul = std::max(worst_mul, std::abs(addiplicate(px, py, IterationOrder{1.0}).value - px * py) / (px * py));
    const IterationOrder n{orders(rng)};
    commutative = commutative && std::bit_cast<std::uint64_t>(addiplicate(x, y, n).value) ==
                                     std::bit_cast<std::uint64_t>(addiplicate(y, x, n).value);
  }
  const double half = addiplicate(2.0, 3.0, IterationOrder{0.5}).value;
  const double half_err = std::abs(half - golden::kAddiplicate_2_3_half);
  report(6, worst_add < 1e-9 && worst_mul < 1e-9 && commutative && half_err < 1e-3,
         "n=0 worst " + fmt("%.3g", worst_add) + ", n=1 worst " + fmt("%.3g", worst_mul) +
             " (tol 1e-9), commutative: " + (commutative ? "bit-exact" : "no") + ", 2 (+)_0.5 3 = " +
             fmt("%.12g", half) + " vs oracle " + fmt("%.12g", golden::kAddiplicate_2_3_half));
}

void criterion7() {
  NetworkConfig nc;
  nc.variant = Variant::fixed_log_exp;
  nc.hidden = {2, 1};
  Network net(nc);
  auto& L = net.layers();
  L[0].weights = {1, 0, 0, 1};
  L[0].bias = {0, 0};
  L[1].weights = {1, 1};
  L[1].bias = {0};
  L[2].weights = {1};
  L[2].bias = {0};
  double worst = 0.0;
  for (int i = 1; i <= 100; ++i) {
    for (int j = 1; j <= 100; ++j) {
      const double x1 = i / 100.0;
      const double x2 = j / 100.0;
      const SampleTrace t = net.forward_sample(std::vector<double>{x1, x2});
      worst = std::max(worst, t.output.is_finite() ? std::abs(t.output.value - x1 * x2) : kInf);
    }
  }
  report(7, worst < 1e-9, "|net(x1,x2) - x1*x2| worst " + fmt("%.3g", worst) + " on (0,1]^2 (tol 1e-9)");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criteria8to10() {
  const std::filesystem::path root = std::filesystem::temp_directory_path() / "addi_acceptance";
  std::filesystem::remove_all(root);
  ExperimentConfig cfg;
  cfg.seeds = {0, 1, 2, 3, 4};
  cfg.data_seed = 0;
  cfg.threads = 0;

  cfg.out_dir = root / "first";
  auto t0 = Clock::now();
  const std::vector<RunResult> runs = run_experiment(cfg);
  const double t_first = seconds_since(t0);

  std::string ratios;
  bool all_learn = true;
  std::vector<double> tanh_test;
  std::vector<double> expn_test;
  bool n_grows = true;
  std::string n_detail;
  for (const RunResult& r : runs) {
    const RunRecord& rec = r.record;
    const double ratio = rec.final_train_loss() / rec.initial_train_loss();
    const bool learned = rec.status != RunStatus::diverged && ratio < 0.1;
    all_learn = all_learn && learned;
    if (!learned) {
      ratios += " " + run_name(r.variant, r.seed) + "=" +
                (rec.status == RunStatus::diverged ? std::string("diverged") : fmt("%.3g", ratio));
    }
    if (r.variant == Variant::tanh) tanh_test.push_back(rec.final_test_loss());
    if (r.variant == Variant::trainable_exp_n) {
      expn_test.push_back(rec.final_test_loss());
      n_grows = n_grows && rec.final_transfer.mean_abs_n > rec.initial_transfer.mean_abs_n;
      n_detail += " " + fmt("%.3g", rec.initial_transfer.mean_abs_n) + "->" + fmt("%.3g", rec.final_transfer.mean_abs_n);
    }
  }
  const double med_tanh = median(tanh_test);
  const double med_expn = median(expn_test);
  report(8, all_learn && med_expn <= med_tanh && t_first < 600.0,
         "final/initial train loss < 0.1 for all 15 runs: " + std::string(all_learn ? "yes" : "no, failing:" + ratios) +
             "; median test MSE expn " + fmt("%.4g", med_expn) + " vs tanh " + fmt("%.4g", med_tanh) + "; " +
             fmt("%.0f", t_first) + " s (target 600 s)");
  report(9, n_grows, "expn mean |n| init->final per seed:" + n_detail);

  cfg.out_dir = root / "second";
  run_experiment(cfg);
  std::size_t identical = 0;
  for (const RunResult& r : runs) {
    const auto name = run_name(r.variant, r.seed);
    const std::string a = slurp(root / "first" / name / "losses.csv");
    identical += !a.empty() && a == slurp(root / "second" / name / "losses.csv") ? 1 : 0;
  }
  report(10, identical == runs.size(),
         std::to_string(identical) + "/" + std::to_string(runs.size()) + " losses.csv files byte-identical on rerun");
  std::filesystem::remove_all(root);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criteria8to10();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
