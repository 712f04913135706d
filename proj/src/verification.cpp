#include "addiplication/verification.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "addiplication/abel.hpp"
#include "addiplication/dataset.hpp"
#include "addiplication/gradcheck.hpp"
#include "addiplication/network.hpp"
#include "addiplication/transfer.hpp"

namespace addi {
namespace {

constexpr double kE = std::numbers::e;
constexpr double kMargin = 1e-3;
constexpr double kStep = 1e-6;

double rel_to_one(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

bool near_integer(double v) { return std::abs(v - std::round(v)) < kMargin; }

bool near_seam(double x) {
  for (double s : {0.0, 1.0, kE, std::exp(kE)}) {
    if (std::abs(x - s) < kMargin) return true;
  }
  return near_integer(psi(x));
}

struct Accumulator {
  CheckResult r;
  Accumulator(std::string name, double tolerance) {
    r.name = std::move(name);
    r.tolerance = tolerance;
  }
  void add(double err) {
    ++r.samples;
    if (!(err <= r.worst)) r.worst = err;
  }
  CheckResult finish() {
    r.passed = r.samples > 0 && r.worst < r.tolerance;
    return r;
  }
};

CheckResult abel_identity(std::mt19937_64& rng) {
  Accumulator acc("abel identity psi(exp x) - psi(x) = 1", 1e-9);
  std::uniform_real_distribution<double> xs(-5.0, 2.5);
  for (int i = 0; i < 10000; ++i) {
    const double x = xs(rng);
    acc.add(std::abs(psi(std::exp(x)) - psi(x) - 1.0));
  }
  return acc.finish();
}

CheckResult round_trip_x(std::mt19937_64& rng) {
  Accumulator acc("round trip psi_inv(psi(x)) = x", 1e-9);
  std::uniform_real_distribution<double> small(-10.0, 10.0);
  std::uniform_real_distribution<double> log_large(0.0, 6.0);
  for (int i = 0; i < 10000; ++i) {
    const double x = i % 2 == 0 ? small(rng) : std::pow(10.0, log_large(rng));
    const ExtendedReal back = psi_inv(psi(x));
    acc.add(back.is_finite() ? rel_to_one(back.value, x) : std::numeric_limits<double>::infinity());
  }
  return acc.finish();
}

CheckResult round_trip_y(std::mt19937_64& rng) {
  Accumulator acc("round trip psi(psi_inv(y)) = y", 1e-9);
  std::uniform_real_distribution<double> ys(-1.0, 6.0);
  const double top = psi(std::numeric_limits<double>::max());
  std::size_t saturated = 0;
  for (int i = 0; i < 10000; ++i) {
    const double y = ys(rng);
    if (y <= -1.0) continue;
    const ExtendedReal x = psi_inv(y);
    if (y > top) {
      ++saturated;
      acc.add(x.is_positive_infinity() ? 0.0 : std::numeric_limits<double>::infinity());
      continue;
    }
    acc.add(x.is_finite() ? std::abs(psi(x.value) - y) : std::numeric_limits<double>::infinity());
  }
  acc.r.detail = std::to_string(saturated) + " samples above psi(DBL_MAX) checked for +inf";
  return acc.finish();
}

CheckResult monotonicity() {
  Accumulator acc("psi and psi_inv strictly increasing", 0.5);
  double previous = -1.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = -10.0 + 20.0 * i / 9999.0;
    const double p = psi(x);
    acc.add(p > previous ? 0.0 : 1.0);
    previous = p;
  }
  double previous_inv = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 10000; ++i) {
    const ExtendedReal v = psi_inv(-1.0 + 5.6 * i / 10000.0);
    if (v.is_positive_infinity()) continue;
    acc.add(v.value > previous_inv ? 0.0 : 1.0);
    previous_inv = v.value;
  }
  return acc.finish();
}

CheckResult semigroup(std::mt19937_64& rng) {
  Accumulator acc("semigroup exp^(a) o exp^(b) = exp^(a+b)", 1e-6);
  std::uniform_real_distribution<double> orders(-1.0, 1.0);
  std::uniform_real_distribution<double> xs(-5.0, 20.0);
  while (acc.r.samples < 10000) {
    const double a = orders(rng);
    const double b = orders(rng);
    const double x = xs(rng);
    const double p = psi(x);
    if (p + b < -0.999 || p + a + b < -0.999 || p + b > 4.5 || p + a + b > 4.5) continue;
    const ExtendedReal composed = exp_n(IterationOrder{a}, exp_n(IterationOrder{b}, x));
    const ExtendedReal direct = exp_n(IterationOrder{a + b}, x);
    acc.add(composed.is_finite() && direct.is_finite() ? rel_to_one(composed.value, direct.value)
                                                       : std::numeric_limits<double>::infinity());
  }
  return acc.finish();
}

CheckResult half_iterate() {
  Accumulator acc("half iterate squares to exp on [-2, 2]", 1e-6);
  const IterationOrder half{0.5};
  for (int i = 0; i <= 10000; ++i) {
    const double x = -2.0 + 4.0 * i / 10000.0;
    acc.add(rel(exp_n(half, exp_n(half, x).value).value, std::exp(x)));
  }
  return acc.finish();
}

CheckResult c1_continuity() {
  Accumulator acc("psi C1 at 0, 1, e, e^e", 1e-6);
  for (double x0 : {0.0, 1.0, kE, std::exp(kE)}) {
    const double delta = 1e-9 * std::max(1.0, x0);
    acc.add(std::abs(psi_prime(x0 - delta) - psi_prime(x0 + delta)));
    const double h = 1e-7;
    acc.add(std::abs((psi(x0) - psi(x0 - h)) / h - (psi(x0 + h) - psi(x0)) / h));
  }
  return acc.finish();
}

CheckResult inverse_function_theorem(std::mt19937_64& rng) {
  Accumulator acc("psi_inv_prime * psi_prime(psi_inv) = 1", 1e-9);
  std::uniform_real_distribution<double> ys(-0.99, 5.0);
  std::size_t clamped = 0;
  for (int i = 0; i < 10000; ++i) {
    const double y = ys(rng);
    const Derivative d = psi_inv_prime(y);
    if (d.saturated) {
      ++clamped;
      continue;
    }
    acc.add(std::abs(d.value * psi_prime(psi_inv(y).value) - 1.0));
  }
  acc.r.detail = std::to_string(clamped) + " clamped samples near the overflow ceiling skipped";
  return acc.finish();
}

CheckResult derivative_fidelity(std::mt19937_64& rng) {
  Accumulator acc("psi', psi_inv', d/dx, d/dn vs finite differences", 1e-5);
  std::uniform_real_distribution<double> orders(-1.0, 1.0);
  std::uniform_real_distribution<double> xs(-3.0, 20.0);
  std::uniform_real_distribution<double> ys(-0.9, 4.0);
  const auto fd = [](const std::function<double(double)>& f, double v) {
    return (f(v + kStep) - f(v - kStep)) / (2 * kStep);
  };
  int done = 0;
  while (done < 2000) {
    const double x = xs(rng);
    if (near_seam(x)) continue;
    acc.add(rel(psi_prime(x), fd([](double v) { return psi(v); }, x)));
    const double y = ys(rng);
    if (!near_integer(y)) {
      acc.add(rel(psi_inv_prime(y).value, fd([](double v) { return psi_inv(v).value; }, y)));
    }
    const double n = orders(rng);
    const double target = psi(x) + n;
    if (target < -0.9 || target > 4.0 || near_integer(target)) continue;
    const IterationOrder order{n};
    acc.add(rel(exp_n_dx(order, x).value, fd([order](double v) { return exp_n(order, v).value; }, x)));
    acc.add(rel(exp_n_dn(order, x).value,
                fd([x](double v) { return exp_n(IterationOrder{v}, x).value; }, n)));
    ++done;
  }
  return acc.finish();
}

CheckResult transfer_gradients(std::mt19937_64& rng) {
  Accumulator acc("transfer backward (t, m, n) vs finite differences", 1e-5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (Nonlinearity nl : {Nonlinearity::identity, Nonlinearity::tanh, Nonlinearity::sigmoid}) {
    const auto value = [nl](double t, double m, double n) {
      return transfer_forward(t, {IterationOrder{m}, IterationOrder{n}}, nl).value.value;
    };
    int done = 0;
    while (done < 1000) {
      const double t = dist(rng);
      const double m = dist(rng);
      const double n = dist(rng);
      const TransferResult r = transfer_forward(t, {IterationOrder{m}, IterationOrder{n}}, nl);
      if (r.cache.saturated()) continue;
      const double s = r.cache.s.value;
      if (near_seam(t) || near_integer(psi(t) + m) || near_seam(s) || near_integer(psi(s) + n)) continue;
      if (psi(t) + m < -0.9 || psi(s) + n < -0.9) continue;
      const TransferGradient g = transfer_backward(r.cache, 1.0);
      const auto fd_rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-8); };
      acc.add(fd_rel(g.d_t, (value(t + kStep, m, n) - value(t - kStep, m, n)) / (2 * kStep)));
      acc.add(fd_rel(g.d_m, (value(t, m + kStep, n) - value(t, m - kStep, n)) / (2 * kStep)));
      acc.add(fd_rel(g.d_n, (value(t, m, n + kStep) - value(t, m, n - kStep)) / (2 * kStep)));
      ++done;
    }
  }
  return acc.finish();
}

std::vector<LabeledPoint> small_batch(std::uint64_t seed) {
  const Multinomial poly = sample_multinomial(seed);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<LabeledPoint> batch;
  for (int i = 0; i < 5; ++i) {
    LabeledPoint p{unit(rng), unit(rng), 0.0};
    p.target = eval_multinomial(poly, p.x1, p.x2);
    batch.push_back(p);
  }
  return batch;
}

CheckResult network_gradients(Variant v, std::uint64_t seed) {
  Accumulator acc("network gradients, " + std::string(to_string(v)), 1e-4);
  std::size_t frozen_nonzero = 0;
  for (std::uint64_t s = seed; s < seed + 3; ++s) {
    NetworkConfig nc;
    nc.variant = v;
    nc.seed = s;
    const Network net(nc);
    const GradientCheckReport report = check_network_gradients(net, small_batch(s + 10));
    acc.r.samples += report.checked;
    acc.r.worst = std::max(acc.r.worst, report.max_rel_error);
    frozen_nonzero += report.frozen_nonzero;
  }
  CheckResult r = acc.finish();
  r.passed = r.passed && frozen_nonzero == 0;
  r.detail = std::to_string(frozen_nonzero) + " frozen parameters with nonzero gradient";
  return r;
}

CheckResult addiplication_laws(std::mt19937_64& rng) {
  Accumulator acc("addiplication n=0 sum, n=1 product, commutative", 1e-9);
  std::uniform_real_distribution<double> any(-5.0, 5.0);
  std::uniform_real_distribution<double> positive(1e-3, 10.0);
  std::uniform_real_distribution<double> orders(-1.5, 1.5);
  for (int i = 0; i < 10000; ++i) {
    const double x = any(rng);
    const double y = any(rng);
    acc.add(rel_to_one(addiplicate(x, y, IterationOrder{0.0}).value, x + y));
    const double px = positive(rng);
    const double py = positive(rng);
    acc.add(rel(addiplicate(px, py, IterationOrder{1.0}).value, px * py));
    const IterationOrder n{orders(rng)};
    const bool same = std::bit_cast<std::uint64_t>(addiplicate(px, y, n).value) ==
                      std::bit_cast<std::uint64_t>(addiplicate(y, px, n).value);
    acc.add(same ? 0.0 : 1.0);
  }
  return acc.finish();
}

CheckResult log_exp_monomial() {
  Accumulator acc("hand-wired log-exp net computes x1*x2", 1e-9);
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
  for (int i = 1; i <= 100; ++i) {
    for (int j = 1; j <= 100; ++j) {
      const double x1 = i / 100.0;
      const double x2 = j / 100.0;
      const SampleTrace t = net.forward_sample(std::vector<double>{x1, x2});
      acc.add(t.saturated ? std::numeric_limits<double>::infinity() : rel(t.output.value, x1 * x2));
    }
  }
  return acc.finish();
}

}  // namespace

std::vector<CheckResult> run_property_suite(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<CheckResult> out;
  out.push_back(abel_identity(rng));
  out.push_back(round_trip_x(rng));
  out.push_back(round_trip_y(rng));
  out.push_back(monotonicity());
  out.push_back(semigroup(rng));
  out.push_back(half_iterate());
  out.push_back(c1_continuity());
  out.push_back(inverse_function_theorem(rng));
  out.push_back(derivative_fidelity(rng));
  out.push_back(addiplication_laws(rng));
  out.push_back(transfer_gradients(rng));
  for (Variant v : {Variant::tanh, Variant::trainable_exp_n, Variant::fixed_log_exp}) {
    out.push_back(network_gradients(v, seed));
  }
  out.push_back(log_exp_monomial());
  return out;
}

}  // namespace addi
