#include "addiplication/transfer.hpp"

#include <stdexcept>

namespace addi {

std::string_view to_string(Nonlinearity nl) {
  switch (nl) {
    case Nonlinearity::identity:
      return "identity";
    case Nonlinearity::tanh:
      return "tanh";
    case Nonlinearity::sigmoid:
      return "sigmoid";
  }
  return "unknown";
}

ExtendedReal apply_nonlinearity(Nonlinearity nl, ExtendedReal u) {
  switch (nl) {
    case Nonlinearity::identity:
      return u;
    case Nonlinearity::tanh:
      return {std::tanh(u.value), u.saturated};
    case Nonlinearity::sigmoid:
      return {1.0 / (1.0 + std::exp(-u.value)), u.saturated};
  }
  return u;
}

double nonlinearity_derivative(Nonlinearity nl, double u) {
  switch (nl) {
    case Nonlinearity::identity:
      return 1.0;
    case Nonlinearity::tanh: {
      const double th = std::tanh(u);
      return 1.0 - th * th;
    }
    case Nonlinearity::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-u));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

TransferResult transfer_forward(double t, TransferParams p, Nonlinearity nl) {
  if (!std::isfinite(t)) throw std::domain_error("transfer_forward: t must be finite");
  return transfer_forward(ExtendedReal::finite(t), p, nl);
}

TransferResult transfer_forward(ExtendedReal t, TransferParams p, Nonlinearity nl) {
  TransferCache cache;
  cache.t = t;
  cache.params = p;
  cache.nonlinearity = nl;
  cache.u = exp_n(p.m, t);
  cache.s = apply_nonlinearity(nl, cache.u);
  cache.output = exp_n(p.n, cache.s);
  return {cache.output, cache};
}

TransferGradient transfer_backward(const TransferCache& cache, double upstream, bool with_params) {
  if (cache.saturated() || upstream == 0.0) return {};
  const Derivative outer_dx = exp_n_dx(cache.params.n, cache.s.value);
  const Derivative inner_dx = exp_n_dx(cache.params.m, cache.t.value);
  const Derivative outer_dn = with_params ? exp_n_dn(cache.params.n, cache.s.value) : Derivative{};
  const Derivative inner_dn = with_params ? exp_n_dn(cache.params.m, cache.t.value) : Derivative{};
  if (outer_dx.saturated || outer_dn.saturated || inner_dx.saturated || inner_dn.saturated) {
    return {};
  }
  const double through_u =
      upstream * outer_dx.value * nonlinearity_derivative(cache.nonlinearity, cache.u.value);
  return {through_u * inner_dx.value, through_u * inner_dn.value, upstream * outer_dn.value};
}

}  // namespace addi
