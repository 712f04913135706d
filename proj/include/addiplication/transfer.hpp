#pragma once

// Per-neuron transfer function that moves continuously between additive and
// multiplicative behaviour:
//
//     sigma_{m,n}(t) = exp^(n)( sigma_std( exp^(m)(t) ) )
//
// A neuron with n = -1 feeding a neuron with m = +1 multiplies; n = 0 = m adds.

#include <string_view>

#include "addiplication/abel.hpp"

namespace addi {

enum class Nonlinearity { identity, tanh, sigmoid };

std::string_view to_string(Nonlinearity nl);

struct TransferParams {
  IterationOrder m;
  IterationOrder n;
};

/// Everything backward needs.  saturated() means some stage of this neuron's
/// chain is infinite, in which case the gradient triple is zero.  The sticky
/// flags on the stored values may also carry saturation from upstream.
struct TransferCache {
  ExtendedReal t;
  ExtendedReal u;       // exp^(m)(t)
  ExtendedReal s;       // sigma_std(u)
  ExtendedReal output;  // exp^(n)(s)
  TransferParams params;
  Nonlinearity nonlinearity = Nonlinearity::identity;

  bool saturated() const {
    return !t.is_finite() || !u.is_finite() || !s.is_finite() || !output.is_finite();
  }
};

struct TransferResult {
  ExtendedReal value;
  TransferCache cache;
};

struct TransferGradient {
  double d_t = 0.0;
  double d_m = 0.0;
  double d_n = 0.0;
};

ExtendedReal apply_nonlinearity(Nonlinearity nl, ExtendedReal u);
double nonlinearity_derivative(Nonlinearity nl, double u);

TransferResult transfer_forward(double t, TransferParams p, Nonlinearity nl);
TransferResult transfer_forward(ExtendedReal t, TransferParams p, Nonlinearity nl);

/// With `with_params` false only d_t is computed (frozen m, n).
TransferGradient transfer_backward(const TransferCache& cache, double upstream, bool with_params = true);

}  // namespace addi
