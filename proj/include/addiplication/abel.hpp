#pragma once

// Non-integer iterates of the exponential function.
//
// psi is the continuously differentiable solution of Abel's equation
//
//     psi(exp(x)) = psi(x) + 1
//
// given piecewise by psi(x) = log^(k)(x) + k, where k is the number of
// logarithms needed to bring x into [0, 1) (k = -1 for x < 0).  With it the
// n-th iterate of exp is defined for every real n:
//
//     exp^(n)(x) = psi^-1(psi(x) + n)
//
// and the "addiplication" operator x (+)_n y = exp^(n)(exp^(-n)(x) + exp^(-n)(y))
// is addition at n = 0 and multiplication at n = 1.
//
// All functions are pure and thread-safe.  Non-finite plain `double`
// arguments raise std::domain_error; infinities that are part of the
// saturation model travel as ExtendedReal instead.

#include <cmath>
#include <limits>

namespace addi {

/// A real value that may have saturated to -inf/+inf.  `saturated` is sticky:
/// it stays set on values computed from a saturated operand even when the
/// result itself is finite again (e.g. exp^(1)(-inf) = 0).
struct ExtendedReal {
  double value = 0.0;
  bool saturated = false;

  static ExtendedReal finite(double v) { return {v, false}; }
  static ExtendedReal negative_infinity() {
    return {-std::numeric_limits<double>::infinity(), true};
  }
  static ExtendedReal positive_infinity() {
    return {std::numeric_limits<double>::infinity(), true};
  }

  bool is_finite() const { return std::isfinite(value); }
  bool is_negative_infinity() const { return value == -std::numeric_limits<double>::infinity(); }
  bool is_positive_infinity() const { return value == std::numeric_limits<double>::infinity(); }
};

/// A derivative value.  Always finite.  `saturated` marks either the zero
/// subgradient reported on a saturated plateau or a magnitude clamped to
/// the largest finite double.
struct Derivative {
  double value = 0.0;
  bool saturated = false;
};

/// Continuous iteration count n of exp^(n).  n = 0 is the identity, n = 1 is
/// exp and n = -1 is log.
struct IterationOrder {
  double value = 0.0;

  constexpr IterationOrder() = default;
  constexpr explicit IterationOrder(double n) : value(n) {}
  constexpr IterationOrder operator-() const { return IterationOrder{-value}; }
};

/// An argument of psi located on its branch: for x >= 0, `reduced` is
/// log^(k)(x) and lies in [0, 1); for x < 0, k = -1 and `reduced` is x.
struct BranchedValue {
  double x = 0.0;
  int k = 0;
  double reduced = 0.0;
};

/// Upper bound on the branch search.  No finite double needs more than 5.
inline constexpr int kMaxBranchIterations = 64;

BranchedValue locate_branch(double x);
int branch_index(double x);

double psi(double x);
ExtendedReal psi_inv(double y);
double psi_prime(double x);
Derivative psi_inv_prime(double y);

ExtendedReal exp_n(IterationOrder n, double x);
ExtendedReal exp_n(IterationOrder n, ExtendedReal x);

/// d exp^(n)(x) / dn = psi_inv_prime(psi(x) + n).  Zero on the -inf plateau
/// and wherever exp^(n)(x) saturates.
Derivative exp_n_dn(IterationOrder n, double x);
Derivative exp_n_dn(IterationOrder n, ExtendedReal x);

/// d exp^(n)(x) / dx = exp_n_dn(n, x) * psi_prime(x).
Derivative exp_n_dx(IterationOrder n, double x);
Derivative exp_n_dx(IterationOrder n, ExtendedReal x);

/// x (+)_n y.  Commutative bit-for-bit.  If an inner term exp^(-n)(x)
/// saturates it contributes its infinity to the sum and the result is
/// flagged saturated.  Opposite infinities raise std::domain_error.
ExtendedReal addiplicate(double x, double y, IterationOrder n);

struct AddiplicationGradient {
  double d_x = 0.0;
  double d_y = 0.0;
  double d_n = 0.0;
  bool saturated = false;
};

/// Partials of x (+)_n y.  All zero and flagged when any stage saturates.
AddiplicationGradient addiplicate_gradient(double x, double y, IterationOrder n);

/// Sum in the extended reals; opposite infinities raise std::domain_error.
ExtendedReal extended_add(ExtendedReal a, ExtendedReal b);

}  // namespace addi
