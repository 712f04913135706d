#include "addiplication/abel.hpp"

#include <stdexcept>
#include <string>

namespace addi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxFinite = std::numeric_limits<double>::max();

[[noreturn]] void throw_not_finite(const char* where) {
  throw std::domain_error(std::string(where) + ": argument must be finite");
}

inline void require_finite(double v, const char* where) {
  if (!std::isfinite(v)) [[unlikely]] throw_not_finite(where);
}

// Splits y >= 0 into its integer part k and fractional part y - k in [0, 1).
// The subtraction is exact for every double.
struct IntegerSplit {
  int k;
  double fraction;
};

IntegerSplit split_integer(double y) {
  const double k = std::floor(y);
  // Anything with k beyond the branch bound overflows long before it is used.
  const int ki = k > kMaxBranchIterations ? kMaxBranchIterations + 1 : static_cast<int>(k);
  return {ki, y - k};
}

Derivative clamp(double v) {
  if (std::isfinite(v)) return {v, false};
  return {kMaxFinite, true};
}

}  // namespace

BranchedValue locate_branch(double x) {
  require_finite(x, "locate_branch");
  if (x < 0.0) return {x, -1, x};
  double v = x;
  int k = 0;
  while (v >= 1.0) {
    if (k == kMaxBranchIterations) {
      throw std::domain_error("locate_branch: iterated logarithm did not terminate");
    }
    v = std::log(v);
    ++k;
  }
  return {x, k, v};
}

int branch_index(double x) { return locate_branch(x).k; }

double psi(double x) {
  const BranchedValue b = locate_branch(x);
  if (b.k < 0) return std::expm1(x);
  return b.reduced + b.k;
}

ExtendedReal psi_inv(double y) {
  require_finite(y, "psi_inv");
  if (y <= -1.0) return ExtendedReal::negative_infinity();
  if (y < 0.0) return ExtendedReal::finite(std::log1p(y));
  const auto [k, fraction] = split_integer(y);
  double v = fraction;
  for (int j = 0; j < k; ++j) {
    v = std::exp(v);
    if (!std::isfinite(v)) return ExtendedReal::positive_infinity();
  }
  return ExtendedReal::finite(v);
}

double psi_prime(double x) {
  const BranchedValue b = locate_branch(x);
  if (b.k < 0) return std::exp(x);
  // prod_{j=0}^{k-1} 1 / log^(j)(x)
  double product = 1.0;
  double v = x;
  for (int j = 0; j < b.k; ++j) {
    product /= v;
    v = std::log(v);
  }
  return product;
}

Derivative psi_inv_prime(double y) {
  require_finite(y, "psi_inv_prime");
  if (y <= -1.0) {
    throw std::domain_error("psi_inv_prime: undefined on the -inf plateau y <= -1");
  }
  if (y < 0.0) return clamp(1.0 / (1.0 + y));
  // prod_{j=0}^{k-1} psi^-1(y - j).  psi^-1(y - j) = exp^(k-j)(y - k), so the
  // factors are the iterates exp^(1..k) of the fractional part.
  const auto [k, fraction] = split_integer(y);
  double iterate = fraction;
  double product = 1.0;
  for (int j = 0; j < k; ++j) {
    iterate = std::exp(iterate);
    product *= iterate;
    if (!std::isfinite(product)) return {kMaxFinite, true};
  }
  return {product, false};
}

ExtendedReal exp_n(IterationOrder n, double x) {
  require_finite(n.value, "exp_n");
  require_finite(x, "exp_n");
  // The integer orders are evaluated directly so that they are exact.
  if (n.value == 0.0) return ExtendedReal::finite(x);
  if (n.value == 1.0) {
    const double v = std::exp(x);
    return std::isfinite(v) ? ExtendedReal::finite(v) : ExtendedReal::positive_infinity();
  }
  if (n.value == -1.0) {
    return x > 0.0 ? ExtendedReal::finite(std::log(x)) : ExtendedReal::negative_infinity();
  }
  return psi_inv(psi(x) + n.value);
}

ExtendedReal exp_n(IterationOrder n, ExtendedReal x) {
  require_finite(n.value, "exp_n");
  if (x.is_positive_infinity()) return ExtendedReal::positive_infinity();
  // psi(-inf) = -1 in the limit.
  ExtendedReal out = x.is_negative_infinity() ? psi_inv(n.value - 1.0) : exp_n(n, x.value);
  out.saturated = out.saturated || x.saturated;
  return out;
}

Derivative exp_n_dn(IterationOrder n, double x) {
  require_finite(n.value, "exp_n_dn");
  const double y = psi(x) + n.value;
  if (y <= -1.0) return {0.0, true};
  if (!psi_inv(y).is_finite()) return {0.0, true};
  return psi_inv_prime(y);
}

Derivative exp_n_dn(IterationOrder n, ExtendedReal x) {
  if (!x.is_finite()) return {0.0, true};
  Derivative d = exp_n_dn(n, x.value);
  d.saturated = d.saturated || x.saturated;
  return d;
}

Derivative exp_n_dx(IterationOrder n, double x) {
  if (n.value == 0.0) {
    require_finite(x, "exp_n_dx");
    return {1.0, false};
  }
  const Derivative dn = exp_n_dn(n, x);
  if (dn.value == 0.0) return dn;
  return {dn.value * psi_prime(x), dn.saturated};
}

Derivative exp_n_dx(IterationOrder n, ExtendedReal x) {
  if (!x.is_finite()) return {0.0, true};
  Derivative d = exp_n_dx(n, x.value);
  d.saturated = d.saturated || x.saturated;
  return d;
}

ExtendedReal extended_add(ExtendedReal a, ExtendedReal b) {
  if ((a.is_negative_infinity() && b.is_positive_infinity()) ||
      (a.is_positive_infinity() && b.is_negative_infinity())) {
    throw std::domain_error("extended_add: opposite infinities");
  }
  return {a.value + b.value, a.saturated || b.saturated};
}

ExtendedReal addiplicate(double x, double y, IterationOrder n) {
  const ExtendedReal inner = extended_add(exp_n(-n, x), exp_n(-n, y));
  return exp_n(n, inner);
}

AddiplicationGradient addiplicate_gradient(double x, double y, IterationOrder n) {
  const ExtendedReal ix = exp_n(-n, x);
  const ExtendedReal iy = exp_n(-n, y);
  AddiplicationGradient g;
  if (!ix.is_finite() || !iy.is_finite()) {
    g.saturated = true;
    return g;
  }
  const double sum = ix.value + iy.value;
  const Derivative outer_dx = exp_n_dx(n, sum);
  const Derivative outer_dn = exp_n_dn(n, sum);
  const Derivative dx = exp_n_dx(-n, x);
  const Derivative dy = exp_n_dx(-n, y);
  const Derivative dnx = exp_n_dn(-n, x);
  const Derivative dny = exp_n_dn(-n, y);
  g.saturated = outer_dx.saturated || outer_dn.saturated || dx.saturated || dy.saturated || dnx.saturated ||
                dny.saturated;
  if (g.saturated) return g;
  g.d_x = outer_dx.value * dx.value;
  g.d_y = outer_dx.value * dy.value;
  g.d_n = outer_dn.value - outer_dx.value * (dnx.value + dny.value);
  return g;
}

}  // namespace addi
