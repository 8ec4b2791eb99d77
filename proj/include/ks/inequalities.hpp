#pragma once

#include <cmath>
#include <cstdlib>
#include <span>

// Elementary inequalities used by the stability arguments, exposed as margin
// functions (right-hand side minus left-hand side; nonnegative when the
// inequality holds). Kept in the library so the CLI self-test and the unit
// tests exercise the same code.

namespace ks::ineq {

// (log x - log y)^2 <= (x - y)^2 / (xy) for x, y > 0.
inline double log_sq_margin(double x, double y) {
  const double d = x - y;
  const double lhs = std::log(x) - std::log(y);
  return d * d / (x * y) - lhs * lhs;
}

// |y/(1+y) - x/(1+x)| <= |log(1+x) - log(1+y)| for x, y >= 0.
inline double log_bridge_margin(double x, double y) {
  const double lhs = std::abs(y / (1.0 + y) - x / (1.0 + x));
  const double rhs = std::abs(std::log1p(x) - std::log1p(y));
  return rhs - lhs;
}

// | sum a / sum|a| - sum b / sum|b| | <= 2 sum|a-b| / sum|a|
// for sequences with sum|a|, sum|b| > 0.
inline double normalized_sum_margin(std::span<const double> a,
                                    std::span<const double> b) {
  double sa = 0, sb = 0, na = 0, nb = 0, nd = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sa += a[k];
    sb += b[k];
    na += std::abs(a[k]);
    nb += std::abs(b[k]);
    nd += std::abs(a[k] - b[k]);
  }
  return 2.0 * nd / na - std::abs(sa / na - sb / nb);
}

}  // namespace ks::ineq
