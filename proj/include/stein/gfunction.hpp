#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stein {

// Drift coefficient of the limit law p(x) = c1 * exp(-G(x)), G' = g.
// Requirements on g (checked numerically, not proven):
//   non-decreasing, x*g(x) >= 0, and 2g'^2 - g g'' >= 0 where defined.
struct GFunction {
  std::string kind;             // "linear", "odd_power", or "custom"
  std::vector<double> params;   // linear: {a}; odd_power: {coef, exponent}
  std::function<double(double)> eval;
  std::function<double(double)> antideriv;          // G(x), G(0) = 0
  std::optional<std::function<double(double)>> deriv1;
  std::optional<std::function<double(double)>> deriv2;
  double tau = 0.5;    // scaling-control parameters: g(x) <= k_tau * g(tau x)
  double k_tau = 2.0;

  double operator()(double x) const { return eval(x); }
  double G(double x) const { return antideriv(x); }
};

// g(x) = a x, a > 0. Covers the normal family (variance 1/a).
GFunction linear_g(double a);

// g(x) = coef * sgn(x) |x|^m with m an odd positive integer and coef > 0.
// Covers the critical Curie-Weiss limits, g(x) = 2k c2 x^{2k-1}.
GFunction odd_power_g(double coef, int exponent);

// Arbitrary g for condition probing. Derivatives optional (finite differences
// are used when absent). antideriv may be omitted; it is then integrated
// numerically, which is slow but exact enough for diagnostics.
GFunction custom_g(std::function<double(double)> g,
                   std::optional<std::function<double(double)>> d1 = {},
                   std::optional<std::function<double(double)>> d2 = {},
                   std::optional<std::function<double(double)>> antideriv = {});

}  // namespace stein
