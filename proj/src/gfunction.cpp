#include "stein/gfunction.hpp"

#include <cmath>
#include <stdexcept>

#include "stein/numerics.hpp"

namespace stein {

GFunction linear_g(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("linear_g: need a > 0");
  GFunction g;
  g.kind = "linear";
  g.params = {a};
  g.eval = [a](double x) { return a * x; };
  g.antideriv = [a](double x) { return 0.5 * a * x * x; };
  g.deriv1 = [a](double) { return a; };
  g.deriv2 = [](double) { return 0.0; };
  g.tau = 0.5;
  g.k_tau = 2.0;
  return g;
}

GFunction odd_power_g(double coef, int exponent) {
  if (!(coef > 0.0)) throw std::invalid_argument("odd_power_g: need coef > 0");
  if (exponent < 1 || exponent % 2 == 0)
    throw std::invalid_argument("odd_power_g: exponent must be odd and >= 1");
  GFunction g;
  g.kind = "odd_power";
  g.params = {coef, static_cast<double>(exponent)};
  double m = exponent;
  g.eval = [coef, m](double x) {
    return coef * (std::signbit(x) ? -1.0 : 1.0) * std::pow(std::abs(x), m);
  };
  g.antideriv = [coef, m](double x) {
    return coef * std::pow(std::abs(x), m + 1.0) / (m + 1.0);
  };
  g.deriv1 = [coef, m](double x) {
    return coef * m * std::pow(std::abs(x), m - 1.0);
  };
  g.deriv2 = [coef, m](double x) {
    if (m < 2.0) return 0.0;
    return coef * m * (m - 1.0) * (std::signbit(x) ? -1.0 : 1.0) *
           std::pow(std::abs(x), m - 2.0);
  };
  g.tau = 0.5;
  g.k_tau = std::pow(2.0, m);
  return g;
}

GFunction custom_g(std::function<double(double)> g,
                   std::optional<std::function<double(double)>> d1,
                   std::optional<std::function<double(double)>> d2,
                   std::optional<std::function<double(double)>> antideriv) {
  GFunction out;
  out.kind = "custom";
  out.eval = g;
  out.deriv1 = std::move(d1);
  out.deriv2 = std::move(d2);
  if (antideriv) {
    out.antideriv = *std::move(antideriv);
  } else {
    auto fn = g;
    out.antideriv = [fn](double x) {
      if (x == 0.0) return 0.0;
      double v = adaptive_simpson(fn, 0.0, x, 1e-13);
      return v;
    };
  }
  out.tau = 0.5;
  out.k_tau = 0.0;  // unknown; condition check reports the realized ratio
  return out;
}

}  // namespace stein
