#pragma once

#include <span>
#include <vector>

#include "stein/gfunction.hpp"

namespace stein {

struct ConditionReport {
  // a1: g non-decreasing and x g(x) >= 0
  bool a1 = false;
  double a1_monotone_margin = 0.0;  // min of g(x_{i+1}) - g(x_i)
  double a1_sign_margin = 0.0;      // min of x g(x)
  // a2: 2 g'^2 - g g'' >= 0
  bool a2 = false;
  double a2_margin = 0.0;
  // a3: g(x) p(x) -> 0 at the ends of the integration range
  bool a3 = false;
  double a3_left = 0.0, a3_right = 0.0;
  // a4: g(x) <= k_tau * g(tau x) on x > 0 (mirrored on x < 0)
  bool a4 = false;
  double a4_max_ratio = 0.0;
  double a4_k_tau = 0.0;

  bool all() const { return a1 && a2 && a3 && a4; }
};

// Limit law with density c1 * exp(-G). Immutable after construction; all
// const members are safe to call concurrently.
class LimitDistribution {
 public:
  explicit LimitDistribution(GFunction g, double quad_tol = 1e-10);

  double cdf(double z) const;
  double pdf(double x) const;
  double log_pdf(double x) const;
  double log_cdf(double z) const;
  double log_sf(double z) const;  // log(1 - F)

  // F at an ascending sequence: one full cdf evaluation at the first point,
  // then composite-Simpson increments of the density. Orders of magnitude
  // faster than per-point cdf calls on large sorted samples.
  std::vector<double> cdf_sorted(std::span<const double> ascending) const;

  // Mills-type ratios: lower(y) = F(y)/p(y), upper(y) = (1-F(y))/p(y).
  // Computed in shifted form so they are finite and accurate for all y.
  double mills_lower_log(double y) const;
  double mills_upper_log(double y) const;

  const GFunction& g() const { return g_; }
  double c1() const { return c1_; }
  double x_max() const { return x_max_; }
  double quad_tol() const { return quad_tol_; }

 private:
  GFunction g_;
  double quad_tol_;
  double x_max_;
  double c1_;
  double log_c1_;
  double upper_at_zero_;  // (1-F(0))/p(0)
  double lower_at_zero_;  // F(0)/p(0)

  double shifted_upper(double y) const;  // int_y^inf e^{-(G(t)-G(y))}, y >= 0
  double shifted_lower(double y) const;  // int_-inf^y e^{-(G(t)-G(y))}, y <= 0
};

// Numerical verification of the standing conditions on a symmetric grid of
// grid_points over [-dist.x_max(), dist.x_max()].
ConditionReport check_conditions(const GFunction& g,
                                 const LimitDistribution& dist,
                                 int grid_points = 2001);

}  // namespace stein
