#include "stein/limit_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stein/numerics.hpp"

namespace stein {

namespace {
constexpr double kLogDensityDrop = 60.0;  // x_max: first x with G(x) >= 60
constexpr double kShiftCutoff = 45.0;     // per-integral tail cut, exp(-45)

// first crossing of G = target along direction sgn, by doubling then bisection
double crossing(const GFunction& g, double sgn, double target) {
  double hi = 1.0;
  int guard = 0;
  while (g.G(sgn * hi) < target) {
    hi *= 2.0;
    if (++guard > 40)
      throw std::runtime_error(
          "LimitDistribution: G(x) fails to grow; tail is not integrable");
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (g.G(sgn * mid) < target ? lo : hi) = mid;
  }
  return hi;
}
}  // namespace

LimitDistribution::LimitDistribution(GFunction g, double quad_tol)
    : g_(std::move(g)), quad_tol_(quad_tol) {
  if (!(quad_tol_ > 0.0 && quad_tol_ < 1e-2))
    throw std::invalid_argument("LimitDistribution: quad_tol out of range");
  if (!g_.eval || !g_.antideriv)
    throw std::invalid_argument("LimitDistribution: g must be callable");
  double xr = crossing(g_, +1.0, kLogDensityDrop);
  double xl = crossing(g_, -1.0, kLogDensityDrop);
  x_max_ = std::max(xr, xl);
  if (!(g_(x_max_) > 0.0) || !(g_(-x_max_) < 0.0))
    throw std::runtime_error(
        "LimitDistribution: g has the wrong sign at +-x_max; tail bound "
        "unusable");
  upper_at_zero_ = shifted_upper(0.0);
  lower_at_zero_ = shifted_lower(0.0);
  double z_norm = upper_at_zero_ + lower_at_zero_;
  if (!(z_norm > 0.0) || !std::isfinite(z_norm))
    throw std::runtime_error("LimitDistribution: normalization failed");
  c1_ = 1.0 / z_norm;
  log_c1_ = -std::log(z_norm);
}

// int_y^T exp(-(G(t)-G(y))) dt + tail majorant, T chosen so the shifted
// exponent reaches kShiftCutoff. Integrand <= 1 on [y, inf) for y >= 0.
double LimitDistribution::shifted_upper(double y) const {
  double gy = g_.G(y);
  double step = 1.0;
  int guard = 0;
  while (g_.G(y + step) - gy < kShiftCutoff) {
    step *= 2.0;
    if (++guard > 60)
      throw std::runtime_error(
          "LimitDistribution: G(x) fails to grow on the right");
  }
  double t_hi = y + step;
  auto f = [this, gy](double t) { return std::exp(-(g_.G(t) - gy)); };
  double v = adaptive_simpson(f, y, t_hi, quad_tol_);
  double g_end = g_(t_hi);
  if (g_end > 0.0) v += std::exp(-(g_.G(t_hi) - gy)) / g_end;
  return v;
}

double LimitDistribution::shifted_lower(double y) const {
  double gy = g_.G(y);
  double step = 1.0;
  int guard = 0;
  while (g_.G(y - step) - gy < kShiftCutoff) {
    step *= 2.0;
    if (++guard > 60)
      throw std::runtime_error(
          "LimitDistribution: G(x) fails to grow on the left");
  }
  double t_lo = y - step;
  auto f = [this, gy](double t) { return std::exp(-(g_.G(t) - gy)); };
  double v = adaptive_simpson(f, t_lo, y, quad_tol_);
  double g_end = g_(t_lo);
  if (g_end < 0.0) v += std::exp(-(g_.G(t_lo) - gy)) / (-g_end);
  return v;
}

double LimitDistribution::mills_upper_log(double y) const {
  if (y >= 0.0) return std::log(shifted_upper(y));
  // (1-F(y))/p(y) = e^{G(y)} (int_y^0 e^{-G} + (1-F(0))/p(0))
  auto f = [this](double t) { return std::exp(-g_.G(t)); };
  double body = adaptive_simpson(f, y, 0.0, quad_tol_);
  return g_.G(y) + std::log(body + upper_at_zero_);
}

double LimitDistribution::mills_lower_log(double y) const {
  if (y <= 0.0) return std::log(shifted_lower(y));
  auto f = [this](double t) { return std::exp(-g_.G(t)); };
  double body = adaptive_simpson(f, 0.0, y, quad_tol_);
  return g_.G(y) + std::log(body + lower_at_zero_);
}

double LimitDistribution::log_cdf(double z) const {
  return log_c1_ - g_.G(z) + mills_lower_log(z);
}

double LimitDistribution::log_sf(double z) const {
  return log_c1_ - g_.G(z) + mills_upper_log(z);
}

double LimitDistribution::cdf(double z) const {
  double v = (z <= 0.0) ? std::exp(log_cdf(z)) : 1.0 - std::exp(log_sf(z));
  return std::clamp(v, 0.0, 1.0);
}

double LimitDistribution::pdf(double x) const {
  return std::exp(log_pdf(x));
}

double LimitDistribution::log_pdf(double x) const { return log_c1_ - g_.G(x); }

std::vector<double> LimitDistribution::cdf_sorted(
    std::span<const double> ascending) const {
  std::vector<double> out(ascending.size());
  if (ascending.empty()) return out;
  double f = cdf(ascending[0]);
  out[0] = f;
  double p_left = pdf(ascending[0]);
  for (std::size_t i = 1; i < ascending.size(); ++i) {
    double a = ascending[i - 1], b = ascending[i];
    if (b < a)
      throw std::invalid_argument("cdf_sorted: points not ascending");
    if (b > a) {
      // composite Simpson, panels capped at 0.05 so wide tail gaps stay exact
      int panels = static_cast<int>((b - a) / 0.05) + 1;
      double h = (b - a) / panels;
      double acc = 0.0;
      double pl = p_left;
      for (int k = 0; k < panels; ++k) {
        double lo = a + k * h;
        double pr = (k + 1 == panels) ? pdf(b) : pdf(lo + h);
        acc += h / 6.0 * (pl + 4.0 * pdf(lo + 0.5 * h) + pr);
        pl = pr;
      }
      f = std::min(f + acc, 1.0);
      p_left = pl;
    }
    out[i] = f;
  }
  return out;
}

ConditionReport check_conditions(const GFunction& g,
                                 const LimitDistribution& dist,
                                 int grid_points) {
  if (grid_points < 3)
    throw std::invalid_argument("check_conditions: need >= 3 grid points");
  ConditionReport rep;
  double xm = dist.x_max();
  double h_grid = 2.0 * xm / (grid_points - 1);

  auto d1 = [&](double x) {
    if (g.deriv1) return (*g.deriv1)(x);
    double h = 1e-5 * (1.0 + std::abs(x));
    return (g(x + h) - g(x - h)) / (2.0 * h);
  };
  auto d2f = [&](double x) {
    if (g.deriv2) return (*g.deriv2)(x);
    double h = 1e-5 * (1.0 + std::abs(x));
    return (g(x + h) - 2.0 * g(x) + g(x - h)) / (h * h);
  };

  double mono = std::numeric_limits<double>::infinity();
  double sign = std::numeric_limits<double>::infinity();
  double curv = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  double prev_g = g(-xm);
  for (int i = 0; i < grid_points; ++i) {
    double x = -xm + i * h_grid;
    double gx = g(x);
    if (i > 0) mono = std::min(mono, gx - prev_g);
    prev_g = gx;
    sign = std::min(sign, x * gx);
    double gp = d1(x);
    curv = std::min(curv, 2.0 * gp * gp - gx * d2f(x));
    if (x != 0.0) {
      double gt = g(g.tau * x);
      if (gt != 0.0) ratio_max = std::max(ratio_max, gx / gt);
    }
  }
  rep.a1_monotone_margin = mono;
  rep.a1_sign_margin = sign;
  rep.a1 = mono >= -1e-12 && sign >= -1e-12;
  rep.a2_margin = curv;
  rep.a2 = curv >= -1e-9;
  rep.a3_left = std::abs(g(-xm)) * dist.pdf(-xm);
  rep.a3_right = std::abs(g(xm)) * dist.pdf(xm);
  rep.a3 = rep.a3_left <= 1e-12 && rep.a3_right <= 1e-12;
  rep.a4_max_ratio = ratio_max;
  rep.a4_k_tau = g.k_tau;
  rep.a4 = (g.k_tau > 0.0) ? ratio_max <= g.k_tau * (1.0 + 1e-9)
                           : std::isfinite(ratio_max);
  return rep;
}

}  // namespace stein
