#include "stein/base_law.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stein {

namespace {
const double kSqrt3 = std::sqrt(3.0);

double binom(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

double normal_moment(int order) {
  if (order % 2 == 1) return 0.0;
  double v = 1.0;
  for (int j = 1; j < order; j += 2) v *= j;  // (order-1)!!
  return v;
}
}  // namespace

BaseLaw::BaseLaw(Kind kind, std::vector<double> pts, std::vector<double> prb)
    : kind_(kind), pts_(std::move(pts)), prb_(std::move(prb)) {
  if (kind_ == Kind::rademacher || kind_ == Kind::finite_support) {
    if (pts_.size() != prb_.size() || pts_.size() < 2)
      throw std::invalid_argument("BaseLaw: need >= 2 support points");
    double total = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (!(prb_[i] > 0.0))
        throw std::invalid_argument("BaseLaw: probabilities must be positive");
      total += prb_[i];
      m1 += prb_[i] * pts_[i];
      m2 += prb_[i] * pts_[i] * pts_[i];
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("BaseLaw: probabilities must sum to 1");
    if (std::abs(m1) > 1e-9 || std::abs(m2 - 1.0) > 1e-9)
      throw std::invalid_argument("BaseLaw: law must have mean 0, variance 1");
    cum_.resize(prb_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < prb_.size(); ++i) {
      acc += prb_[i];
      cum_[i] = acc;
    }
    cum_.back() = 1.0;
  }
}

BaseLaw BaseLaw::rademacher() {
  return BaseLaw(Kind::rademacher, {-1.0, 1.0}, {0.5, 0.5});
}

BaseLaw BaseLaw::standard_normal() {
  return BaseLaw(Kind::standard_normal, {}, {});
}

BaseLaw BaseLaw::uniform() { return BaseLaw(Kind::uniform, {}, {}); }

BaseLaw BaseLaw::finite(std::vector<double> points, std::vector<double> probs) {
  return BaseLaw(Kind::finite_support, std::move(points), std::move(probs));
}

std::string BaseLaw::kind_name() const {
  switch (kind_) {
    case Kind::rademacher: return "rademacher";
    case Kind::finite_support: return "finite_support";
    case Kind::standard_normal: return "standard_normal";
    case Kind::uniform: return "uniform";
  }
  return "?";
}

double BaseLaw::moment(int order) const {
  if (order < 0) throw std::invalid_argument("moment: negative order");
  if (order == 0) return 1.0;
  switch (kind_) {
    case Kind::standard_normal:
      return normal_moment(order);
    case Kind::uniform:
      // E X^j over [-sqrt3, sqrt3]: 0 odd, 3^{j/2}/(j+1) even
      if (order % 2 == 1) return 0.0;
      return std::pow(3.0, order / 2) / (order + 1);
    default: {
      double v = 0.0;
      for (std::size_t i = 0; i < pts_.size(); ++i)
        v += prb_[i] * std::pow(pts_[i], order);
      return v;
    }
  }
}

double BaseLaw::log_mgf(double s) const {
  if (!finite_support())
    throw std::invalid_argument("log_mgf: finite-support laws only");
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts_.size(); ++i)
    m = std::max(m, s * pts_[i]);
  double acc = 0.0;
  for (std::size_t i = 0; i < pts_.size(); ++i)
    acc += prb_[i] * std::exp(s * pts_[i] - m);
  return m + std::log(acc);
}

double BaseLaw::sample(RngStream& rng) const {
  switch (kind_) {
    case Kind::rademacher:
      return rng.rademacher();
    case Kind::standard_normal:
      return rng.gaussian();
    case Kind::uniform:
      return rng.uniform(-kSqrt3, kSqrt3);
    default: {
      double u = rng.uniform();
      auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
      return pts_[static_cast<std::size_t>(it - cum_.begin())];
    }
  }
}

double BaseLaw::expect_signed_sq(double a) const {
  switch (kind_) {
    case Kind::standard_normal: {
      // E[(a-Z)|a-Z|] = (a^2+1)(2 Phi(a) - 1) + 2 a phi(a)
      double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
      double cdf = 0.5 * std::erfc(-a / std::numbers::sqrt2);
      return (a * a + 1.0) * (2.0 * cdf - 1.0) + 2.0 * a * phi;
    }
    case Kind::uniform: {
      double c = std::clamp(a, -kSqrt3, kSqrt3);
      // int_{-s}^{c}(a-x)^2 dx - int_{c}^{s}(a-x)^2 dx over 2s, s = sqrt3
      double left = (std::pow(a + kSqrt3, 3) - std::pow(a - c, 3)) / 3.0;
      double right = (std::pow(a - c, 3) - std::pow(a - kSqrt3, 3)) / 3.0;
      return (left - right) / (2.0 * kSqrt3);
    }
    default: {
      double v = 0.0;
      for (std::size_t i = 0; i < pts_.size(); ++i) {
        double d = a - pts_[i];
        v += prb_[i] * d * std::abs(d);
      }
      return v;
    }
  }
}

std::vector<double> cumulants_from_moments(const std::vector<double>& mom) {
  if (mom.empty())
    throw std::invalid_argument("cumulants_from_moments: empty input");
  std::vector<double> kap(mom.size());
  for (std::size_t m = 1; m <= mom.size(); ++m) {
    double k = mom[m - 1];
    for (std::size_t j = 1; j < m; ++j)
      k -= binom(static_cast<int>(m) - 1, static_cast<int>(j) - 1) *
           kap[j - 1] * mom[m - j - 1];
    kap[m - 1] = k;
  }
  return kap;
}

std::vector<double> moments_from_cumulants(const std::vector<double>& kap) {
  if (kap.empty())
    throw std::invalid_argument("moments_from_cumulants: empty input");
  std::vector<double> mom(kap.size());
  for (std::size_t m = 1; m <= kap.size(); ++m) {
    double v = kap[m - 1];
    for (std::size_t j = 1; j < m; ++j)
      v += binom(static_cast<int>(m) - 1, static_cast<int>(j) - 1) *
           kap[j - 1] * mom[m - j - 1];
    mom[m - 1] = v;
  }
  return mom;
}

TypeClassification classify_type(const BaseLaw& law, int k_max, double tol) {
  if (k_max < 2) throw std::invalid_argument("classify_type: k_max < 2");
  for (int k = 2; k <= k_max; ++k) {
    bool match = true;
    for (int order = 1; order < 2 * k; ++order) {
      if (std::abs(law.moment(order) - normal_moment(order)) > tol) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    double gap = normal_moment(2 * k) - law.moment(2 * k);
    if (std::abs(gap) > tol) {
      if (gap < 0.0)
        throw std::runtime_error(
            "classify_type: 2k-th moment exceeds the normal's (lambda_rho "
            "would be negative)");
      return {k, gap};
    }
  }
  throw std::runtime_error("classify_type: not in any type class k <= " +
                           std::to_string(k_max));
}

CwLimit build_cw_limit(const BaseLaw& law, double tol, double quad_tol) {
  TypeClassification tc = classify_type(law, 6, tol);
  std::vector<double> mom(2 * tc.k);
  for (int j = 1; j <= 2 * tc.k; ++j) mom[j - 1] = law.moment(j);
  std::vector<double> kap = cumulants_from_moments(mom);
  double fact = 1.0;
  for (int j = 2; j <= 2 * tc.k; ++j) fact *= j;
  double c2 = -kap.back() / fact;
  if (!(c2 > 0.0))
    throw std::runtime_error("build_cw_limit: c2 <= 0; no critical limit");
  GFunction g = odd_power_g(2.0 * tc.k * c2, 2 * tc.k - 1);
  LimitDistribution dist(g, quad_tol);
  return {tc.k, tc.lambda_rho, c2, std::move(g), std::move(dist)};
}

}  // namespace stein
