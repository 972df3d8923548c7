#include "stein/curieweiss.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "stein/numerics.hpp"

namespace stein {

namespace {

double factorial(int m) {
  double f = 1.0;
  for (int j = 2; j <= m; ++j) f *= j;
  return f;
}

// Largest b with ln M(t) <= t^2/(2b) over a coarse t-grid; 0 if none > lo.
double largest_quadratic_dominator(const BaseLaw& law, double lo) {
  const double t_span = 50.0;
  const int pts = 2001;
  auto feasible = [&](double b) {
    for (int i = 0; i < pts; ++i) {
      double t = -t_span + 2.0 * t_span * i / (pts - 1);
      if (std::abs(t) < 1e-9) continue;
      double slack = t * t / (2.0 * b) - law.log_mgf(t);
      if (slack < -1e-9 * std::max(1.0, t * t)) return false;
    }
    return true;
  };
  double hi = 3.0;
  if (feasible(hi)) return hi;
  if (!feasible(lo)) return 0.0;
  double a = lo, c = hi;
  for (int it = 0; it < 60; ++it) {
    double m = 0.5 * (a + c);
    (feasible(m) ? a : c) = m;
  }
  return a;
}

}  // namespace

CwDominance check_dominance(const BaseLaw& law, double beta, int k) {
  CwDominance dom;
  if (beta < 1.0) {
    double b = largest_quadratic_dominator(law, beta);
    if (b <= beta + 1e-9)
      throw std::invalid_argument(
          "curieweiss: no b > beta with E exp(t xi) <= exp(t^2/(2b))");
    dom.b = b;
    return dom;
  }
  dom.critical = true;
  // Existential window constants: scan a few split points b0 and take the
  // first for which both branch constants come out valid.
  const double candidates[] = {2.0, 1.5, 1.0, 0.75, 0.5};
  for (double b0 : candidates) {
    double b1 = std::numeric_limits<double>::infinity();
    double b2 = std::numeric_limits<double>::infinity();
    const int inner = 800, outer = 2000;
    for (int i = 1; i <= inner; ++i) {
      double t = b0 * i / inner;
      for (double s : {t, -t}) {
        double num = s * s / 2.0 - law.log_mgf(s);
        b1 = std::min(b1, num / std::pow(std::abs(s), 2 * k));
      }
    }
    for (int i = 1; i <= outer; ++i) {
      double t = b0 + (50.0 - b0) * i / outer;
      for (double s : {t, -t}) {
        double lm = law.log_mgf(s);
        if (lm <= 0.0) continue;
        b2 = std::min(b2, s * s / (2.0 * lm));
      }
    }
    if (b1 > 1e-12 && b2 > 1.0 + 1e-9) {
      dom.b0 = b0;
      dom.b1 = b1;
      dom.b2 = b2;
      return dom;
    }
  }
  throw std::invalid_argument(
      "curieweiss: critical mgf dominance window not found on the grid");
}

CwModel::CwModel(const BaseLaw& law, double beta, int n)
    : law_(law), beta_(beta), n_(n), critical_(beta == 1.0) {
  if (!law_.finite_support())
    throw std::invalid_argument("curieweiss: base law must have finite support");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("curieweiss: beta must lie in (0, 1]");
  if (n < 1 || n > 10000)
    throw std::invalid_argument("curieweiss: n must lie in [1, 10^4]");

  if (critical_) {
    TypeClassification tc = classify_type(law_);
    k_ = tc.k;
    lambda_rho_ = tc.lambda_rho;
    c2_ = lambda_rho_ / factorial(2 * k_);
    scale_ = std::pow(n_, -(1.0 - 1.0 / (2.0 * k_)));
    lambda_ = std::pow(n_, -2.0 + 1.0 / k_);
    g_ = odd_power_g(2.0 * k_ * c2_, 2 * k_ - 1);
  } else {
    scale_ = 1.0 / std::sqrt(static_cast<double>(n_));
    lambda_ = 1.0 / n_;
    g_ = linear_g(1.0 - beta_);
  }
  dom_ = check_dominance(law_, beta_, k_);

  if (n_ == 1) {
    // One site: the interaction weight exp(beta x^2 / 2) does not cancel.
    const auto& pts = law_.points();
    const auto& prb = law_.probs();
    one_site_cum_.resize(pts.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      acc += prb[j] * std::exp(beta_ * pts[j] * pts[j] / 2.0);
      one_site_cum_[j] = acc;
    }
    for (double& c : one_site_cum_) c /= acc;
    one_site_cum_.back() = 1.0;
  } else {
    build_t_table();
  }
}

double CwModel::log_aux_density(double t) const {
  return -t * t / 2.0 + n_ * law_.log_mgf(t * std::sqrt(beta_ / n_));
}

void CwModel::build_t_table() {
  // Find a symmetric range whose endpoints sit >= 60 nats below the peak.
  // The critical density has a flat x^{2k}-shaped bottom of width ~ n^{1/4},
  // so the range is searched by doubling rather than fixed a priori.
  double r = 8.0;
  double peak = 0.0;
  for (;;) {
    peak = -std::numeric_limits<double>::infinity();
    const int coarse = 2049;
    for (int i = 0; i < coarse; ++i) {
      double t = -r + 2.0 * r * i / (coarse - 1);
      peak = std::max(peak, log_aux_density(t));
    }
    if (log_aux_density(-r) <= peak - 60.0 && log_aux_density(r) <= peak - 60.0)
      break;
    r *= 2.0;
    if (r > 1e6)
      throw std::runtime_error("curieweiss: auxiliary density range search failed");
  }
  const int pts = 4096;
  t_grid_.resize(pts);
  t_cdf_.resize(pts);
  double prev_w = 0.0;
  double acc = 0.0;
  for (int i = 0; i < pts; ++i) {
    double t = -r + 2.0 * r * i / (pts - 1);
    double w = std::exp(log_aux_density(t) - peak);
    if (i > 0) acc += 0.5 * (prev_w + w);
    t_grid_[i] = t;
    t_cdf_[i] = acc;
    prev_w = w;
  }
  if (!(acc > 0.0))
    throw std::runtime_error("curieweiss: auxiliary density vanished");
  for (double& c : t_cdf_) c /= acc;
  t_cdf_.back() = 1.0;
}

double CwModel::draw_t(RngStream& rng) const {
  double u = rng.uniform();
  auto it = std::upper_bound(t_cdf_.begin(), t_cdf_.end(), u);
  std::size_t hi = std::min<std::size_t>(t_cdf_.size() - 1,
                                         it - t_cdf_.begin());
  if (hi == 0) return t_grid_.front();
  double c0 = t_cdf_[hi - 1], c1 = t_cdf_[hi];
  double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 1.0;
  return t_grid_[hi - 1] + frac * (t_grid_[hi] - t_grid_[hi - 1]);
}

void CwModel::site_conditional(double s_minus, std::vector<double>& probs) const {
  const auto& pts = law_.points();
  const auto& prb = law_.probs();
  probs.resize(pts.size());
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    double lw = std::log(prb[j]) +
                beta_ * pts[j] * (s_minus + pts[j] / 2.0) / n_;
    probs[j] = lw;
    lmax = std::max(lmax, lw);
  }
  double z = 0.0;
  for (double& q : probs) {
    q = std::exp(q - lmax);
    z += q;
  }
  for (double& q : probs) q /= z;
}

int CwModel::support_index(double value) const {
  const auto& pts = law_.points();
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (pts[j] == value) return static_cast<int>(j);
  throw std::logic_error("curieweiss: state value off the law's support");
}

std::vector<double> CwModel::sample_state(RngStream& rng) const {
  const auto& pts = law_.points();
  std::vector<double> x(static_cast<std::size_t>(n_));
  if (n_ == 1) {
    double u = rng.uniform();
    std::size_t j = std::upper_bound(one_site_cum_.begin(), one_site_cum_.end(), u) -
                    one_site_cum_.begin();
    x[0] = pts[std::min(j, pts.size() - 1)];
    return x;
  }
  double s = draw_t(rng) * std::sqrt(beta_ / n_);
  // tilted site law ~ p_j exp(s x_j)
  std::vector<double> cum(pts.size());
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    cum[j] = std::log(law_.probs()[j]) + s * pts[j];
    lmax = std::max(lmax, cum[j]);
  }
  double acc = 0.0;
  for (double& c : cum) {
    acc += std::exp(c - lmax);
    c = acc;
  }
  for (double& c : cum) c /= acc;
  cum.back() = 1.0;
  for (int i = 0; i < n_; ++i) {
    double u = rng.uniform();
    std::size_t j = std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
    x[static_cast<std::size_t>(i)] = pts[std::min(j, pts.size() - 1)];
  }
  return x;
}

double CwModel::statistic(const std::vector<double>& x) const {
  return scale_ * pairwise_sum(x);
}

CondMoments CwModel::cond_moments(const std::vector<double>& x) const {
  const auto& pts = law_.points();
  double s = pairwise_sum(x);
  // All sites holding the same value share one conditional; group them.
  std::vector<long long> count(pts.size(), 0);
  for (double v : x) ++count[static_cast<std::size_t>(support_index(v))];

  std::vector<double> cond;
  double sum_d1 = 0.0, sum_d2 = 0.0, sum_dds = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    if (count[a] == 0) continue;
    double xa = pts[a];
    site_conditional(s - xa, cond);
    double m1 = 0.0, m2 = 0.0, dds = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      m1 += cond[j] * pts[j];
      m2 += cond[j] * pts[j] * pts[j];
      double diff = xa - pts[j];
      dds += cond[j] * diff * std::abs(diff);
    }
    double cnt = static_cast<double>(count[a]);
    sum_d1 += cnt * (xa - m1);
    sum_d2 += cnt * (xa * xa - 2.0 * xa * m1 + m2);
    sum_dds += cnt * dds;
  }
  CondMoments cm;
  cm.d1 = scale_ * sum_d1 / n_;
  cm.d2 = scale_ * scale_ * sum_d2 / n_;
  cm.dds = scale_ * scale_ * sum_dds / n_;
  cm.r = cm.d1 / lambda_ - g_(scale_ * s);
  cm.exact = true;
  return cm;
}

Replicate CwModel::sample_replicate(RngStream& rng) const {
  std::vector<double> x = sample_state(rng);
  Replicate rep;
  rep.w = statistic(x);
  rep.cm = cond_moments(x);
  return rep;
}

PairDraw CwModel::sample_pair(RngStream& rng) const {
  const auto& pts = law_.points();
  std::vector<double> x = sample_state(rng);
  double s = pairwise_sum(x);
  int theta = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_)));
  double s_minus = s - x[static_cast<std::size_t>(theta)];
  std::vector<double> cond;
  site_conditional(s_minus, cond);
  double u = rng.uniform();
  double acc = 0.0;
  double x_new = pts.back();
  for (std::size_t j = 0; j < pts.size(); ++j) {
    acc += cond[j];
    if (u <= acc) {
      x_new = pts[j];
      break;
    }
  }
  PairDraw pd;
  pd.w = scale_ * s;
  pd.w_prime = scale_ * (s_minus + x_new);
  return pd;
}

void CwModel::heat_bath_sweep(std::vector<double>& x, RngStream& rng) const {
  const auto& pts = law_.points();
  double s = pairwise_sum(x);
  std::vector<double> cond;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s_minus = s - x[i];
    site_conditional(s_minus, cond);
    double u = rng.uniform();
    double acc = 0.0;
    double x_new = pts.back();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      acc += cond[j];
      if (u <= acc) {
        x_new = pts[j];
        break;
      }
    }
    x[i] = x_new;
    s = s_minus + x_new;
  }
}

}  // namespace stein
