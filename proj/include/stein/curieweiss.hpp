#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stein/base_law.hpp"
#include "stein/pair_model.hpp"

namespace stein {

// Numerically located moment-generating-function dominance constants.
// Subcritical: ln E e^{t xi} <= t^2/(2b) on a t-grid for the largest such b;
// critical: ln E e^{t xi} <= t^2/2 - b1 t^{2k} on |t| <= b0 and <= t^2/(2 b2)
// outside. Grid-verified, not proven.
struct CwDominance {
  bool critical = false;
  double b = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};

// Mean-field Gibbs model: i.i.d. base-law spins reweighted by exp(beta S^2 / 2n),
// S = sum X_i. Sampling is exact through the auxiliary-variable decomposition
//   exp(beta S^2 / 2n) = E_t exp(t S sqrt(beta/n)),  t ~ N(0,1),
// so a state is: draw t from density ~ exp(-t^2/2) M(t sqrt(beta/n))^n, then
// draw the spins i.i.d. from the tilted law ~ exp(t sqrt(beta/n) x) dL(x).
// The exchangeable pair resamples one uniformly chosen site from its exact
// conditional given the rest (single-site heat bath).
//
// Scaling regimes:
//   beta < 1:  W = S/sqrt(n),        lambda = 1/n,          g(x) = (1-beta) x
//   beta = 1:  W = S/n^(1-1/(2k)),   lambda = n^(-2+1/k),   g(x) = 2k c2 x^(2k-1)
// with k the moment type of the law and c2 = -kappa_{2k}/(2k)!.
class CwModel : public PairModel {
 public:
  // law must have finite support; beta in (0, 1]; 1 <= n <= 10^4.
  CwModel(const BaseLaw& law, double beta, int n);

  std::string name() const override { return "curieweiss"; }
  double lambda() const override { return lambda_; }
  const GFunction& g() const override { return g_; }
  Replicate sample_replicate(RngStream& rng) const override;
  PairDraw sample_pair(RngStream& rng) const override;

  int n() const { return n_; }
  double beta() const { return beta_; }
  bool critical() const { return critical_; }
  // moment type; 0 in the subcritical regime where it plays no role
  int type_k() const { return k_; }
  double c2() const { return c2_; }
  double lambda_rho() const { return lambda_rho_; }
  double scale() const { return scale_; }
  const BaseLaw& law() const { return law_; }
  const CwDominance& dominance() const { return dom_; }

  // exact draw of the full spin state
  std::vector<double> sample_state(RngStream& rng) const;
  double statistic(const std::vector<double>& x) const;
  // closed-form conditional moments by exact summation over site conditionals
  CondMoments cond_moments(const std::vector<double>& x) const;
  // one full heat-bath (Glauber) sweep, for stationarity cross-checks
  void heat_bath_sweep(std::vector<double>& x, RngStream& rng) const;

 private:
  void build_t_table();
  double log_aux_density(double t) const;
  double draw_t(RngStream& rng) const;
  // conditional probabilities of one site given the others' sum s_minus:
  // ~ p_j exp(beta x_j s_minus / n + beta x_j^2 / (2n))
  void site_conditional(double s_minus, std::vector<double>& probs) const;
  int support_index(double value) const;

  BaseLaw law_;
  double beta_;
  int n_;
  bool critical_;
  int k_ = 0;
  double lambda_rho_ = 0.0;
  double c2_ = 0.0;
  double scale_;
  double lambda_;
  GFunction g_;
  CwDominance dom_;
  std::vector<double> t_grid_, t_cdf_;
  std::vector<double> one_site_cum_;  // n = 1: direct weighted enumeration
};

CwDominance check_dominance(const BaseLaw& law, double beta, int k);

}  // namespace stein
