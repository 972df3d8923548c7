#pragma once

#include <string>
#include <vector>

#include "stein/limit_distribution.hpp"
#include "stein/rng.hpp"

namespace stein {

// Standardized sampling law for model entries: mean 0, variance 1, validated
// at construction (exact for rademacher/uniform by construction).
class BaseLaw {
 public:
  enum class Kind { rademacher, finite_support, standard_normal, uniform };

  static BaseLaw rademacher();
  static BaseLaw standard_normal();
  // continuous uniform on [-sqrt(3), sqrt(3)]
  static BaseLaw uniform();
  static BaseLaw finite(std::vector<double> points, std::vector<double> probs);

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  bool finite_support() const {
    return kind_ == Kind::rademacher || kind_ == Kind::finite_support;
  }
  const std::vector<double>& points() const { return pts_; }
  const std::vector<double>& probs() const { return prb_; }

  // E X^order; exact closed forms for normal/uniform, direct sums otherwise
  double moment(int order) const;
  // log E exp(sX); finite-support kinds only
  double log_mgf(double s) const;
  double sample(RngStream& rng) const;
  // E[(a - X)|a - X|], exact (support sum or closed form)
  double expect_signed_sq(double a) const;

 private:
  BaseLaw(Kind kind, std::vector<double> pts, std::vector<double> prb);

  Kind kind_;
  std::vector<double> pts_, prb_;
  std::vector<double> cum_;  // cumulative probs for inverse-CDF sampling
};

// kappa_m = mu_m - sum_{j=1}^{m-1} C(m-1, j-1) kappa_j mu_{m-j}.
// moments[j] = E X^{j+1}.
std::vector<double> cumulants_from_moments(const std::vector<double>& moments);
std::vector<double> moments_from_cumulants(const std::vector<double>& kappas);

struct TypeClassification {
  int k = 0;           // smallest k >= 2 with a 2k-th moment gap
  double lambda_rho = 0.0;  // E Z^{2k} - E xi^{2k} > 0
};

// Moments of orders 1..2k-1 match the standard normal within tol and the
// 2k-th is strictly smaller. Throws if no k <= k_max qualifies.
TypeClassification classify_type(const BaseLaw& law, int k_max = 6,
                                 double tol = 1e-9);

struct CwLimit {
  int k = 0;
  double lambda_rho = 0.0;
  double c2 = 0.0;  // -kappa_{2k}/(2k)!
  GFunction g;      // 2k c2 x^{2k-1}
  LimitDistribution dist;
};

// Critical-temperature limit law exp(-c2 x^{2k}) for a type-k base law.
CwLimit build_cw_limit(const BaseLaw& law, double tol = 1e-9,
                       double quad_tol = 1e-10);

}  // namespace stein
