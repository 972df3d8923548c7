#pragma once

#include <span>
#include <string>
#include <vector>

#include "stein/base_law.hpp"
#include "stein/pair_model.hpp"

namespace stein {

// State of the correlation-matrix statistic: p variables observed n times.
// u holds the p normalized residual rows (row-major p x n), so the sample
// correlations are plain dot products r_ij = u_i . u_j. r2sum caches
// sum_{j != i} r_ij^2 per row, making one row-replacement update O(n p).
struct CorrState {
  int n = 0;
  int p = 0;
  std::vector<double> u;
  std::vector<double> r2sum;
  double t = 0.0;  // sum_{i<j} r_ij^2
  double w = 0.0;  // c_np (t - p(p-1)/(2(n-1)))
};

// Independence test statistic over the sample correlation matrix:
//   W = c_np (t_np - p(p-1)/(2(n-1))),  c_np = n sqrt(n+2) / sqrt(p(p-1)(n-1)).
// The exchangeable pair replaces one uniformly chosen variable's observation
// row by a fresh i.i.d. row; E(W - W* | X) = (2/p) W holds exactly, so
// lambda = 2/p, g(x) = x and R = 0. Second-order conditional moments have no
// closed form and are estimated by an inner Monte Carlo whose estimator
// variances feed the downstream bias corrections.
class IndepModel : public PairModel {
 public:
  // n >= 4 observations; p >= 2 variables; law must be continuous-uniform or
  // finite with >= 3 support points (keeps degenerate rows negligible);
  // inner_m >= 100 inner replicates for d2/dds.
  IndepModel(int n, int p, const BaseLaw& law, int inner_m = 200);

  std::string name() const override { return "indeptest"; }
  double lambda() const override { return 2.0 / p_; }
  const GFunction& g() const override { return g_; }
  Replicate sample_replicate(RngStream& rng) const override;
  PairDraw sample_pair(RngStream& rng) const override;
  long long inner_draws_per_replicate() const override { return p_ + inner_m_; }

  int n() const { return n_; }
  int p() const { return p_; }
  int inner_m() const { return inner_m_; }
  const BaseLaw& entry_law() const { return law_; }
  double c_np() const { return c_np_; }
  double centering() const { return centering_; }

  // fresh state; degenerate rows are re-drawn and counted into *redraws
  CorrState sample_state(RngStream& rng, int* redraws = nullptr) const;

  // center and scale one observation row to sum 0, sum of squares 1;
  // false if the sample variance is numerically zero
  static bool normalize_row(std::span<const double> raw, std::span<double> u);

  // statistic of user-provided data (rows = variables, row-major p x n);
  // throws on zero-variance rows
  static CorrState statistic_from_rows(int n, int p,
                                       const std::vector<double>& rows);

 private:
  // draw one valid u-row; returns the number of degenerate redraws
  int draw_row(RngStream& rng, double* u_row) const;
  static void finalize_state(CorrState& st, double c_np, double centering);

  int n_, p_, inner_m_;
  BaseLaw law_;
  double c_np_, centering_;
  GFunction g_;
};

}  // namespace stein
