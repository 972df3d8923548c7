#pragma once

#include <functional>
#include <memory>

#include "stein/limit_distribution.hpp"
#include "stein/mcengine.hpp"

namespace stein {

// Monte Carlo estimates of the three bound terms
//   t1 = sqrt(E(1 - d2/(2 lambda))^2),
//   t2 = (1/lambda) sqrt(E dds^2),
//   t3 = E|R|,
// with batch-means standard errors. When the conditional moments come from
// nested MC, the squared terms are bias-corrected by their inner variances.
struct BoundEstimate {
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
  double se_t1 = 0.0, se_t2 = 0.0, se_t3 = 0.0;
  long long n = 0;
  double lambda = 0.0;
  long long redraws = 0;
  double certificate() const { return t1 + t2 + t3; }
};

BoundEstimate bound_terms_from_run(const BatchRun& run, double lambda);

// n >= 100; runs its own MC with the given batch count (default 16, which is
// also the batch-means grouping). Aborts if the degenerate-redraw rate
// exceeds 0.1% of inner draws.
BoundEstimate estimate_bound_terms(const PairModel& model, long long n,
                                   std::uint64_t seed, int batches = 16,
                                   int workers = 0);

struct ErrorProfile {
  std::vector<double> z;
  std::vector<double> f_hat;
  std::vector<double> f_limit;
  std::vector<double> raw;          // |F_hat - F|
  std::vector<double> weighted_g;   // raw * (1 + |g(z)|)
  std::vector<double> weighted_z2;  // raw * (1 + |z|)^2
  double dkw = 0.0;
  long long n = 0;
};

ErrorProfile empirical_error_profile(const EmpiricalCdf& ecdf,
                                     const LimitDistribution& dist,
                                     std::span<const double> z_grid,
                                     double alpha);

// Sign diagnostics for the pair construction: E Delta = 0,
// E Delta (W + W') = 0 (within 4 SE), plus the two-sample Kolmogorov
// statistic between the pooled {W} and {W'} draws.
struct ExchangeabilityReport {
  long long n = 0;
  double mean_delta = 0.0, se_delta = 0.0;
  double mean_sym = 0.0, se_sym = 0.0;  // Delta * (W + W')
  double ks_two_sample_stat = 0.0;
  bool delta_ok = false, sym_ok = false;
  bool ok() const { return delta_ok && sym_ok; }
};

ExchangeabilityReport exchangeability_check(const PairModel& model,
                                            long long n, std::uint64_t seed);

struct SizeMetrics {
  long long size = 0;
  double sup_raw = 0.0, sup_weighted_g = 0.0, sup_weighted_z2 = 0.0;
  double tail_weighted_z2 = 0.0;  // sup over z >= 2.5
  double ks_exact = 0.0;
  // binomial noise scale of the weighted tail metric, max over grid z >= 2.5
  // of (1+|z|)^2 sqrt(F(1-F)/n); the DKW sup band is far too coarse there
  double tail_floor = 0.0;
  double var_w = 0.0, m2_w = 0.0, m4_w = 0.0, se_m4 = 0.0;
  BoundEstimate bound;
  ErrorProfile profile;
  // pointwise |F_hat - F| at z in {0, 1, 2.5} with 2x binomial-SE floors
  std::vector<double> z_fixed, z_fixed_err, z_fixed_floor;
};

struct RateSummary {
  std::vector<SizeMetrics> per_size;
  RateFit fit_sup_raw, fit_sup_weighted_g, fit_sup_weighted_z2;
  RateFit fit_tail_weighted_z2;
  RateFit fit_ks, fit_certificate;
  // pointwise |F_hat - F| decay at fixed z; floors are binomial, not DKW
  std::vector<std::pair<double, RateFit>> per_z;
};

using ModelFamily =
    std::function<std::unique_ptr<PairModel>(long long size)>;

// one size: MC run, bound terms, error profile, moment diagnostics
SizeMetrics size_metrics(const PairModel& model, const LimitDistribution& dist,
                         long long n_mc, std::span<const double> z_grid,
                         double alpha, std::uint64_t seed, int batches = 16,
                         int workers = 0);

// log-log fits across completed sizes (DKW floors for sup metrics)
RateSummary summarize_rates(std::vector<SizeMetrics> per_size);

RateSummary rate_summary(const ModelFamily& family,
                         const LimitDistribution& dist,
                         std::span<const long long> sizes, long long n_mc,
                         std::span<const double> z_grid, double alpha,
                         std::uint64_t seed, int batches = 16, int workers = 0);

}  // namespace stein
