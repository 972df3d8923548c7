#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stein/pair_model.hpp"

namespace stein {

// One slot per replicate, written independently of worker scheduling:
// replicate r of batch b uses stream (seed, b, r) and lands in slot
// b * (n_total/batches) + r. Results are byte-identical for any worker count.
struct BatchRun {
  std::vector<double> w;
  std::vector<CondMoments> cm;
  int batches = 0;
  long long redraws = 0;  // summed degenerate-sample redraws
};

BatchRun run_batches(const PairModel& model, long long n_total, int batches,
                     std::uint64_t seed, int workers = 0);

// Dvoretzky-Kiefer-Wolfowitz band sqrt(ln(2/alpha) / (2n))
double dkw_band(long long n, double alpha);

class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> samples);  // sorts a copy
  // right-continuous: P(sample <= z)
  double operator()(double z) const;
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// exact Kolmogorov distance sup_z |F_hat(z) - F(z)| against a continuous F
double ks_distance(const EmpiricalCdf& ecdf,
                   const std::function<double(double)>& cdf);
// same, with F already evaluated at the sorted samples
double ks_distance(const EmpiricalCdf& ecdf,
                   std::span<const double> f_at_sorted);

// two-sample Kolmogorov statistic
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct RateFit {
  bool refused = false;
  std::string reason;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<int> excluded;  // indices dropped by the noise floor
};

// OLS of log(error) on log(size). Points with errors[i] < 2*floors[i] are
// excluded (noise floor); fewer than 3 surviving points refuses the fit.
RateFit fit_rate(std::span<const double> sizes, std::span<const double> errors,
                 std::span<const double> floors);

}  // namespace stein
