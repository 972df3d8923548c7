#include "stein/stein_solution.hpp"

#include <algorithm>
#include <cmath>

namespace stein {

double stein_f(const LimitDistribution& dist, double z, double x) {
  double lo = std::min(x, z);
  double hi = std::max(x, z);
  double log_f = std::log(dist.c1()) - dist.g().G(z) +
                 dist.mills_lower_log(lo) + dist.mills_upper_log(hi);
  return std::exp(log_f);
}

double stein_fprime(const LimitDistribution& dist, double z, double x) {
  double ind = (x <= z) ? 1.0 : 0.0;
  return dist.g()(x) * stein_f(dist, z, x) + ind - dist.cdf(z);
}

double stein_bound_fz(const LimitDistribution& dist, double z) {
  double gz = std::abs(dist.g()(z));
  double b = 1.0 / dist.c1();
  if (gz > 0.0) b = std::min(b, 1.0 / gz);
  return b;
}

}  // namespace stein
