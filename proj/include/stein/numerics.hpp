#pragma once

#include <functional>
#include <span>

namespace stein {

// Tree (pairwise) summation: error grows like log(n) rather than n.
// All statistics reported by this library go through here so that results
// do not depend on accumulation order.
double pairwise_sum(std::span<const double> v);

double mean(std::span<const double> v);
// unbiased (n-1) sample variance
double sample_variance(std::span<const double> v);

// Adaptive Simpson with Richardson acceptance |S2-S1| <= 15*tol.
// tol is absolute. Throws std::runtime_error if max_depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol, int max_depth = 60);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// least squares of y on x; requires x.size() == y.size() >= 2 and non-constant x
OlsFit ols(std::span<const double> x, std::span<const double> y);

}  // namespace stein
