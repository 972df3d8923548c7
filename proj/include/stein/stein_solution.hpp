#pragma once

#include "stein/limit_distribution.hpp"

namespace stein {

// Solution of f'(x) - g(x) f(x) = 1{x <= z} - F(z):
//   f_z(x) = F(min)(1-F(max))/p(x) with {min,max} = {x,z} ordered;
// assembled as p(z) * lower_mills(min) * upper_mills(max), which cancels
// the density analytically and stays finite for all x, z.
double stein_f(const LimitDistribution& dist, double z, double x);

// derivative from the equation itself: g(x) f_z(x) + 1{x <= z} - F(z)
double stein_fprime(const LimitDistribution& dist, double z, double x);

// sup-norm bound min(1/c1, 1/|g(z)|); 1/c1 when g(z) = 0
double stein_bound_fz(const LimitDistribution& dist, double z);

}  // namespace stein
