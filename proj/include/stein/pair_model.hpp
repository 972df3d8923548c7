#pragma once

#include <string>

#include "stein/gfunction.hpp"
#include "stein/rng.hpp"

namespace stein {

// Conditional moments of one exchange step given the current state:
//   d1  = E(W - W' | X)            (must equal lambda (g(W) + R) exactly)
//   d2  = E((W - W')^2 | X)
//   dds = E((W - W') |W - W'| | X)
// method tells whether the values are closed-form or inner Monte Carlo;
// var_d2/var_dds are variances of the *estimators* (0 when exact), used for
// the squared-term bias corrections downstream.
struct CondMoments {
  double d1 = 0.0;
  double d2 = 0.0;
  double dds = 0.0;
  double r = 0.0;  // residual: d1/lambda - g(W), stored by the model
  bool exact = true;
  double var_d2 = 0.0;
  double var_dds = 0.0;
  int redraws = 0;  // degenerate-sample redraw count (nested MC only)
};

struct Replicate {
  double w = 0.0;
  CondMoments cm;
};

struct PairDraw {
  double w = 0.0;
  double w_prime = 0.0;
};

// An exchangeable pair (W, W'): same marginal law, one coordinate exchanged.
// Implementations must be immutable after construction; sample_* take the
// replicate's own RNG stream and are safe to call concurrently.
class PairModel {
 public:
  virtual ~PairModel() = default;
  virtual std::string name() const = 0;
  virtual double lambda() const = 0;
  virtual const GFunction& g() const = 0;
  // fresh state -> statistic + conditional moments
  virtual Replicate sample_replicate(RngStream& rng) const = 0;
  // fresh state -> one coupled draw (W, W')
  virtual PairDraw sample_pair(RngStream& rng) const = 0;
  // denominator for the degenerate-redraw rate (nested-MC models override)
  virtual long long inner_draws_per_replicate() const { return 1; }
};

}  // namespace stein
