#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "stein/curieweiss.hpp"
#include "stein/rng.hpp"

using namespace stein;

namespace {
// multinomial 4-sigma band for a frequency estimate
double band(double p, double n) { return 4.0 * std::sqrt(p * (1.0 - p) / n); }
}  // namespace

TEST_CASE("model parameters in both regimes") {
  CwModel sub(BaseLaw::rademacher(), 0.7, 100);
  CHECK(!sub.critical());
  CHECK(sub.lambda() == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(sub.scale() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(sub.g()(2.0) == doctest::Approx(0.6).epsilon(1e-12));  // (1-beta) x

  CwModel crit(BaseLaw::rademacher(), 1.0, 16);
  CHECK(crit.critical());
  CHECK(crit.type_k() == 2);
  CHECK(crit.c2() == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  CHECK(crit.lambda_rho() == doctest::Approx(2.0).epsilon(1e-12));
  // lambda = n^(-2+1/k) = 16^(-3/2), scale = n^(-(1-1/2k)) = 16^(-3/4)
  CHECK(crit.lambda() == doctest::Approx(std::pow(16.0, -1.5)).epsilon(1e-12));
  CHECK(crit.scale() == doctest::Approx(std::pow(16.0, -0.75)).epsilon(1e-12));
  CHECK(crit.g()(2.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));  // x^3/3
}

TEST_CASE("construction validation") {
  CHECK_THROWS(CwModel(BaseLaw::rademacher(), 0.0, 10));    // beta <= 0
  CHECK_THROWS(CwModel(BaseLaw::rademacher(), 1.5, 10));    // beta > 1
  CHECK_THROWS(CwModel(BaseLaw::rademacher(), 0.5, 0));     // n < 1
  CHECK_THROWS(CwModel(BaseLaw::rademacher(), 0.5, 10001)); // n too large
  CHECK_THROWS(CwModel(BaseLaw::standard_normal(), 0.5, 10));  // not finite
}

TEST_CASE("statistic scaling on explicit states") {
  CwModel sub(BaseLaw::rademacher(), 0.5, 3);
  CHECK(sub.statistic({1.0, 1.0, -1.0}) ==
        doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

  CwModel crit(BaseLaw::rademacher(), 1.0, 4);
  // W = S / n^(3/4)
  CHECK(crit.statistic({1.0, 1.0, 1.0, 1.0}) ==
        doctest::Approx(4.0 / std::pow(4.0, 0.75)).epsilon(1e-14));
}

TEST_CASE("exact two-spin law reproduced by the sampler, beta = 0.7") {
  // P(S = +-2) = e^beta / (2 e^beta + 2), P(S = 0) = 2 / (2 e^beta + 2)
  const double p2 = 0.33409388608408305;   // enumeration value
  const double p0 = 2.0 * 0.16590611391591695;
  CwModel model(BaseLaw::rademacher(), 0.7, 2);
  RngStream rng(101, 0, 0);
  const int draws = 1000000;
  int c_plus = 0, c_zero = 0, c_minus = 0;
  for (int i = 0; i < draws; ++i) {
    auto x = model.sample_state(rng);
    double s = x[0] + x[1];
    if (s > 1.0)
      ++c_plus;
    else if (s < -1.0)
      ++c_minus;
    else
      ++c_zero;
  }
  CHECK(std::abs(double(c_plus) / draws - p2) < band(p2, draws));
  CHECK(std::abs(double(c_minus) / draws - p2) < band(p2, draws));
  CHECK(std::abs(double(c_zero) / draws - p0) < band(p0, draws));
}

TEST_CASE("exact two-spin law reproduced by the sampler, beta = 1") {
  const double p2 = 0.36552928931500244;
  const double p0 = 2.0 * 0.13447071068499756;
  CwModel model(BaseLaw::rademacher(), 1.0, 2);
  RngStream rng(103, 0, 0);
  const int draws = 1000000;
  int c_plus = 0, c_zero = 0, c_minus = 0;
  for (int i = 0; i < draws; ++i) {
    auto x = model.sample_state(rng);
    double s = x[0] + x[1];
    if (s > 1.0)
      ++c_plus;
    else if (s < -1.0)
      ++c_minus;
    else
      ++c_zero;
  }
  CHECK(std::abs(double(c_plus) / draws - p2) < band(p2, draws));
  CHECK(std::abs(double(c_minus) / draws - p2) < band(p2, draws));
  CHECK(std::abs(double(c_zero) / draws - p0) < band(p0, draws));
}

TEST_CASE("beta -> 0 recovers independent spins") {
  CwModel model(BaseLaw::rademacher(), 1e-9, 2);
  RngStream rng(105, 0, 0);
  const int draws = 200000;
  int c_plus = 0;
  for (int i = 0; i < draws; ++i) {
    auto x = model.sample_state(rng);
    if (x[0] + x[1] > 1.0) ++c_plus;
  }
  CHECK(std::abs(double(c_plus) / draws - 0.25) < band(0.25, draws));
}

TEST_CASE("n = 1 uses the direct weighted one-site law") {
  // weights p_j exp(beta x_j^2 / 2); for the sqrt(3) three-point law the
  // outer points gain e^(3 beta / 2) over the center
  double a = std::sqrt(3.0);
  auto law = BaseLaw::finite({-a, 0.0, a}, {1.0 / 6, 4.0 / 6, 1.0 / 6});
  double beta = 0.5;
  double w_out = std::exp(1.5 * beta) / 6.0, w_mid = 4.0 / 6.0;
  double z = 2.0 * w_out + w_mid;
  double p_out = w_out / z;
  CwModel model(law, beta, 1);
  RngStream rng(107, 0, 0);
  const int draws = 200000;
  int hi = 0, lo = 0;
  for (int i = 0; i < draws; ++i) {
    auto x = model.sample_state(rng);
    REQUIRE(x.size() == 1);
    if (x[0] > 1.0) ++hi;
    if (x[0] < -1.0) ++lo;
  }
  CHECK(std::abs(double(hi) / draws - p_out) < band(p_out, draws));
  CHECK(std::abs(double(lo) / draws - p_out) < band(p_out, draws));
}

TEST_CASE("conditional moments match the tanh formula for Rademacher") {
  double beta = 0.7;
  int n = 5;
  CwModel model(BaseLaw::rademacher(), beta, n);
  std::vector<double> x{1.0, 1.0, 1.0, -1.0, -1.0};
  double s = 1.0;
  double scale = 1.0 / std::sqrt(double(n));

  double d1_hand = 0.0;
  for (int i = 0; i < n; ++i)
    d1_hand += x[i] - std::tanh(beta * (s - x[i]) / n);
  d1_hand *= scale / n;

  auto cm = model.cond_moments(x);
  CHECK(cm.d1 == doctest::Approx(d1_hand).epsilon(1e-12));
  CHECK(cm.exact);
  // residual identity holds exactly as stored
  double w = model.statistic(x);
  CHECK(cm.d1 - model.lambda() * (model.g()(w) + cm.r) == 0.0);
  // d2, dds from the two-point conditional, by hand:
  //   per site, P(x' = +-1) = (1 +- m_i)/2 with m_i = tanh(beta s_-i / n),
  //   E (x_i - x')^2 = 2 - 2 x_i m_i and E (x_i-x')|x_i-x'| = 2(x_i - m_i)
  double d2_hand = 0.0, dds_hand = 0.0;
  for (int i = 0; i < n; ++i) {
    double m = std::tanh(beta * (s - x[i]) / n);
    d2_hand += 2.0 - 2.0 * x[i] * m;
    dds_hand += 2.0 * (x[i] - m);
  }
  d2_hand *= scale * scale / n;
  dds_hand *= scale * scale / n;
  CHECK(cm.d2 == doctest::Approx(d2_hand).epsilon(1e-12));
  CHECK(cm.dds == doctest::Approx(dds_hand).epsilon(1e-12));
}

TEST_CASE("one heat-bath sweep preserves the exact law (stationarity)") {
  CwModel model(BaseLaw::rademacher(), 0.8, 16);
  RngStream rng(109, 0, 0);
  const int draws = 100000;
  // paired differences of S^k before/after one sweep
  double d1 = 0, d2 = 0, d4 = 0, q1 = 0, q2 = 0, q4 = 0;
  for (int i = 0; i < draws; ++i) {
    auto x = model.sample_state(rng);
    double s0 = 0;
    for (double v : x) s0 += v;
    model.heat_bath_sweep(x, rng);
    double s1 = 0;
    for (double v : x) s1 += v;
    double e1 = s1 - s0;
    double e2 = s1 * s1 - s0 * s0;
    double e4 = std::pow(s1, 4) - std::pow(s0, 4);
    d1 += e1; d2 += e2; d4 += e4;
    q1 += e1 * e1; q2 += e2 * e2; q4 += e4 * e4;
  }
  auto within4se = [&](double sum, double sumsq) {
    double m = sum / draws;
    double var = sumsq / draws - m * m;
    return std::abs(m) <= 4.0 * std::sqrt(var / draws) + 1e-12;
  };
  CHECK(within4se(d1, q1));
  CHECK(within4se(d2, q2));
  CHECK(within4se(d4, q4));
}

TEST_CASE("subcritical variance approaches 1/(1-beta)") {
  CwModel model(BaseLaw::rademacher(), 0.5, 512);
  RngStream rng(111, 0, 0);
  const int draws = 20000;
  double s2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    auto rep = model.sample_replicate(rng);
    s2 += rep.w * rep.w;
  }
  CHECK(s2 / draws == doctest::Approx(2.0).epsilon(0.08));
}

TEST_CASE("critical second moment approaches the quartic limit's") {
  CwModel model(BaseLaw::rademacher(), 1.0, 512);
  // E Y^2 under c1 exp(-y^4/12), from the same quadrature the limit law uses
  LimitDistribution f2(odd_power_g(1.0 / 3.0, 3));
  double m2 = 0.0;
  {
    double xm = f2.x_max(), h = 2.0 * xm / 40000;
    for (int i = 0; i <= 40000; ++i) {
      double y = -xm + i * h;
      double wgt = (i == 0 || i == 40000) ? 0.5 : 1.0;
      m2 += wgt * y * y * f2.pdf(y);
    }
    m2 *= h;
  }
  CHECK(m2 == doctest::Approx(1.1708286566075289).epsilon(1e-6));  // oracle

  RngStream rng(113, 0, 0);
  const int draws = 20000;
  double s2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    auto rep = model.sample_replicate(rng);
    s2 += rep.w * rep.w;
  }
  CHECK(s2 / draws == doctest::Approx(m2).epsilon(0.05));
}

TEST_CASE("dominance constants") {
  // Rademacher: ln cosh t <= t^2/2 everywhere, so the subcritical constant
  // is the t -> 0 supremum b = 1
  CwModel sub(BaseLaw::rademacher(), 0.5, 16);
  CHECK(!sub.dominance().critical);
  CHECK(sub.dominance().b > 0.99);

  CwModel crit(BaseLaw::rademacher(), 1.0, 16);
  CHECK(crit.dominance().critical);
  CHECK(crit.dominance().b0 > 0.0);
  CHECK(crit.dominance().b1 > 0.0);
  CHECK(crit.dominance().b2 > 1.0);

  // heavy-tailed three-point law: log mgf exceeds t^2/2, so b ~ 0.95 and a
  // beta inside (b, 1) must be rejected while smaller beta passes
  auto heavy = BaseLaw::finite({-2.0, 0.0, 2.0}, {0.125, 0.75, 0.125});
  CHECK_NOTHROW(CwModel(heavy, 0.9, 8));
  CHECK_THROWS(CwModel(heavy, 0.99, 8));
}

TEST_CASE("pair draws stay on the spin lattice and couple one site") {
  CwModel model(BaseLaw::rademacher(), 0.7, 9);
  RngStream rng(115, 0, 0);
  double scale = 1.0 / 3.0;  // 1/sqrt(9)
  for (int i = 0; i < 2000; ++i) {
    auto d = model.sample_pair(rng);
    double s = d.w / scale, sp = d.w_prime / scale;
    CHECK(std::abs(s - std::round(s)) < 1e-10);
    CHECK(std::abs(sp - std::round(sp)) < 1e-10);
    // one flipped +-1 site moves S by 0 or +-2
    double move = std::abs(s - sp);
    CHECK((std::abs(move) < 1e-10 || std::abs(move - 2.0) < 1e-10));
  }
}
