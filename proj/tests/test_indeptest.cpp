#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "stein/indeptest.hpp"
#include "stein/rng.hpp"

using namespace stein;

TEST_CASE("scaling constants at (n, p) = (10, 5)") {
  IndepModel model(10, 5, BaseLaw::uniform());
  CHECK(model.c_np() == doctest::Approx(2.581988897471611).epsilon(1e-12));
  CHECK(model.centering() == doctest::Approx(10.0 / 9.0).epsilon(1e-12));
  CHECK(model.lambda() == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("construction validation") {
  CHECK_THROWS(IndepModel(3, 5, BaseLaw::uniform()));         // n < 4
  CHECK_THROWS(IndepModel(10, 1, BaseLaw::uniform()));        // p < 2
  CHECK_THROWS(IndepModel(10, 5, BaseLaw::uniform(), 99));    // inner_m < 100
  CHECK_THROWS(IndepModel(10, 5, BaseLaw::rademacher()));     // 2-point law
  CHECK_THROWS(IndepModel(10, 5, BaseLaw::standard_normal()));
  double a = std::sqrt(3.0);
  CHECK_NOTHROW(IndepModel(10, 5, BaseLaw::finite({-a, 0.0, a},
                                                  {1.0 / 6, 4.0 / 6, 1.0 / 6})));
}

TEST_CASE("normalize_row centers and scales exactly") {
  std::vector<double> raw{1.0, 2.0, 3.0, 4.0};
  std::vector<double> u(4);
  REQUIRE(IndepModel::normalize_row(raw, u));
  double rt5 = std::sqrt(5.0);
  CHECK(u[0] == doctest::Approx(-1.5 / rt5).epsilon(1e-14));
  CHECK(u[3] == doctest::Approx(1.5 / rt5).epsilon(1e-14));
  CHECK(std::accumulate(u.begin(), u.end(), 0.0) == doctest::Approx(0.0));
  double ssq = 0.0;
  for (double v : u) ssq += v * v;
  CHECK(ssq == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> flat{2.0, 2.0, 2.0, 2.0};
  CHECK(!IndepModel::normalize_row(flat, u));
}

TEST_CASE("hand-computed statistic at p = 2, n = 4") {
  // rows (1,2,3,4) and (1,2,4,3): r12 = 0.8, t = 0.64,
  // W = c_np (t - 1/(n-1)) with c_np(4,2) = 4 sqrt(6)/sqrt(6) = 4
  std::vector<double> rows{1, 2, 3, 4, 1, 2, 4, 3};
  auto st = IndepModel::statistic_from_rows(4, 2, rows);
  CHECK(st.t == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(st.w == doctest::Approx(4.0 * (0.64 - 1.0 / 3.0)).epsilon(1e-12));

  // duplicated row: r = 1 exactly, t inflated by 1 - 1/(n-1) over centering
  std::vector<double> dup{1, 2, 3, 4, 1, 2, 3, 4};
  auto st2 = IndepModel::statistic_from_rows(4, 2, dup);
  CHECK(st2.t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(st2.t - 1.0 / 3.0 >= 1.0 - 1.0 / 3.0 - 1e-12);

  // zero-variance row rejected
  std::vector<double> bad{1, 1, 1, 1, 1, 2, 4, 3};
  CHECK_THROWS(IndepModel::statistic_from_rows(4, 2, bad));
}

TEST_CASE("sampled states satisfy the row identities and cache consistency") {
  IndepModel model(8, 6, BaseLaw::uniform());
  RngStream rng(21, 0, 0);
  for (int rep = 0; rep < 50; ++rep) {
    auto st = model.sample_state(rng);
    REQUIRE(st.n == 8);
    REQUIRE(st.p == 6);
    // per-row identities, zero tolerance at 1e-12
    for (int i = 0; i < st.p; ++i) {
      double sum = 0.0, ssq = 0.0;
      for (int k = 0; k < st.n; ++k) {
        sum += st.u[i * st.n + k];
        ssq += st.u[i * st.n + k] * st.u[i * st.n + k];
      }
      CHECK(std::abs(sum) < 1e-12);
      CHECK(std::abs(ssq - 1.0) < 1e-12);
    }
    // r2sum cache against from-scratch dot products
    double t_scratch = 0.0;
    for (int i = 0; i < st.p; ++i) {
      double acc = 0.0;
      for (int j = 0; j < st.p; ++j) {
        if (j == i) continue;
        double r = 0.0;
        for (int k = 0; k < st.n; ++k)
          r += st.u[i * st.n + k] * st.u[j * st.n + k];
        acc += r * r;
        if (j > i) t_scratch += r * r;
      }
      CHECK(std::abs(st.r2sum[i] - acc) < 1e-9);
    }
    CHECK(std::abs(st.t - t_scratch) < 1e-9);
    CHECK(st.w == doctest::Approx(model.c_np() * (st.t - model.centering()))
                      .epsilon(1e-12));
    // statistic_from_rows on the normalized rows reproduces the state
    auto redo = IndepModel::statistic_from_rows(st.n, st.p, st.u);
    CHECK(std::abs(redo.t - st.t) < 1e-9);
    CHECK(std::abs(redo.w - st.w) < 1e-9);
  }
}

TEST_CASE("E t equals the centering constant at (10, 5)") {
  IndepModel model(10, 5, BaseLaw::uniform());
  RngStream rng(23, 0, 0);
  const int reps = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < reps; ++i) {
    auto st = model.sample_state(rng);
    sum += st.t;
    sumsq += st.t * st.t;
  }
  double m = sum / reps;
  double se = std::sqrt((sumsq / reps - m * m) / reps);
  CHECK(std::abs(m - 10.0 / 9.0) <= 4.0 * se);
}

TEST_CASE("pairwise u-coordinate covariance is -1/(n(n-1))") {
  const int n = 5;
  RngStream rng(25, 0, 0);
  std::vector<double> raw(n), u(n);
  const int reps = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < reps; ++i) {
    do {
      for (auto& v : raw) v = rng.uniform(-1.0, 1.0);
    } while (!IndepModel::normalize_row(raw, u));
    double prod = u[0] * u[1];
    sum += prod;
    sumsq += prod * prod;
  }
  double m = sum / reps;
  double se = std::sqrt((sumsq / reps - m * m) / reps);
  CHECK(std::abs(m - (-1.0 / 20.0)) <= 4.0 * se);  // -1/(n(n-1))
}

TEST_CASE("conditional second moment of r given one row is 1/(n-1)") {
  const int n = 6;
  RngStream rng(27, 0, 0);
  std::vector<double> raw(n), ui(n), uj(n);
  for (int fixed = 0; fixed < 5; ++fixed) {
    do {
      for (auto& v : raw) v = rng.uniform(-1.0, 1.0);
    } while (!IndepModel::normalize_row(raw, ui));
    const int reps = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < reps; ++i) {
      do {
        for (auto& v : raw) v = rng.uniform(-1.0, 1.0);
      } while (!IndepModel::normalize_row(raw, uj));
      double r = 0.0;
      for (int k = 0; k < n; ++k) r += ui[k] * uj[k];
      sum += r * r;
      sumsq += r * r * r * r;
    }
    double m = sum / reps;
    double se = std::sqrt((sumsq / reps - m * m) / reps);
    CHECK(std::abs(m - 0.2) <= 4.0 * se);  // 1/(n-1)
  }
}

TEST_CASE("fourth moment of r approaches 3/n^2") {
  const int n = 200;
  RngStream rng(29, 0, 0);
  std::vector<double> raw(n), ui(n), uj(n);
  const int reps = 50000;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) {
    do {
      for (auto& v : raw) v = rng.uniform(-1.0, 1.0);
    } while (!IndepModel::normalize_row(raw, ui));
    do {
      for (auto& v : raw) v = rng.uniform(-1.0, 1.0);
    } while (!IndepModel::normalize_row(raw, uj));
    double r = 0.0;
    for (int k = 0; k < n; ++k) r += ui[k] * uj[k];
    sum += r * r * r * r;
  }
  double m = sum / reps;
  double target = 3.0 / (double(n) * n);
  CHECK(std::abs(m - target) <= 0.1 * target);
}

TEST_CASE("pair draws respect the linear conditional mean") {
  IndepModel model(6, 4, BaseLaw::uniform());
  RngStream rng(31, 0, 0);
  const int reps = 50000;
  // E(Delta | X) = lambda W implies E[Delta h(W)] = lambda E[W h(W)];
  // test h(w) = w and h(w) = w^3 through the paired residuals
  double y1 = 0, y1sq = 0, y3 = 0, y3sq = 0;
  for (int i = 0; i < reps; ++i) {
    auto d = model.sample_pair(rng);
    double delta = d.w - d.w_prime;
    double a = delta * d.w - model.lambda() * d.w * d.w;
    double b = delta * std::pow(d.w, 3) - model.lambda() * std::pow(d.w, 4);
    y1 += a;
    y1sq += a * a;
    y3 += b;
    y3sq += b * b;
  }
  double m1 = y1 / reps, se1 = std::sqrt((y1sq / reps - m1 * m1) / reps);
  double m3 = y3 / reps, se3 = std::sqrt((y3sq / reps - m3 * m3) / reps);
  CHECK(std::abs(m1) <= 4.0 * se1);
  CHECK(std::abs(m3) <= 4.0 * se3);
}

TEST_CASE("replicates carry exact d1 and inner-MC second moments") {
  IndepModel model(6, 4, BaseLaw::uniform(), 150);
  RngStream rng(33, 0, 0);
  for (int i = 0; i < 20; ++i) {
    auto rep = model.sample_replicate(rng);
    CHECK(rep.cm.d1 == doctest::Approx(model.lambda() * rep.w).epsilon(1e-14));
    CHECK(rep.cm.r == 0.0);
    CHECK(!rep.cm.exact);
    CHECK(rep.cm.d2 > 0.0);
    CHECK(rep.cm.var_d2 > 0.0);
    CHECK(rep.cm.var_dds >= 0.0);
  }
  CHECK(model.inner_draws_per_replicate() == 4 + 150);
}
