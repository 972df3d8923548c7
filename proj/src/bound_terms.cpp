#include "stein/bound_terms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stein/numerics.hpp"

namespace stein {

namespace {
struct TermMeans {
  double sq1 = 0.0;  // mean of (1 - d2/2l)^2, bias-corrected
  double sq2 = 0.0;  // mean of dds^2, bias-corrected
  double abs_r = 0.0;
};

TermMeans term_means(std::span<const CondMoments> cm, double lambda) {
  std::vector<double> a(cm.size()), b(cm.size()), c(cm.size());
  double inv2l = 1.0 / (2.0 * lambda);
  for (std::size_t i = 0; i < cm.size(); ++i) {
    double u = 1.0 - cm[i].d2 * inv2l;
    a[i] = u * u - cm[i].var_d2 * inv2l * inv2l;
    b[i] = cm[i].dds * cm[i].dds - cm[i].var_dds;
    c[i] = std::abs(cm[i].r);
  }
  return {mean(a), mean(b), mean(c)};
}
}  // namespace

BoundEstimate bound_terms_from_run(const BatchRun& run, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("bound_terms: lambda must be positive");
  if (run.cm.empty()) throw std::invalid_argument("bound_terms: empty run");
  BoundEstimate est;
  est.lambda = lambda;
  est.n = static_cast<long long>(run.cm.size());
  est.redraws = run.redraws;

  TermMeans full = term_means(run.cm, lambda);
  est.t1 = std::sqrt(std::max(0.0, full.sq1));
  est.t2 = std::sqrt(std::max(0.0, full.sq2)) / lambda;
  est.t3 = full.abs_r;

  int nb = run.batches;
  std::size_t per = run.cm.size() / static_cast<std::size_t>(nb);
  if (nb >= 2 && per > 0) {
    std::vector<double> b1(nb), b2(nb), b3(nb);
    for (int b = 0; b < nb; ++b) {
      TermMeans tm = term_means(
          std::span<const CondMoments>(run.cm).subspan(b * per, per), lambda);
      b1[b] = std::sqrt(std::max(0.0, tm.sq1));
      b2[b] = std::sqrt(std::max(0.0, tm.sq2)) / lambda;
      b3[b] = tm.abs_r;
    }
    est.se_t1 = std::sqrt(sample_variance(b1) / nb);
    est.se_t2 = std::sqrt(sample_variance(b2) / nb);
    est.se_t3 = std::sqrt(sample_variance(b3) / nb);
  }
  return est;
}

BoundEstimate estimate_bound_terms(const PairModel& model, long long n,
                                   std::uint64_t seed, int batches,
                                   int workers) {
  if (n < 100)
    throw std::invalid_argument("estimate_bound_terms: need n >= 100");
  BatchRun run = run_batches(model, n, batches, seed, workers);
  double inner = static_cast<double>(model.inner_draws_per_replicate());
  double rate =
      static_cast<double>(run.redraws) / (static_cast<double>(n) * inner);
  if (rate > 1e-3)
    throw std::runtime_error(
        "estimate_bound_terms: degenerate-redraw rate above 0.1%");
  return bound_terms_from_run(run, model.lambda());
}

ErrorProfile empirical_error_profile(const EmpiricalCdf& ecdf,
                                     const LimitDistribution& dist,
                                     std::span<const double> z_grid,
                                     double alpha) {
  ErrorProfile prof;
  prof.n = static_cast<long long>(ecdf.sorted().size());
  prof.dkw = dkw_band(prof.n, alpha);
  prof.z.reserve(z_grid.size());
  for (double z : z_grid) {
    double fh = ecdf(z);
    double fl = dist.cdf(z);
    double raw = std::abs(fh - fl);
    prof.z.push_back(z);
    prof.f_hat.push_back(fh);
    prof.f_limit.push_back(fl);
    prof.raw.push_back(raw);
    prof.weighted_g.push_back(raw * (1.0 + std::abs(dist.g()(z))));
    prof.weighted_z2.push_back(raw * (1.0 + std::abs(z)) * (1.0 + std::abs(z)));
  }
  return prof;
}

ExchangeabilityReport exchangeability_check(const PairModel& model,
                                            long long n, std::uint64_t seed) {
  if (n < 10000)
    throw std::invalid_argument("exchangeability_check: need n >= 10^4");
  std::vector<double> delta(static_cast<std::size_t>(n));
  std::vector<double> sym(static_cast<std::size_t>(n));
  std::vector<double> w(static_cast<std::size_t>(n));
  std::vector<double> wp(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    RngStream rng(seed, 0, static_cast<std::uint64_t>(i));
    PairDraw d = model.sample_pair(rng);
    w[i] = d.w;
    wp[i] = d.w_prime;
    delta[i] = d.w - d.w_prime;
    sym[i] = (d.w - d.w_prime) * (d.w + d.w_prime);
  }
  ExchangeabilityReport rep;
  rep.n = n;
  rep.mean_delta = mean(delta);
  rep.se_delta = std::sqrt(sample_variance(delta) / static_cast<double>(n));
  rep.mean_sym = mean(sym);
  rep.se_sym = std::sqrt(sample_variance(sym) / static_cast<double>(n));
  rep.ks_two_sample_stat = ks_two_sample(w, wp);
  rep.delta_ok = std::abs(rep.mean_delta) <= 4.0 * rep.se_delta;
  rep.sym_ok = std::abs(rep.mean_sym) <= 4.0 * rep.se_sym;
  return rep;
}

SizeMetrics size_metrics(const PairModel& model, const LimitDistribution& dist,
                         long long n_mc, std::span<const double> z_grid,
                         double alpha, std::uint64_t seed, int batches,
                         int workers) {
  BatchRun run = run_batches(model, n_mc, batches, seed, workers);
  SizeMetrics m;
  m.bound = bound_terms_from_run(run, model.lambda());
  EmpiricalCdf ecdf(std::move(run.w));
  m.profile = empirical_error_profile(ecdf, dist, z_grid, alpha);
  m.ks_exact = ks_distance(ecdf, dist.cdf_sorted(ecdf.sorted()));
  for (std::size_t i = 0; i < m.profile.z.size(); ++i) {
    m.sup_raw = std::max(m.sup_raw, m.profile.raw[i]);
    m.sup_weighted_g = std::max(m.sup_weighted_g, m.profile.weighted_g[i]);
    m.sup_weighted_z2 = std::max(m.sup_weighted_z2, m.profile.weighted_z2[i]);
    if (m.profile.z[i] >= 2.5) {
      m.tail_weighted_z2 =
          std::max(m.tail_weighted_z2, m.profile.weighted_z2[i]);
      double zw = (1.0 + std::abs(m.profile.z[i]));
      double fl = m.profile.f_limit[i];
      m.tail_floor = std::max(
          m.tail_floor, zw * zw *
                            std::sqrt(std::max(fl * (1.0 - fl), 1e-12) /
                                      static_cast<double>(n_mc)));
    }
  }
  const auto& s = ecdf.sorted();
  std::vector<double> w2(s.size()), w4(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    w2[i] = s[i] * s[i];
    w4[i] = w2[i] * w2[i];
  }
  m.m2_w = mean(w2);
  m.m4_w = mean(w4);
  m.se_m4 = std::sqrt(sample_variance(w4) / static_cast<double>(w4.size()));
  m.var_w = sample_variance(s);
  m.z_fixed = {0.0, 1.0, 2.5};
  for (double z : m.z_fixed) {
    double fh = ecdf(z);
    double fl = dist.cdf(z);
    m.z_fixed_err.push_back(std::abs(fh - fl));
    // binomial 2-SE floor; the exclusion rule doubles it again
    m.z_fixed_floor.push_back(2.0 *
                              std::sqrt(std::max(fl * (1.0 - fl), 1e-12) /
                                        static_cast<double>(n_mc)));
  }
  return m;
}

RateSummary summarize_rates(std::vector<SizeMetrics> per_size) {
  if (per_size.empty())
    throw std::invalid_argument("summarize_rates: no sizes");
  RateSummary rs;
  rs.per_size = std::move(per_size);
  std::size_t ns = rs.per_size.size();
  std::vector<double> sz(ns), dkw_floor(ns), tail_floor(ns), zero_floor(ns);
  std::vector<double> sup_raw(ns), sup_wg(ns), sup_wz2(ns), tail_wz2(ns);
  std::vector<double> ks(ns), cert(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    const SizeMetrics& m = rs.per_size[i];
    sz[i] = static_cast<double>(m.size);
    dkw_floor[i] = m.profile.dkw;
    tail_floor[i] = m.tail_floor;
    zero_floor[i] = 0.0;
    sup_raw[i] = m.sup_raw;
    sup_wg[i] = m.sup_weighted_g;
    sup_wz2[i] = m.sup_weighted_z2;
    tail_wz2[i] = m.tail_weighted_z2;
    ks[i] = m.ks_exact;
    cert[i] = m.bound.certificate();
  }
  rs.fit_sup_raw = fit_rate(sz, sup_raw, dkw_floor);
  rs.fit_sup_weighted_g = fit_rate(sz, sup_wg, dkw_floor);
  rs.fit_sup_weighted_z2 = fit_rate(sz, sup_wz2, dkw_floor);
  rs.fit_tail_weighted_z2 = fit_rate(sz, tail_wz2, tail_floor);
  rs.fit_ks = fit_rate(sz, ks, dkw_floor);
  rs.fit_certificate = fit_rate(sz, cert, zero_floor);
  const auto& zf = rs.per_size.front().z_fixed;
  for (std::size_t j = 0; j < zf.size(); ++j) {
    std::vector<double> err(ns), floor(ns);
    for (std::size_t i = 0; i < ns; ++i) {
      err[i] = rs.per_size[i].z_fixed_err[j];
      floor[i] = rs.per_size[i].z_fixed_floor[j];
    }
    rs.per_z.emplace_back(zf[j], fit_rate(sz, err, floor));
  }
  return rs;
}

RateSummary rate_summary(const ModelFamily& family,
                         const LimitDistribution& dist,
                         std::span<const long long> sizes, long long n_mc,
                         std::span<const double> z_grid, double alpha,
                         std::uint64_t seed, int batches, int workers) {
  if (sizes.empty()) throw std::invalid_argument("rate_summary: no sizes");
  std::vector<SizeMetrics> per_size;
  for (long long size : sizes) {
    auto model = family(size);
    SizeMetrics m =
        size_metrics(*model, dist, n_mc, z_grid, alpha, seed, batches, workers);
    m.size = size;
    per_size.push_back(std::move(m));
  }
  return summarize_rates(std::move(per_size));
}

}  // namespace stein
