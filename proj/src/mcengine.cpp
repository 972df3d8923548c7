#include "stein/mcengine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "stein/numerics.hpp"

namespace stein {

BatchRun run_batches(const PairModel& model, long long n_total, int batches,
                     std::uint64_t seed, int workers) {
  if (n_total <= 0 || batches <= 0)
    throw std::invalid_argument("run_batches: n_total and batches must be > 0");
  if (n_total % batches != 0)
    throw std::invalid_argument(
        "run_batches: n_total must be divisible by batches");
  long long per_batch = n_total / batches;

  BatchRun out;
  out.batches = batches;
  out.w.resize(static_cast<std::size_t>(n_total));
  out.cm.resize(static_cast<std::size_t>(n_total));
  std::vector<long long> redraws(static_cast<std::size_t>(batches), 0);

  if (workers <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    workers = hw == 0 ? 1 : static_cast<int>(hw);
  }
  workers = static_cast<int>(std::min<long long>(workers, batches));

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&]() {
    try {
      for (int b = next.fetch_add(1); b < batches; b = next.fetch_add(1)) {
        long long base = static_cast<long long>(b) * per_batch;
        long long local_redraws = 0;
        for (long long r = 0; r < per_batch; ++r) {
          RngStream rng(seed, static_cast<std::uint32_t>(b),
                        static_cast<std::uint64_t>(r));
          Replicate rep = model.sample_replicate(rng);
          out.w[static_cast<std::size_t>(base + r)] = rep.w;
          local_redraws += rep.cm.redraws;
          out.cm[static_cast<std::size_t>(base + r)] = rep.cm;
        }
        redraws[static_cast<std::size_t>(b)] = local_redraws;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(error_mu);
      if (!error) error = std::current_exception();
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  for (long long v : redraws) out.redraws += v;
  return out;
}

double dkw_band(long long n, double alpha) {
  if (n <= 0) throw std::invalid_argument("dkw_band: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("dkw_band: alpha in (0,1) required");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples)
    : sorted_(std::move(samples)) {
  if (sorted_.empty())
    throw std::invalid_argument("EmpiricalCdf: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double z) const {
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), z);
  return static_cast<double>(it - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

double ks_distance(const EmpiricalCdf& ecdf,
                   std::span<const double> f_at_sorted) {
  const auto& s = ecdf.sorted();
  if (f_at_sorted.size() != s.size())
    throw std::invalid_argument("ks_distance: size mismatch");
  double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double f = f_at_sorted[i];
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

double ks_distance(const EmpiricalCdf& ecdf,
                   const std::function<double(double)>& cdf) {
  const auto& s = ecdf.sorted();
  std::vector<double> f(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) f[i] = cdf(s[i]);
  return ks_distance(ecdf, f);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

RateFit fit_rate(std::span<const double> sizes, std::span<const double> errors,
                 std::span<const double> floors) {
  if (sizes.size() != errors.size() || sizes.size() != floors.size())
    throw std::invalid_argument("fit_rate: mismatched inputs");
  RateFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0))
      throw std::invalid_argument("fit_rate: sizes must be positive");
    if (errors[i] < 2.0 * floors[i] || !(errors[i] > 0.0)) {
      fit.excluded.push_back(static_cast<int>(i));
      continue;
    }
    lx.push_back(std::log(sizes[i]));
    ly.push_back(std::log(errors[i]));
  }
  if (lx.size() < 3) {
    fit.refused = true;
    fit.reason = "fewer than 3 points above the noise floor";
    return fit;
  }
  OlsFit ols_fit = ols(lx, ly);
  fit.slope = ols_fit.slope;
  fit.intercept = ols_fit.intercept;
  fit.r_squared = ols_fit.r_squared;
  return fit;
}

}  // namespace stein
