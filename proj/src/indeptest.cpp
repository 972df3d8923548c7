#include "stein/indeptest.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "stein/numerics.hpp"

namespace stein {

namespace {

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

}  // namespace

IndepModel::IndepModel(int n, int p, const BaseLaw& law, int inner_m)
    : n_(n), p_(p), inner_m_(inner_m), law_(law), g_(linear_g(1.0)) {
  if (n_ < 4) throw std::invalid_argument("indeptest: n must be >= 4");
  if (p_ < 2) throw std::invalid_argument("indeptest: p must be >= 2");
  if (inner_m_ < 100)
    throw std::invalid_argument("indeptest: inner_m must be >= 100");
  bool law_ok = law_.kind() == BaseLaw::Kind::uniform ||
                (law_.finite_support() && law_.points().size() >= 3);
  if (!law_ok)
    throw std::invalid_argument(
        "indeptest: entry law must be continuous-uniform or finite with >= 3 "
        "support points");
  c_np_ = n_ * std::sqrt(n_ + 2.0) /
          std::sqrt(static_cast<double>(p_) * (p_ - 1) * (n_ - 1));
  centering_ = static_cast<double>(p_) * (p_ - 1) / (2.0 * (n_ - 1));
}

bool IndepModel::normalize_row(std::span<const double> raw, std::span<double> u) {
  double m = mean(raw);
  double ssq = 0.0;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    u[k] = raw[k] - m;
    ssq += u[k] * u[k];
  }
  if (ssq <= 1e-16) return false;
  double inv = 1.0 / std::sqrt(ssq);
  for (std::size_t k = 0; k < raw.size(); ++k) u[k] *= inv;
  return true;
}

int IndepModel::draw_row(RngStream& rng, double* u_row) const {
  std::vector<double> raw(static_cast<std::size_t>(n_));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (double& v : raw) v = law_.sample(rng);
    if (normalize_row(raw, {u_row, static_cast<std::size_t>(n_)})) return attempt;
  }
  throw std::runtime_error("indeptest: entry law keeps producing constant rows");
}

void IndepModel::finalize_state(CorrState& st, double c_np, double centering) {
  const int n = st.n, p = st.p;
  st.r2sum.assign(static_cast<std::size_t>(p), 0.0);
  for (int i = 0; i < p; ++i) {
    const double* ui = st.u.data() + static_cast<std::size_t>(i) * n;
    for (int j = i + 1; j < p; ++j) {
      double r = dot(ui, st.u.data() + static_cast<std::size_t>(j) * n, n);
      st.r2sum[static_cast<std::size_t>(i)] += r * r;
      st.r2sum[static_cast<std::size_t>(j)] += r * r;
    }
  }
  st.t = 0.5 * pairwise_sum(st.r2sum);
  st.w = c_np * (st.t - centering);
}

CorrState IndepModel::sample_state(RngStream& rng, int* redraws) const {
  CorrState st;
  st.n = n_;
  st.p = p_;
  st.u.resize(static_cast<std::size_t>(p_) * n_);
  int redrawn = 0;
  for (int i = 0; i < p_; ++i)
    redrawn += draw_row(rng, st.u.data() + static_cast<std::size_t>(i) * n_);
  finalize_state(st, c_np_, centering_);
  if (redraws) *redraws += redrawn;
  return st;
}

CorrState IndepModel::statistic_from_rows(int n, int p,
                                          const std::vector<double>& rows) {
  if (n < 4 || p < 2)
    throw std::invalid_argument("indeptest: data needs p >= 2 rows, n >= 4 columns");
  if (rows.size() != static_cast<std::size_t>(n) * p)
    throw std::invalid_argument("indeptest: data size does not match n x p");
  CorrState st;
  st.n = n;
  st.p = p;
  st.u.resize(rows.size());
  for (int i = 0; i < p; ++i) {
    std::span<const double> raw(rows.data() + static_cast<std::size_t>(i) * n,
                                static_cast<std::size_t>(n));
    std::span<double> u(st.u.data() + static_cast<std::size_t>(i) * n,
                        static_cast<std::size_t>(n));
    if (!normalize_row(raw, u))
      throw std::invalid_argument("indeptest: zero-variance data row " +
                                  std::to_string(i));
  }
  double c_np = n * std::sqrt(n + 2.0) /
                std::sqrt(static_cast<double>(p) * (p - 1) * (n - 1));
  double centering = static_cast<double>(p) * (p - 1) / (2.0 * (n - 1));
  finalize_state(st, c_np, centering);
  return st;
}

Replicate IndepModel::sample_replicate(RngStream& rng) const {
  int redraws = 0;
  CorrState st = sample_state(rng, &redraws);

  // E(W - W* | X) = (2/p) W exactly; only d2 and dds need the inner loop.
  std::vector<double> d2s(static_cast<std::size_t>(inner_m_));
  std::vector<double> dds(static_cast<std::size_t>(inner_m_));
  std::vector<double> fresh(static_cast<std::size_t>(n_));
  for (int rep = 0; rep < inner_m_; ++rep) {
    int theta = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(p_)));
    redraws += draw_row(rng, fresh.data());
    double s_new = 0.0;
    for (int j = 0; j < p_; ++j) {
      if (j == theta) continue;
      double r = dot(fresh.data(), st.u.data() + static_cast<std::size_t>(j) * n_,
                     n_);
      s_new += r * r;
    }
    double delta = c_np_ * (st.r2sum[static_cast<std::size_t>(theta)] - s_new);
    d2s[static_cast<std::size_t>(rep)] = delta * delta;
    dds[static_cast<std::size_t>(rep)] = delta * std::abs(delta);
  }

  Replicate out;
  out.w = st.w;
  out.cm.d1 = lambda() * st.w;
  out.cm.r = 0.0;
  out.cm.d2 = mean(d2s);
  out.cm.dds = mean(dds);
  out.cm.var_d2 = sample_variance(d2s) / inner_m_;
  out.cm.var_dds = sample_variance(dds) / inner_m_;
  out.cm.exact = false;
  out.cm.redraws = redraws;
  return out;
}

PairDraw IndepModel::sample_pair(RngStream& rng) const {
  CorrState st = sample_state(rng, nullptr);
  int theta = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(p_)));
  std::vector<double> fresh(static_cast<std::size_t>(n_));
  draw_row(rng, fresh.data());
  double s_new = 0.0;
  for (int j = 0; j < p_; ++j) {
    if (j == theta) continue;
    double r = dot(fresh.data(), st.u.data() + static_cast<std::size_t>(j) * n_,
                   n_);
    s_new += r * r;
  }
  PairDraw pd;
  pd.w = st.w;
  pd.w_prime = st.w - c_np_ * (st.r2sum[static_cast<std::size_t>(theta)] - s_new);
  return pd;
}

}  // namespace stein
