#include "stein/quadform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "stein/numerics.hpp"

namespace stein {

namespace {
std::vector<std::vector<double>> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument(path + ": bad number '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t\r", pos) != std::string::npos)
        throw std::invalid_argument(path + ": bad number '" + cell + "'");
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("empty matrix file: " + path);
  return rows;
}
}  // namespace

void SymMatrix::finalize() {
  row_sumsq_.assign(n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      row_sumsq_[i] += val_[k] * val_[k];
  // sigma_n^2 = 2 sum_{i,j} a_ij^2; both orientations live in the rows
  sigma2_ = 0.0;
  for (double q : row_sumsq_) sigma2_ += q;
  sigma2_ *= 2.0;
  if (!(sigma2_ > 0.0))
    throw std::invalid_argument("SymMatrix: sigma_n^2 must be positive");
}

SymMatrix SymMatrix::from_triplets(
    int n, const std::vector<std::array<double, 3>>& t) {
  if (n < 2) throw std::invalid_argument("SymMatrix: need n >= 2");
  std::map<std::pair<int, int>, double> entries;
  for (const auto& e : t) {
    int i = static_cast<int>(e[0]);
    int j = static_cast<int>(e[1]);
    double v = e[2];
    if (e[0] != i || e[1] != j || i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("SymMatrix: bad triplet index");
    if (i == j) {
      if (v != 0.0)
        throw std::invalid_argument("SymMatrix: diagonal must be zero");
      continue;
    }
    if (v == 0.0) continue;
    std::pair<int, int> key = std::minmax(i, j);
    auto [it, fresh] = entries.emplace(key, v);
    if (!fresh && it->second != v)
      throw std::invalid_argument("SymMatrix: conflicting symmetric entries");
  }
  SymMatrix m;
  m.n_ = n;
  std::vector<std::vector<std::pair<int, double>>> rows(n);
  for (const auto& [key, v] : entries) {
    rows[key.first].emplace_back(key.second, v);
    rows[key.second].emplace_back(key.first, v);
  }
  m.row_ptr_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    std::sort(rows[i].begin(), rows[i].end());
    m.row_ptr_[i + 1] = m.row_ptr_[i] + static_cast<int>(rows[i].size());
    for (auto& [j, v] : rows[i]) {
      m.col_.push_back(j);
      m.val_.push_back(v);
    }
  }
  m.finalize();
  return m;
}

SymMatrix SymMatrix::from_dense(const std::vector<std::vector<double>>& a) {
  int n = static_cast<int>(a.size());
  if (n < 2) throw std::invalid_argument("SymMatrix: need n >= 2");
  std::vector<std::array<double, 3>> t;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(a[i].size()) != n)
      throw std::invalid_argument("SymMatrix: dense matrix must be square");
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        if (a[i][j] != 0.0)
          throw std::invalid_argument("SymMatrix: diagonal must be zero");
        continue;
      }
      if (a[i][j] != a[j][i])
        throw std::invalid_argument("SymMatrix: matrix must be symmetric");
      if (i < j && a[i][j] != 0.0)
        t.push_back({static_cast<double>(i), static_cast<double>(j), a[i][j]});
    }
  }
  return from_triplets(n, t);
}

SymMatrix SymMatrix::tridiagonal(int n) {
  std::vector<std::array<double, 3>> t;
  for (int i = 0; i + 1 < n; ++i)
    t.push_back({static_cast<double>(i), static_cast<double>(i + 1), 1.0});
  return from_triplets(n, t);
}

SymMatrix SymMatrix::from_csv(const std::string& path,
                              const std::string& format) {
  auto rows = parse_csv(path);
  bool triplet_shaped = true;
  for (const auto& r : rows)
    if (r.size() != 3) triplet_shaped = false;
  bool want_triplet = format == "triplet";
  bool want_dense = format == "dense";
  if (!want_triplet && !want_dense && format != "auto")
    throw std::invalid_argument("SymMatrix: format must be auto|dense|triplet");
  if (format == "auto") {
    // 3-column files are triplets unless they form a square 3x3 matrix
    want_triplet = triplet_shaped && rows.size() != 3;
    want_dense = !want_triplet;
  }
  if (want_triplet) {
    if (!triplet_shaped)
      throw std::invalid_argument("SymMatrix: triplet rows need 3 fields");
    int n = 0;
    std::vector<std::array<double, 3>> t;
    for (const auto& r : rows) {
      t.push_back({r[0], r[1], r[2]});
      n = std::max({n, static_cast<int>(r[0]) + 1, static_cast<int>(r[1]) + 1});
    }
    return from_triplets(n, t);
  }
  return from_dense(rows);
}

void SymMatrix::multiply(std::span<const double> x,
                         std::span<double> out) const {
  for (int i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      acc += val_[k] * x[static_cast<std::size_t>(col_[k])];
    out[static_cast<std::size_t>(i)] = acc;
  }
}

double SymMatrix::row_dot(int i, std::span<const double> x) const {
  double acc = 0.0;
  for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
    acc += val_[k] * x[static_cast<std::size_t>(col_[k])];
  return acc;
}

QuadFormModel::QuadFormModel(std::shared_ptr<const SymMatrix> a, BaseLaw law)
    : a_(std::move(a)), law_(std::move(law)) {
  if (!a_) throw std::invalid_argument("QuadFormModel: null matrix");
  sigma_ = std::sqrt(a_->sigma2());
  lambda_ = 2.0 / a_->n();
  g_ = linear_g(1.0);
}

Replicate QuadFormModel::sample_replicate(RngStream& rng) const {
  int n = a_->n();
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = law_.sample(rng);
  std::vector<double> s(static_cast<std::size_t>(n));
  a_->multiply(x, s);

  // W = (1/sigma) sum_i x_i s_i (zero diagonal makes this the full sum)
  double w = 0.0;
  for (int i = 0; i < n; ++i) w += x[i] * s[i];
  w /= sigma_;

  // exchange index theta uniform, X'_theta ~ law:
  //   Delta_theta = (2/sigma) s_theta (X_theta - X')
  double d2 = 0.0, dds = 0.0;
  double c = 2.0 / sigma_;
  for (int i = 0; i < n; ++i) {
    double si = s[i];
    // E(X_i - X')^2 = X_i^2 + 1; E (X_i - X')|X_i - X'| via the law
    d2 += c * c * si * si * (x[i] * x[i] + 1.0);
    dds += c * c * si * std::abs(si) * law_.expect_signed_sq(x[i]);
  }
  Replicate rep;
  rep.w = w;
  rep.cm.d1 = lambda_ * w;  // exact linear regression, R = 0
  rep.cm.d2 = d2 / n;
  rep.cm.dds = dds / n;
  rep.cm.r = 0.0;
  rep.cm.exact = true;
  return rep;
}

PairDraw QuadFormModel::sample_pair(RngStream& rng) const {
  int n = a_->n();
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = law_.sample(rng);
  std::vector<double> s(static_cast<std::size_t>(n));
  a_->multiply(x, s);
  double w = 0.0;
  for (int i = 0; i < n; ++i) w += x[i] * s[i];
  w /= sigma_;
  int theta = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n)));
  double xp = law_.sample(rng);
  // incremental update: W' = W - (2/sigma) s_theta (X_theta - X')
  double wp = w - (2.0 / sigma_) * s[theta] * (x[theta] - xp);
  return {w, wp};
}

double qf_theoretical_rhs(const SymMatrix& a, const BaseLaw& law) {
  const auto& q = a.row_sumsq();
  double sum_q2 = 0.0;
  for (double v : q) sum_q2 += v * v;
  // second factor: sum_{i,j} sum_k (a_ik a_jk)^2 = sum_k (sum_i a_ik^2)^2,
  // equal to sum_q2 by symmetry
  double m4 = law.moment(4);
  return m4 / a.sigma2() * (std::sqrt(sum_q2) + std::sqrt(sum_q2));
}

}  // namespace stein
