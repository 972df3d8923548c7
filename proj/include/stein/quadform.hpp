#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>

#include "stein/base_law.hpp"
#include "stein/pair_model.hpp"

namespace stein {

// Symmetric matrix with zero diagonal, stored CSR-style with both (i,j) and
// (j,i) present so row operations are O(nnz(row)).
class SymMatrix {
 public:
  static SymMatrix from_triplets(int n,
                                 const std::vector<std::array<double, 3>>& t);
  static SymMatrix from_dense(const std::vector<std::vector<double>>& a);
  static SymMatrix tridiagonal(int n);  // ones on the first off-diagonals
  // dense CSV, or triplet lines "i,j,value" (0-based); format auto|dense|triplet
  static SymMatrix from_csv(const std::string& path,
                            const std::string& format = "auto");

  int n() const { return n_; }
  double sigma2() const { return sigma2_; }  // 2 sum_ij a_ij^2
  // q_i = sum_j a_ij^2
  const std::vector<double>& row_sumsq() const { return row_sumsq_; }
  // out_i = sum_j a_ij x_j
  void multiply(std::span<const double> x, std::span<double> out) const;
  double row_dot(int i, std::span<const double> x) const;

 private:
  SymMatrix() = default;
  void finalize();

  int n_ = 0;
  std::vector<int> row_ptr_, col_;
  std::vector<double> val_;
  double sigma2_ = 0.0;
  std::vector<double> row_sumsq_;
};

// W = (1/sigma_n) sum_{i != j} a_ij X_i X_j with sigma_n^2 = 2 sum a_ij^2.
// Exchange step: one index redrawn from the entry law. E(Delta|X) = (2/n) W
// holds exactly, so R = 0.
class QuadFormModel : public PairModel {
 public:
  QuadFormModel(std::shared_ptr<const SymMatrix> a, BaseLaw law);

  std::string name() const override { return "quadform"; }
  double lambda() const override { return lambda_; }
  const GFunction& g() const override { return g_; }
  Replicate sample_replicate(RngStream& rng) const override;
  PairDraw sample_pair(RngStream& rng) const override;

  const SymMatrix& matrix() const { return *a_; }
  const BaseLaw& law() const { return law_; }
  double sigma_n() const { return sigma_; }

 private:
  std::shared_ptr<const SymMatrix> a_;
  BaseLaw law_;
  double sigma_, lambda_;
  GFunction g_;
};

// (E X^4 / sigma_n^2) * (sqrt(sum_i q_i^2) + sqrt(sum_k q_k^2)) with
// q_i = sum_j a_ij^2; scale-invariant in the matrix.
double qf_theoretical_rhs(const SymMatrix& a, const BaseLaw& law);

}  // namespace stein
