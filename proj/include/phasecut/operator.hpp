#pragma once

#include "phasecut/signal.hpp"

#include <Eigen/Dense>

#include <memory>
#include <mutex>
#include <vector>

namespace phasecut {

// Matrix-free masked Fourier operator
//
//   A x = ( F(pad(I_1 o x)), ..., F(pad(I_k o x)) )
//
// with F the unitary 2D DFT on the oversampled (osf*N)^2 grid. The
// pseudoinverse is a sum of dual-filtered inverse transforms,
//   A+ y = sum_l crop(F^-1(y_l)) o I'_l,   I'_l = I_l / sum_s I_s^2,
// exact because every pixel is covered by at least one mask. Column
// extraction of M = diag(b)(I - A A+)diag(b) uses the precomputed kernels
// K_{s,l} = F(pad(I_s o I'_l)): convolution with a Dirac is a circular shift
// on the frequency grid, so no n x n storage is ever needed.
class MaskedFourierOperator {
 public:
  MaskedFourierOperator(MaskSet masks, int osf);

  int side() const { return masks_.side; }
  int mask_count() const { return masks_.count; }
  int osf() const { return osf_; }
  int grid() const { return osf_ * masks_.side; }
  int block_size() const { return grid() * grid(); }
  int n() const { return masks_.count * block_size(); }
  int p() const { return masks_.side * masks_.side; }

  const MaskSet& masks() const { return masks_; }
  const Eigen::MatrixXd& dual_filter(int l) const { return duals_[l]; }

  Eigen::VectorXcd apply_A(const Eigen::MatrixXcd& x) const;
  Eigen::MatrixXcd apply_A_dagger(const Eigen::VectorXcd& y) const;

  // M v = diag(b)(I - A A+)diag(b) v, one A and one A+ application.
  Eigen::VectorXcd apply_M(const Eigen::VectorXd& b,
                           const Eigen::VectorXcd& v) const;

  // Column i of M via the shifted kernels, O(n) per column.
  Eigen::VectorXcd extract_M_column(const Eigen::VectorXd& b, int i) const;

  // Diagonal of M, constant per mask block: b_i^2 (1 - K_{l,l}(0)/m).
  Eigen::VectorXd m_diagonal(const Eigen::VectorXd& b) const;

  // Dense M assembled column by column; test oracle only, guarded by cap.
  Eigen::MatrixXcd materialize_dense(const Eigen::VectorXd& b,
                                     int cap = 4096) const;

  // K_{s,l}, computed on first use and cached.
  const Eigen::MatrixXcd& kernel(int s, int l) const;

 private:
  MaskSet masks_;
  int osf_;
  std::vector<Eigen::MatrixXd> duals_;
  mutable std::vector<Eigen::MatrixXcd> kernels_;
  mutable std::vector<char> kernel_ready_;
  mutable std::mutex kernel_mutex_;
};

// Support-truncated view: M1 is the principal submatrix of M on the kept
// indices, applied matrix-free through embed / restrict.
struct TruncatedOperator {
  const MaskedFourierOperator* base = nullptr;
  SupportSelection support;
  Eigen::VectorXd b1;
};

TruncatedOperator make_truncated(const MaskedFourierOperator& op,
                                 const Eigen::VectorXd& b,
                                 const SupportSelection& support);

Eigen::VectorXcd apply_M1(const TruncatedOperator& trunc,
                          const Eigen::VectorXcd& v);
Eigen::VectorXcd extract_M1_column(const TruncatedOperator& trunc, int j);
Eigen::MatrixXcd materialize_dense_M1(const TruncatedOperator& trunc,
                                      int cap = 4096);

// Uniform access to a Hermitian PSD matrix for the phase solvers: columns
// for coordinate updates, products for objective evaluation.
class MatrixAccess {
 public:
  virtual ~MatrixAccess() = default;
  virtual int size() const = 0;
  virtual Eigen::VectorXcd column(int i) const = 0;
  virtual Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const = 0;
  virtual Eigen::VectorXd diagonal() const;
};

class DenseAccess final : public MatrixAccess {
 public:
  explicit DenseAccess(Eigen::MatrixXcd m) : m_(std::move(m)) {}
  int size() const override { return static_cast<int>(m_.rows()); }
  Eigen::VectorXcd column(int i) const override { return m_.col(i); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const override { return m_ * v; }
  Eigen::VectorXd diagonal() const override { return m_.diagonal().real(); }
  const Eigen::MatrixXcd& matrix() const { return m_; }

 private:
  Eigen::MatrixXcd m_;
};

class OperatorMAccess final : public MatrixAccess {
 public:
  OperatorMAccess(const MaskedFourierOperator& op, Eigen::VectorXd b)
      : op_(&op), b_(std::move(b)) {}
  int size() const override { return op_->n(); }
  Eigen::VectorXcd column(int i) const override { return op_->extract_M_column(b_, i); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const override { return op_->apply_M(b_, v); }
  Eigen::VectorXd diagonal() const override { return op_->m_diagonal(b_); }

 private:
  const MaskedFourierOperator* op_;
  Eigen::VectorXd b_;
};

class TruncatedMAccess final : public MatrixAccess {
 public:
  explicit TruncatedMAccess(TruncatedOperator trunc) : trunc_(std::move(trunc)) {}
  int size() const override { return trunc_.support.size(); }
  Eigen::VectorXcd column(int i) const override { return extract_M1_column(trunc_, i); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const override { return apply_M1(trunc_, v); }
  Eigen::VectorXd diagonal() const override;

 private:
  TruncatedOperator trunc_;
};

} // namespace phasecut
