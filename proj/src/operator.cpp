#include "phasecut/operator.hpp"

#include "phasecut/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace phasecut {

MaskedFourierOperator::MaskedFourierOperator(MaskSet masks, int osf)
    : masks_(std::move(masks)), osf_(osf) {
  if (osf_ < 1) throw std::invalid_argument("oversampling factor must be >= 1");
  const int N = masks_.side;
  Eigen::MatrixXd coverage = Eigen::MatrixXd::Zero(N, N);
  for (const auto& mask : masks_.masks) {
    if (mask.rows() != N || mask.cols() != N)
      throw std::invalid_argument("mask dimension mismatch");
    if ((mask.array() < 0.0).any())
      throw std::invalid_argument("masks must be nonnegative");
    coverage.array() += mask.array().square();
  }
  if ((coverage.array() <= 0.0).any())
    throw std::invalid_argument("coverage violation: some pixel is never illuminated");
  duals_.reserve(masks_.count);
  for (const auto& mask : masks_.masks)
    duals_.push_back((mask.array() / coverage.array()).matrix());
  kernels_.resize(static_cast<size_t>(masks_.count) * masks_.count);
  kernel_ready_.assign(kernels_.size(), 0);
}

Eigen::VectorXcd MaskedFourierOperator::apply_A(const Eigen::MatrixXcd& x) const {
  const int N = side();
  if (x.rows() != N || x.cols() != N)
    throw std::invalid_argument("apply_A: image dimension mismatch");
  const int m = grid();
  const int bs = block_size();
  Eigen::VectorXcd out(n());
#pragma omp parallel for schedule(static)
  for (int l = 0; l < masks_.count; ++l) {
    Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(m, m);
    padded.topLeftCorner(N, N) =
        masks_.masks[l].cast<std::complex<double>>().cwiseProduct(x);
    Eigen::MatrixXcd y = fft2_unitary(padded);
    out.segment(static_cast<long>(l) * bs, bs) =
        Eigen::Map<const Eigen::VectorXcd>(y.data(), bs);
  }
  return out;
}

Eigen::MatrixXcd MaskedFourierOperator::apply_A_dagger(const Eigen::VectorXcd& y) const {
  if (y.size() != n()) throw std::invalid_argument("apply_A_dagger: length mismatch");
  const int N = side();
  const int m = grid();
  const int bs = block_size();
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(N, N);
#pragma omp parallel
  {
    Eigen::MatrixXcd local = Eigen::MatrixXcd::Zero(N, N);
#pragma omp for schedule(static) nowait
    for (int l = 0; l < masks_.count; ++l) {
      Eigen::Map<const Eigen::MatrixXcd> block(y.data() + static_cast<long>(l) * bs, m, m);
      Eigen::MatrixXcd z = ifft2_unitary(block);
      local.array() +=
          z.topLeftCorner(N, N).array() * duals_[l].cast<std::complex<double>>().array();
    }
#pragma omp critical(phasecut_adjoint_reduce)
    x += local;
  }
  return x;
}

Eigen::VectorXcd MaskedFourierOperator::apply_M(const Eigen::VectorXd& b,
                                                const Eigen::VectorXcd& v) const {
  if (b.size() != n() || v.size() != n())
    throw std::invalid_argument("apply_M: length mismatch");
  Eigen::VectorXcd scaled = b.cast<std::complex<double>>().cwiseProduct(v);
  Eigen::VectorXcd projected = apply_A(apply_A_dagger(scaled));
  return b.cast<std::complex<double>>().cwiseProduct(scaled - projected);
}

const Eigen::MatrixXcd& MaskedFourierOperator::kernel(int s, int l) const {
  const size_t idx = static_cast<size_t>(s) * masks_.count + l;
  std::lock_guard<std::mutex> lock(kernel_mutex_);
  if (!kernel_ready_[idx]) {
    const int N = side();
    const int m = grid();
    Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(m, m);
    padded.topLeftCorner(N, N) =
        (masks_.masks[s].array() * duals_[l].array()).matrix().cast<std::complex<double>>();
    kernels_[idx] = fft2_unitary(padded);
    kernel_ready_[idx] = 1;
  }
  return kernels_[idx];
}

Eigen::VectorXcd MaskedFourierOperator::extract_M_column(const Eigen::VectorXd& b,
                                                         int i) const {
  if (b.size() != n()) throw std::invalid_argument("extract_M_column: length mismatch");
  if (i < 0 || i >= n()) throw std::out_of_range("extract_M_column: index out of range");
  const int m = grid();
  const int bs = block_size();
  const int l = i / bs;
  const int j = i % bs;
  const int j0 = j / m;
  const int j1 = j % m;
  const double bi = b[i];
  Eigen::VectorXcd col(n());
#pragma omp parallel for schedule(static)
  for (int s = 0; s < masks_.count; ++s) {
    const std::complex<double>* k = kernel(s, l).data();
    std::complex<double>* out = col.data() + static_cast<long>(s) * bs;
    const double* bb = b.data() + static_cast<long>(s) * bs;
    const double inv_m = 1.0 / m;
    for (int f0 = 0; f0 < m; ++f0) {
      const int g0 = (f0 - j0 + m) % m;
      for (int f1 = 0; f1 < m; ++f1) {
        const int g1 = (f1 - j1 + m) % m;
        const int f = f0 * m + f1;
        out[f] = -bi * bb[f] * inv_m * k[g0 * m + g1];
      }
    }
  }
  col[i] += bi * bi;
  return col;
}

Eigen::VectorXd MaskedFourierOperator::m_diagonal(const Eigen::VectorXd& b) const {
  if (b.size() != n()) throw std::invalid_argument("m_diagonal: length mismatch");
  const int bs = block_size();
  Eigen::VectorXd d(n());
  for (int l = 0; l < masks_.count; ++l) {
    const double self = kernel(l, l)(0, 0).real() / grid();
    d.segment(static_cast<long>(l) * bs, bs) =
        b.segment(static_cast<long>(l) * bs, bs).array().square() * (1.0 - self);
  }
  return d;
}

Eigen::MatrixXcd MaskedFourierOperator::materialize_dense(const Eigen::VectorXd& b,
                                                          int cap) const {
  if (n() > cap) throw std::invalid_argument("materialize_dense: size over safety cap");
  Eigen::MatrixXcd m(n(), n());
  for (int i = 0; i < n(); ++i) m.col(i) = extract_M_column(b, i);
  return m;
}

TruncatedOperator make_truncated(const MaskedFourierOperator& op,
                                 const Eigen::VectorXd& b,
                                 const SupportSelection& support) {
  if (support.size() == 0) throw std::invalid_argument("empty support");
  TruncatedOperator t;
  t.base = &op;
  t.support = support;
  t.b1.resize(support.size());
  for (int j = 0; j < support.size(); ++j) {
    const int g = support.indices[j];
    if (g < 0 || g >= op.n()) throw std::out_of_range("support index out of range");
    t.b1[j] = b[g];
  }
  return t;
}

Eigen::VectorXcd apply_M1(const TruncatedOperator& trunc, const Eigen::VectorXcd& v) {
  const int n1 = trunc.support.size();
  if (v.size() != n1) throw std::invalid_argument("apply_M1: length mismatch");
  const MaskedFourierOperator& op = *trunc.base;
  Eigen::VectorXcd embedded = Eigen::VectorXcd::Zero(op.n());
  for (int j = 0; j < n1; ++j)
    embedded[trunc.support.indices[j]] = trunc.b1[j] * v[j];
  Eigen::VectorXcd projected = op.apply_A(op.apply_A_dagger(embedded));
  Eigen::VectorXcd out(n1);
  for (int j = 0; j < n1; ++j) {
    const int g = trunc.support.indices[j];
    out[j] = trunc.b1[j] * (embedded[g] - projected[g]);
  }
  return out;
}

Eigen::VectorXcd extract_M1_column(const TruncatedOperator& trunc, int j) {
  const int n1 = trunc.support.size();
  if (j < 0 || j >= n1) throw std::out_of_range("extract_M1_column: index out of range");
  // M1 is the principal submatrix of M on the support, so each entry follows
  // the kernel-shift formula restricted to the kept rows: O(n1) per column.
  const MaskedFourierOperator& op = *trunc.base;
  const int m = op.grid();
  const int bs = op.block_size();
  const int gj = trunc.support.indices[j];
  const int l = gj / bs;
  const int jj = gj % bs;
  const int j0 = jj / m;
  const int j1 = jj % m;
  const double bj = trunc.b1[j];
  const double inv_m = 1.0 / m;
  std::vector<const std::complex<double>*> kernels(op.mask_count());
  for (int s = 0; s < op.mask_count(); ++s) kernels[s] = op.kernel(s, l).data();
  Eigen::VectorXcd out(n1);
  for (int a = 0; a < n1; ++a) {
    const int ga = trunc.support.indices[a];
    const int s = ga / bs;
    const int fa = ga % bs;
    const int g0 = (fa / m - j0 + m) % m;
    const int g1 = (fa % m - j1 + m) % m;
    out[a] = -bj * trunc.b1[a] * inv_m * kernels[s][g0 * m + g1];
    if (ga == gj) out[a] += bj * bj;
  }
  return out;
}

Eigen::MatrixXcd materialize_dense_M1(const TruncatedOperator& trunc, int cap) {
  const int n1 = trunc.support.size();
  if (n1 > cap) throw std::invalid_argument("materialize_dense_M1: size over safety cap");
  Eigen::MatrixXcd m(n1, n1);
  for (int j = 0; j < n1; ++j) m.col(j) = extract_M1_column(trunc, j);
  return m;
}

Eigen::VectorXd MatrixAccess::diagonal() const {
  Eigen::VectorXd d(size());
  for (int i = 0; i < size(); ++i) d[i] = column(i)[i].real();
  return d;
}

Eigen::VectorXd TruncatedMAccess::diagonal() const {
  Eigen::VectorXd full = trunc_.base->m_diagonal([&] {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(trunc_.base->n());
    for (int a = 0; a < trunc_.support.size(); ++a)
      b[trunc_.support.indices[a]] = trunc_.b1[a];
    return b;
  }());
  Eigen::VectorXd d(trunc_.support.size());
  for (int a = 0; a < trunc_.support.size(); ++a)
    d[a] = full[trunc_.support.indices[a]];
  return d;
}

} // namespace phasecut
