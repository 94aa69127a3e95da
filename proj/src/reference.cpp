#include "phasecut/reference.hpp"

#include <cmath>
#include <complex>

namespace phasecut::reference {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Matches the FFTW buffer layout used by the fast path: a flat frequency
// index f on the m x m grid decomposes as (f0, f1) = (f / m, f % m) and the
// pixel at (row r, col c) contributes with phase f0*c + f1*r.
std::complex<double> twiddle(int f0, int f1, int r, int c, int m) {
  const double angle = -2.0 * kPi * (static_cast<double>(f0) * c + static_cast<double>(f1) * r) / m;
  return {std::cos(angle), std::sin(angle)};
}

} // namespace

Eigen::VectorXcd apply_A(const MaskSet& masks, int osf, const Eigen::MatrixXcd& x) {
  const int N = masks.side;
  const int m = osf * N;
  const int bs = m * m;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<long>(masks.count) * bs);
  for (int l = 0; l < masks.count; ++l)
    for (int f0 = 0; f0 < m; ++f0)
      for (int f1 = 0; f1 < m; ++f1) {
        std::complex<double> acc(0.0, 0.0);
        for (int c = 0; c < N; ++c)
          for (int r = 0; r < N; ++r)
            acc += masks.masks[l](r, c) * x(r, c) * twiddle(f0, f1, r, c, m);
        out[static_cast<long>(l) * bs + f0 * m + f1] = acc / static_cast<double>(m);
      }
  return out;
}

Eigen::MatrixXcd apply_A_dagger(const MaskSet& masks, int osf, const Eigen::VectorXcd& y) {
  const int N = masks.side;
  const int m = osf * N;
  const int bs = m * m;
  Eigen::MatrixXd coverage = Eigen::MatrixXd::Zero(N, N);
  for (const auto& mask : masks.masks) coverage.array() += mask.array().square();
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(N, N);
  for (int l = 0; l < masks.count; ++l)
    for (int c = 0; c < N; ++c)
      for (int r = 0; r < N; ++r) {
        std::complex<double> acc(0.0, 0.0);
        for (int f0 = 0; f0 < m; ++f0)
          for (int f1 = 0; f1 < m; ++f1)
            acc += y[static_cast<long>(l) * bs + f0 * m + f1] *
                   std::conj(twiddle(f0, f1, r, c, m));
        x(r, c) += acc / static_cast<double>(m) * masks.masks[l](r, c) / coverage(r, c);
      }
  return x;
}

Eigen::VectorXcd apply_M(const MaskSet& masks, int osf, const Eigen::VectorXd& b,
                         const Eigen::VectorXcd& v) {
  Eigen::VectorXcd scaled = b.cast<std::complex<double>>().cwiseProduct(v);
  Eigen::VectorXcd projected = apply_A(masks, osf, apply_A_dagger(masks, osf, scaled));
  return b.cast<std::complex<double>>().cwiseProduct(scaled - projected);
}

Eigen::MatrixXcd dense_A(const MaskSet& masks, int osf) {
  const int N = masks.side;
  const int m = osf * N;
  const int bs = m * m;
  const int p = N * N;
  Eigen::MatrixXcd a(static_cast<long>(masks.count) * bs, p);
  for (int col = 0; col < p; ++col) {
    const int c = col / N;
    const int r = col % N;
    for (int l = 0; l < masks.count; ++l)
      for (int f0 = 0; f0 < m; ++f0)
        for (int f1 = 0; f1 < m; ++f1)
          a(static_cast<long>(l) * bs + f0 * m + f1, col) =
              masks.masks[l](r, c) * twiddle(f0, f1, r, c, m) / static_cast<double>(m);
  }
  return a;
}

} // namespace phasecut::reference
