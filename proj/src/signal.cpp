#include "phasecut/signal.hpp"

#include "phasecut/rng.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace phasecut {

ComplexImage make_image(Eigen::MatrixXcd values, bool real_nonneg) {
  if (values.rows() < 1 || values.rows() != values.cols())
    throw std::invalid_argument("image must be square and nonempty");
  if (real_nonneg) {
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      for (Eigen::Index i = 0; i < values.rows(); ++i) {
        const std::complex<double> v = values(i, j);
        if (v.imag() != 0.0 || v.real() < 0.0)
          throw std::invalid_argument("real_nonneg image has a complex or negative value");
      }
  }
  return ComplexImage{std::move(values), real_nonneg};
}

MaskSet make_masks(int count, int side, int resolution, std::uint64_t seed,
                   double bias) {
  if (count < 1) throw std::invalid_argument("mask count must be positive");
  if (side < 1 || resolution < 1 || side % resolution != 0)
    throw std::invalid_argument("mask resolution must divide the image side");
  MaskSet set;
  set.count = count;
  set.side = side;
  set.resolution = resolution;
  set.masks.reserve(count);
  set.masks.push_back(Eigen::MatrixXd::Ones(side, side));
  Rng rng(seed);
  const int blocks = side / resolution;
  for (int l = 1; l < count; ++l) {
    Eigen::MatrixXd mask(side, side);
    for (int br = 0; br < blocks; ++br)
      for (int bc = 0; bc < blocks; ++bc) {
        const double value = rng.coin(bias) ? 1.0 : 0.0;
        mask.block(br * resolution, bc * resolution, resolution, resolution)
            .setConstant(value);
      }
    set.masks.push_back(std::move(mask));
  }
  return set;
}

ObservationVector make_observations(int count, int side, int osf,
                                    Eigen::VectorXd values) {
  ObservationVector b{count, side, osf, std::move(values)};
  const long expected = static_cast<long>(count) * b.block_size();
  if (b.values.size() != expected)
    throw std::invalid_argument("observation vector has wrong length");
  if ((b.values.array() < 0.0).any())
    throw std::invalid_argument("observations must be nonnegative");
  return b;
}

PhaseVector make_phase_vector(Eigen::VectorXcd values) {
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (std::abs(std::abs(values[i]) - 1.0) > 1e-12)
      throw std::invalid_argument("phase vector entry is not unit modulus");
  return PhaseVector{std::move(values)};
}

PhaseVector normalize_phases(const Eigen::VectorXcd& values, double tol) {
  Eigen::VectorXcd u(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double mag = std::abs(values[i]);
    u[i] = mag < tol ? std::complex<double>(1.0, 0.0) : values[i] / mag;
  }
  return PhaseVector{std::move(u)};
}

SupportSelection select_support(const Eigen::VectorXd& b, int m) {
  const int n = static_cast<int>(b.size());
  if (m < 1 || m > n) throw std::invalid_argument("support size out of range");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + m, order.end(),
                    [&b](int a, int c) {
                      if (b[a] != b[c]) return b[a] > b[c];
                      return a < c;
                    });
  order.resize(m);
  std::sort(order.begin(), order.end());
  return SupportSelection{std::move(order)};
}

std::pair<ComplexImage, double> align_global_phase(const ComplexImage& xhat,
                                                   const ComplexImage& ref) {
  if (xhat.values.rows() != ref.values.rows() ||
      xhat.values.cols() != ref.values.cols())
    throw std::invalid_argument("align_global_phase: dimension mismatch");
  const double ref_norm2 = ref.values.squaredNorm();
  if (ref_norm2 == 0.0)
    throw std::invalid_argument("align_global_phase: zero reference");
  // <xhat, ref> = sum conj(xhat) ref; theta* = arg of it.
  const std::complex<double> inner =
      (xhat.values.conjugate().array() * ref.values.array()).sum();
  std::complex<double> rot(1.0, 0.0);
  if (std::abs(inner) > 0.0) rot = inner / std::abs(inner);
  ComplexImage aligned{rot * xhat.values, false};
  const double residual = (aligned.values - ref.values).squaredNorm() / ref_norm2;
  return {std::move(aligned), residual};
}

} // namespace phasecut
