#include "phasecut/greedy.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace phasecut {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::complex<double> keep_phase(std::complex<double> value,
                                std::complex<double> previous) {
  const double mag = std::abs(value);
  if (mag > 0.0) return value / mag;
  const double prev_mag = std::abs(previous);
  return prev_mag > 0.0 ? previous / prev_mag : std::complex<double>(1.0, 0.0);
}

} // namespace

GreedyResult gerchberg_saxton(const MaskedFourierOperator& op,
                              const Eigen::VectorXd& b,
                              const Eigen::VectorXcd& y0, int iters) {
  if (iters < 1) throw std::invalid_argument("gerchberg_saxton: iters must be >= 1");
  if (y0.size() != op.n() || b.size() != op.n())
    throw std::invalid_argument("gerchberg_saxton: length mismatch");
  const auto start = Clock::now();
  const double b_norm2 = b.squaredNorm();
  const double scale = b_norm2 > 0.0 ? 1.0 / b_norm2 : 1.0;
  Eigen::VectorXcd y = y0;
  GreedyResult result;
  result.trace.objective.reserve(iters);
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXcd projected = op.apply_A(op.apply_A_dagger(y));
    result.trace.objective.push_back((y - projected).squaredNorm() * scale);
    for (int i = 0; i < op.n(); ++i)
      y[i] = b[i] * keep_phase(projected[i], y[i]);
  }
  result.y = std::move(y);
  result.trace.iterations = iters;
  result.trace.wall_seconds = seconds_since(start);
  return result;
}

GreedyResult fienup(const MaskedFourierOperator& op, const Eigen::VectorXd& b,
                    const Eigen::VectorXcd& y0, double beta, int iters) {
  if (iters < 1) throw std::invalid_argument("fienup: iters must be >= 1");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("fienup: beta must lie in (0, 1]");
  if (y0.size() != op.n() || b.size() != op.n())
    throw std::invalid_argument("fienup: length mismatch");
  const auto start = Clock::now();
  const double b_norm2 = b.squaredNorm();
  const double scale = b_norm2 > 0.0 ? 1.0 / b_norm2 : 1.0;
  Eigen::VectorXcd y = y0;
  GreedyResult result;
  result.trace.objective.reserve(iters);
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXcd projected = op.apply_A(op.apply_A_dagger(y));
    result.trace.objective.push_back((y - projected).squaredNorm() * scale);
    for (int i = 0; i < op.n(); ++i) {
      const std::complex<double> w = keep_phase(projected[i], y[i]);
      y[i] -= beta * (y[i] - b[i] * w);
    }
  }
  result.y = std::move(y);
  result.trace.iterations = iters;
  result.trace.wall_seconds = seconds_since(start);
  return result;
}

GreedyPhaseResult greedy_phase(const MatrixAccess& m, const PhaseVector& u0,
                               int cycles) {
  if (cycles < 1) throw std::invalid_argument("greedy_phase: cycles must be >= 1");
  const int n = m.size();
  if (u0.size() != n) throw std::invalid_argument("greedy_phase: length mismatch");
  const auto start = Clock::now();
  Eigen::VectorXcd u = u0.values;
  GreedyPhaseResult result;
  result.trace.objective.reserve(cycles);
  for (int cycle = 0; cycle < cycles; ++cycle) {
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXcd col = m.column(i);
      // M is Hermitian, so M_ij = conj(col_j); the coordinate term is
      // 2 Re(conj(u_i) s) with s = sum_{j != i} M_ij u_j, minimized at -s/|s|.
      const std::complex<double> s = col.dot(u) - std::conj(col[i]) * u[i];
      const double mag = std::abs(s);
      if (mag > 0.0) u[i] = -s / mag;
    }
    result.trace.objective.push_back(
        std::real(u.dot(m.apply(u))));
  }
  result.u = normalize_phases(u);
  result.trace.iterations = cycles;
  result.trace.wall_seconds = seconds_since(start);
  return result;
}

} // namespace phasecut
