#include "phasecut/bcd.hpp"

#include "phasecut/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace phasecut {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_options(const BcdOptions& opts) {
  if (!(opts.nu > 0.0 && opts.nu < 1.0))
    throw std::invalid_argument("bcd: nu must lie in (0, 1)");
  if (opts.cycles < 1) throw std::invalid_argument("bcd: cycles must be >= 1");
}

std::vector<int> cycle_order(int n, const BcdOptions& opts, Rng* rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (opts.shuffle_order && rng) {
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng->next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }
  }
  return order;
}

} // namespace

FullLift bcd_full(const MatrixAccess& m, const BcdOptions& opts) {
  check_options(opts);
  const auto start = Clock::now();
  const int n = m.size();
  const double m_trace = m.diagonal().sum(); // ||M||_1 for PSD M
  Rng rng(opts.shuffle_seed);
  FullLift result;
  Eigen::MatrixXcd u_mat = Eigen::MatrixXcd::Identity(n, n);
  bool progressed = false;
  double prev_obj = 0.0;
  for (int cycle = 0; cycle < opts.cycles; ++cycle) {
    const auto order = cycle_order(n, opts, &rng);
    for (int i : order) {
      Eigen::VectorXcd col = m.column(i);
      col[i] = 0.0;
      const Eigen::VectorXcd u = u_mat * col;
      const double gamma = std::real(u.dot(col));
      if (gamma > 0.0) {
        const double scale = -std::sqrt((1.0 - opts.nu) / gamma);
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          u_mat(j, i) = scale * u[j];
          u_mat(i, j) = std::conj(u_mat(j, i));
        }
        progressed = true;
      } else {
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          u_mat(j, i) = 0.0;
          u_mat(i, j) = 0.0;
        }
      }
      if (opts.trace_updates) {
        double step_obj = 0.0;
        for (int q = 0; q < n; ++q)
          step_obj += std::real((u_mat.row(q) * m.column(q))(0, 0));
        result.trace.objective.push_back(step_obj);
      }
    }
    double obj = 0.0;
    for (int i = 0; i < n; ++i)
      obj += std::real((u_mat.row(i) * m.column(i))(0, 0));
    if (!opts.trace_updates) result.trace.objective.push_back(obj);
    result.trace.cycles = cycle + 1;
    if (opts.early_stop && cycle > 0 &&
        prev_obj - obj < opts.early_stop_rel * m_trace)
      break;
    prev_obj = obj;
  }
  result.u_matrix = std::move(u_mat);
  result.degenerate_identity = !progressed;
  result.trace.wall_seconds = seconds_since(start);
  return result;
}

LowRankLift bcd_lowrank(const MatrixAccess& m, const BcdOptions& opts, int rank) {
  check_options(opts);
  const int n = m.size();
  if (rank < 2 || rank > n)
    throw std::invalid_argument("bcd_lowrank: rank must lie in [2, n]");
  const auto start = Clock::now();
  const double m_trace = m.diagonal().sum();
  Rng rng(opts.shuffle_seed);

  // Rows of the initial factor are rows of the scaled DFT matrix: unit row
  // norms, and V V* = I exactly when rank == n (matching bcd_full's start).
  Eigen::MatrixXcd v(n, rank);
  const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(rank));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) {
      const double angle = kTwoPi * (static_cast<double>(i) * j) / n;
      v(i, j) = inv_sqrt_r * std::complex<double>(std::cos(angle), std::sin(angle));
    }

  Eigen::MatrixXcd s_mid = Eigen::MatrixXcd::Zero(rank + 2, rank + 2);
  s_mid.topLeftCorner(rank, rank).setIdentity();
  s_mid(rank, rank + 1) = 1.0;
  s_mid(rank + 1, rank) = 1.0;

  LowRankLift result;
  result.rank = rank;
  bool progressed = false;
  double prev_obj = 0.0;
  for (int cycle = 0; cycle < opts.cycles; ++cycle) {
    const auto order = cycle_order(n, opts, &rng);
    for (int i : order) {
      Eigen::VectorXcd col = m.column(i);
      col[i] = 0.0;
      const Eigen::VectorXcd u = v * (v.adjoint() * col);
      const double gamma = std::real(u.dot(col));

      // Target column i of the lifted matrix after this block update.
      Eigen::VectorXcd d = Eigen::VectorXcd::Zero(n);
      if (gamma > 0.0) {
        d = -std::sqrt((1.0 - opts.nu) / gamma) * u;
        progressed = true;
      }
      d[i] = 1.0;
      Eigen::VectorXcd delta = d - v * v.row(i).adjoint();
      delta[i] = 0.0;

      // U_new = W S W* with W = [V, e_i, delta]; diagonalize through the
      // (rank+2)-dimensional Gram matrix and keep the top eigenpairs.
      Eigen::MatrixXcd gram(rank + 2, rank + 2);
      gram.topLeftCorner(rank, rank) = v.adjoint() * v;
      gram.block(0, rank, rank, 1) = v.row(i).adjoint();
      gram.block(0, rank + 1, rank, 1) = v.adjoint() * delta;
      gram(rank, rank) = 1.0;
      gram(rank, rank + 1) = 0.0; // delta_i forced to zero above
      gram(rank + 1, rank) = 0.0;
      gram(rank + 1, rank + 1) = delta.squaredNorm();
      gram.block(rank, 0, 1, rank) = gram.block(0, rank, rank, 1).adjoint();
      gram.block(rank + 1, 0, 1, rank) = gram.block(0, rank + 1, rank, 1).adjoint();

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> gram_eig(gram);
      const Eigen::VectorXd gvals = gram_eig.eigenvalues();
      const double gmax = gvals.maxCoeff();
      Eigen::VectorXd ghalf = Eigen::VectorXd::Zero(rank + 2);
      Eigen::VectorXd ghalf_inv = Eigen::VectorXd::Zero(rank + 2);
      for (int q = 0; q < rank + 2; ++q)
        if (gvals[q] > 1e-13 * std::max(gmax, 1.0)) {
          ghalf[q] = std::sqrt(gvals[q]);
          ghalf_inv[q] = 1.0 / ghalf[q];
        }
      const Eigen::MatrixXcd& gvecs = gram_eig.eigenvectors();
      Eigen::MatrixXcd small = (gvecs * ghalf.asDiagonal() * gvecs.adjoint()) *
                               s_mid *
                               (gvecs * ghalf.asDiagonal() * gvecs.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> small_eig(small);

      // Eigenvalues ascend; take the top `rank`, clamped at zero.
      Eigen::VectorXd lambda(rank);
      Eigen::MatrixXcd basis(rank + 2, rank);
      for (int q = 0; q < rank; ++q) {
        const int idx = rank + 1 - q;
        lambda[q] = std::max(0.0, small_eig.eigenvalues()[idx]);
        basis.col(q) = small_eig.eigenvectors().col(idx);
      }
      if (lambda[0] > 0.0)
        result.eig_ratio = std::max(result.eig_ratio, lambda[rank - 1] / lambda[0]);

      Eigen::MatrixXcd mix = (gvecs * ghalf_inv.asDiagonal() * gvecs.adjoint()) *
                             basis * lambda.cwiseSqrt().asDiagonal();
      Eigen::MatrixXcd v_new = v * mix.topRows(rank);
      v_new.row(i) += mix.row(rank);
      v_new += delta * mix.row(rank + 1);

      for (int q = 0; q < n; ++q) {
        const double norm = v_new.row(q).norm();
        if (norm > 0.0)
          v_new.row(q) /= norm;
        else
          v_new(q, 0) = 1.0;
      }
      v = std::move(v_new);
      if (opts.trace_updates) {
        Eigen::MatrixXcd step_mv(n, rank);
        for (int q = 0; q < rank; ++q) step_mv.col(q) = m.apply(v.col(q));
        result.trace.objective.push_back(
            std::real((v.adjoint() * step_mv).trace()));
      }
    }
    Eigen::MatrixXcd mv(n, rank);
    for (int q = 0; q < rank; ++q) mv.col(q) = m.apply(v.col(q));
    const double obj = std::real((v.adjoint() * mv).trace());
    if (!opts.trace_updates) result.trace.objective.push_back(obj);
    result.trace.cycles = cycle + 1;
    if (opts.early_stop && cycle > 0 &&
        prev_obj - obj < opts.early_stop_rel * m_trace)
      break;
    prev_obj = obj;
  }
  result.factor = std::move(v);
  result.degenerate_identity = !progressed;
  result.trace.wall_seconds = seconds_since(start);
  return result;
}

PhaseVector extract_phase(const Eigen::MatrixXcd& u_matrix) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(u_matrix);
  Eigen::VectorXcd leading = eig.eigenvectors().col(u_matrix.rows() - 1);
  PhaseVector u = normalize_phases(leading);
  u.values *= std::conj(u.values[0]);
  return u;
}

PhaseVector extract_phase_factor(const Eigen::MatrixXcd& factor) {
  // Leading eigenvector of VV* from the small Gram problem.
  const int rank = static_cast<int>(factor.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(factor.adjoint() * factor);
  Eigen::VectorXcd leading = factor * eig.eigenvectors().col(rank - 1);
  PhaseVector u = normalize_phases(leading);
  u.values *= std::conj(u.values[0]);
  return u;
}

ComplexImage reconstruct_signal(const MaskedFourierOperator& op,
                                const Eigen::VectorXd& b, const PhaseVector& u) {
  if (b.size() != op.n() || u.size() != op.n())
    throw std::invalid_argument("reconstruct_signal: length mismatch");
  return ComplexImage{
      op.apply_A_dagger(b.cast<std::complex<double>>().cwiseProduct(u.values)),
      false};
}

TruncatedSolveResult solve_truncated(const MaskedFourierOperator& op,
                                     const Eigen::VectorXd& b,
                                     const SupportSelection& support,
                                     const BcdOptions& opts, int rank) {
  TruncatedOperator trunc = make_truncated(op, b, support);
  TruncatedMAccess access(trunc);
  LowRankLift lift = bcd_lowrank(access, opts, rank);
  PhaseVector u1 = extract_phase_factor(lift.factor);

  // Discarded observations are ~0, so their phases are set to 1 and their
  // magnitudes zeroed for the least-squares reconstruction.
  Eigen::VectorXcd u_full = Eigen::VectorXcd::Ones(op.n());
  Eigen::VectorXd b_masked = Eigen::VectorXd::Zero(op.n());
  for (int j = 0; j < support.size(); ++j) {
    const int g = support.indices[j];
    u_full[g] = u1.values[j];
    b_masked[g] = b[g];
  }
  TruncatedSolveResult result;
  result.phase = PhaseVector{std::move(u_full)};
  result.image = reconstruct_signal(op, b_masked, result.phase);
  result.eig_ratio = lift.eig_ratio;
  result.trace = std::move(lift.trace);
  return result;
}

} // namespace phasecut
