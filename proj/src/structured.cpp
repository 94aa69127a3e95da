#include "phasecut/structured.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace phasecut {
namespace {

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (x + x.transpose()));
  Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXcd project_psd(const Eigen::MatrixXcd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (x + x.adjoint()));
  Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
}

// Consensus Douglas-Rachford over m constraint sets plus a linear objective:
// min <C, X> over the intersection. One copy per set; prox of the consensus
// block is an average shifted by the objective gradient.
template <typename Mat>
struct ConsensusDR {
  using Projector = std::function<Mat(const Mat&)>;

  Mat solve(const Mat& c, std::vector<Projector> projectors,
            const SplitOptions& opts, bool* converged, int* iterations) {
    const int sets = static_cast<int>(projectors.size());
    const double c_norm = c.norm();
    const double step = opts.step > 0.0 ? opts.step : 1.0 / std::max(c_norm, 1e-12);
    std::vector<Mat> y(sets, Mat::Zero(c.rows(), c.cols()));
    Mat mean = Mat::Zero(c.rows(), c.cols());
    *converged = false;
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
      mean.setZero();
      for (const Mat& yi : y) mean += yi;
      mean = (mean - step * c) / sets;
      double residual = 0.0;
      for (int s = 0; s < sets; ++s) {
        Mat reflected = 2.0 * mean - y[s];
        Mat projected = projectors[s](reflected);
        residual = std::max(residual, (projected - mean).norm());
        y[s] += projected - mean;
      }
      if (residual <= opts.tolerance * std::max(1.0, mean.norm())) {
        *converged = true;
        ++it;
        break;
      }
    }
    *iterations = it;
    mean.setZero();
    for (const Mat& yi : y) mean += yi;
    mean = (mean - step * c) / sets;
    return mean;
  }
};

void project_pair_traces(Eigen::MatrixXd& v, int n) {
  for (int i = 0; i < n; ++i) {
    const double excess = 0.5 * (v(i, i) + v(n + i, n + i) - 1.0);
    v(i, i) -= excess;
    v(n + i, n + i) -= excess;
  }
}

// Nearest Hermitian Toeplitz matrix: average along diagonals.
Eigen::VectorXcd toeplitz_average(const Eigen::MatrixXcd& t) {
  const int p = static_cast<int>(t.rows());
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(p);
  for (int d = 0; d < p; ++d) {
    std::complex<double> acc(0.0, 0.0);
    for (int i = d; i < p; ++i) acc += t(i, i - d);
    for (int i = d; i < p; ++i) acc += std::conj(t(i - d, i));
    y[d] = acc / (2.0 * (p - d));
  }
  y[0] = std::complex<double>(y[0].real(), 0.0);
  return y;
}

} // namespace

Eigen::MatrixXd t_embed(const Eigen::MatrixXcd& z) {
  const long r = z.rows();
  const long c = z.cols();
  Eigen::MatrixXd out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = z.real();
  out.topRightCorner(r, c) = -z.imag();
  out.bottomLeftCorner(r, c) = z.imag();
  out.bottomRightCorner(r, c) = z.real();
  return out;
}

Eigen::MatrixXcd build_dense_A(const MaskedFourierOperator& op,
                               const std::vector<int>* rows, int cap) {
  const int row_count = rows ? static_cast<int>(rows->size()) : op.n();
  if (row_count > cap)
    throw std::invalid_argument("build_dense_A: size over safety cap");
  const int N = op.side();
  Eigen::MatrixXcd a(row_count, op.p());
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(N, N);
  for (int col = 0; col < op.p(); ++col) {
    basis(col % N, col / N) = 1.0;
    Eigen::VectorXcd full = op.apply_A(basis);
    basis(col % N, col / N) = 0.0;
    if (rows) {
      for (int r = 0; r < row_count; ++r) a(r, col) = full[(*rows)[r]];
    } else {
      a.col(col) = full;
    }
  }
  return a;
}

RealEmbedding build_real_embedding(const Eigen::MatrixXcd& a,
                                   const Eigen::VectorXd& b) {
  const long n = a.rows();
  if (b.size() != n) throw std::invalid_argument("build_real_embedding: length mismatch");
  RealEmbedding emb;
  emb.n = static_cast<int>(n);
  emb.a2.resize(2 * n, a.cols());
  emb.a2.topRows(n) = a.real();
  emb.a2.bottomRows(n) = a.imag();
  emb.b2.resize(2 * n);
  emb.b2.head(n) = b;
  emb.b2.tail(n) = b;
  emb.pinv_a2 = emb.a2.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::MatrixXd residual_proj =
      Eigen::MatrixXd::Identity(2 * n, 2 * n) - emb.a2 * emb.pinv_a2;
  emb.m2 = emb.b2.asDiagonal() * residual_proj * emb.b2.asDiagonal();
  emb.m2 = 0.5 * (emb.m2 + emb.m2.transpose());
  emb.recon = emb.pinv_a2 * emb.b2.asDiagonal();
  return emb;
}

namespace {

RealSolveResult finish_real(const RealEmbedding& emb, Eigen::MatrixXd v_matrix,
                            bool converged, int iterations) {
  const int n = emb.n;
  v_matrix = 0.5 * (v_matrix + v_matrix.transpose());
  project_pair_traces(v_matrix, n);
  RealSolveResult result;
  result.objective = (v_matrix.array() * emb.m2.array()).sum();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v_matrix);
  Eigen::VectorXd leading = eig.eigenvectors().col(2 * n - 1) *
                            std::sqrt(std::max(0.0, eig.eigenvalues()[2 * n - 1]));
  Eigen::VectorXd v(2 * n);
  for (int i = 0; i < n; ++i) {
    const double norm = std::hypot(leading[i], leading[n + i]);
    if (norm > 1e-12) {
      v[i] = leading[i] / norm;
      v[n + i] = leading[n + i] / norm;
    } else {
      v[i] = 1.0;
      v[n + i] = 0.0;
    }
  }
  result.x = emb.recon * v;
  result.v = std::move(v);
  result.v_matrix = std::move(v_matrix);
  result.converged = converged;
  result.iterations = iterations;
  return result;
}

} // namespace

RealSolveResult solve_phasecut_real(const RealEmbedding& emb,
                                    const SplitOptions& opts) {
  const int n = emb.n;
  using DR = ConsensusDR<Eigen::MatrixXd>;
  std::vector<DR::Projector> projectors;
  projectors.push_back([](const Eigen::MatrixXd& x) { return project_psd(x); });
  projectors.push_back([n](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd v = 0.5 * (x + x.transpose());
    project_pair_traces(v, n);
    return v;
  });
  bool converged = false;
  int iterations = 0;
  Eigen::MatrixXd v_matrix =
      DR().solve(emb.m2, std::move(projectors), opts, &converged, &iterations);
  return finish_real(emb, std::move(v_matrix), converged, iterations);
}

RealSolveResult solve_phasecut_real_nonneg(const RealEmbedding& emb,
                                           const SplitOptions& opts) {
  const int n = emb.n;
  // Phase 1: minimize the objective over {PSD} ∩ {pair traces = 1}, exactly
  // as in the unconstrained real solve.
  RealSolveResult base = solve_phasecut_real(emb, opts);
  // Phase 2: restore feasibility of the extra constraint G V G^T >= 0
  // (G = pinv(A2) diag(b2)) by cyclic projections.  The nonnegativity set
  // is an intersection of halfspaces {<sym(g_i g_j^T), V> >= 0}, one per
  // image entry, each with a closed-form exact projection; a full clip of
  // the image cannot be pushed back through pinv(G) stably because G is
  // ill-conditioned.  Each cycle projects onto every currently violated
  // halfspace (updating the image incrementally through H = G G^T), then
  // onto the PSD cone and the pair-trace affine set.
  const Eigen::MatrixXd& g = emb.recon;  // p x 2n
  const int p = static_cast<int>(g.rows());
  const Eigen::MatrixXd h = g * g.transpose();
  const double tol = std::max(opts.tolerance, 1e-9);
  Eigen::MatrixXd v = base.v_matrix;
  bool feasible = false;
  int polish_iters = 0;
  const int polish_cap = 600;
  for (int it = 0; it < polish_cap; ++it) {
    Eigen::MatrixXd image = g * v * g.transpose();
    if (it % 5 == 0 && image.minCoeff() >= -tol) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> check(
          v, Eigen::EigenvaluesOnly);
      if (check.eigenvalues().minCoeff() >= -tol) {
        feasible = true;
        polish_iters = it;
        break;
      }
    }
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < i; ++j) {
        const double c = image(i, j);
        if (c >= 0.0) continue;
        const double an2 = 0.5 * (h(i, i) * h(j, j) + h(i, j) * h(i, j));
        if (an2 <= 0.0) continue;
        const double lam = -c / an2;
        v.noalias() += (0.5 * lam) * (g.row(i).transpose() * g.row(j) +
                                      g.row(j).transpose() * g.row(i));
        image.noalias() += (0.5 * lam) * (h.col(i) * h.col(j).transpose() +
                                          h.col(j) * h.col(i).transpose());
      }
    }
    v = project_psd(v);
    project_pair_traces(v, n);
    polish_iters = it + 1;
  }
  return finish_real(emb, std::move(v), base.converged && feasible,
                     base.iterations + polish_iters);
}

Eigen::MatrixXcd build_toeplitz(const Eigen::VectorXcd& y) {
  const int p = static_cast<int>(y.size());
  if (p < 1) throw std::invalid_argument("build_toeplitz: empty first column");
  Eigen::MatrixXcd t(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      t(i, j) = i >= j ? y[i - j] : std::conj(y[j - i]);
  return t;
}

std::vector<ToeplitzSlice> separable_toeplitz_slices(const MaskedFourierOperator& op) {
  const int m = op.grid();
  const int bs = op.block_size();
  std::vector<ToeplitzSlice> slices;
  for (int l = 0; l < op.mask_count(); ++l) {
    ToeplitzSlice row_slice;  // f0 = 0: transform of the row-marginal
    ToeplitzSlice col_slice;  // f1 = 0: transform of the column-marginal
    for (int f = 0; f < m; ++f) {
      row_slice.indices.push_back(l * bs + f);
      col_slice.indices.push_back(l * bs + f * m);
    }
    slices.push_back(std::move(row_slice));
    slices.push_back(std::move(col_slice));
  }
  return slices;
}

PlusSolveResult solve_phasecut_plus(const Eigen::MatrixXcd& m,
                                    const Eigen::VectorXd& b,
                                    const std::vector<ToeplitzSlice>& slices,
                                    const SplitOptions& opts) {
  const int n = static_cast<int>(m.rows());
  if (b.size() != n) throw std::invalid_argument("solve_phasecut_plus: length mismatch");
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  c.topLeftCorner(n, n) = m;

  using DR = ConsensusDR<Eigen::MatrixXcd>;
  std::vector<DR::Projector> projectors;
  projectors.push_back([](const Eigen::MatrixXcd& x) { return project_psd(x); });
  projectors.push_back([n](const Eigen::MatrixXcd& x) {
    Eigen::MatrixXcd w = 0.5 * (x + x.adjoint());
    for (int i = 0; i < n; ++i) w(i, i) = 1.0;
    w(n, n) = 1.0;
    w(0, n) = 1.0; // u_0 = 1 pins the global phase
    w(n, 0) = 1.0;
    return w;
  });
  projectors.push_back([n, &b, &slices](const Eigen::MatrixXcd& x) {
    Eigen::MatrixXcd w = 0.5 * (x + x.adjoint());
    for (const ToeplitzSlice& slice : slices) {
      const int p = static_cast<int>(slice.indices.size());
      Eigen::VectorXcd y(p);
      for (int q = 0; q < p; ++q) y[q] = b[slice.indices[q]] * w(slice.indices[q], n);
      Eigen::VectorXcd fixed = toeplitz_average(project_psd(build_toeplitz(y)));
      for (int q = 0; q < p; ++q) {
        const double scale = b[slice.indices[q]];
        if (scale > 1e-12) {
          w(slice.indices[q], n) = fixed[q] / scale;
          w(n, slice.indices[q]) = std::conj(w(slice.indices[q], n));
        }
      }
    }
    return w;
  });

  bool converged = false;
  int iterations = 0;
  Eigen::MatrixXcd w =
      DR().solve(c, std::move(projectors), opts, &converged, &iterations);
  w = 0.5 * (w + w.adjoint());

  PlusSolveResult result;
  result.u_matrix = w.topLeftCorner(n, n);
  for (int i = 0; i < n; ++i) result.u_matrix(i, i) = 1.0;
  result.u = w.col(n).head(n);
  result.objective = std::real((result.u_matrix * m).trace());
  result.converged = converged;
  result.iterations = iterations;
  double min_eig = 0.0;
  for (const ToeplitzSlice& slice : slices) {
    Eigen::VectorXcd y(slice.indices.size());
    for (size_t q = 0; q < slice.indices.size(); ++q)
      y[q] = b[slice.indices[q]] * result.u[slice.indices[q]];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(build_toeplitz(y));
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
  }
  result.toeplitz_min_eig = min_eig;
  return result;
}

} // namespace phasecut
