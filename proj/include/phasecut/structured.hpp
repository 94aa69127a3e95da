#pragma once

#include "phasecut/operator.hpp"
#include "phasecut/signal.hpp"

#include <Eigen/Dense>

#include <vector>

namespace phasecut {

// T(Z) = [[Re Z, -Im Z], [Im Z, Re Z]], the real embedding homomorphism.
Eigen::MatrixXd t_embed(const Eigen::MatrixXcd& z);

// Dense n x p matrix of A by basis sweep, optionally restricted to a row
// subset (desk scale only; guarded by cap on the row count).
Eigen::MatrixXcd build_dense_A(const MaskedFourierOperator& op,
                               const std::vector<int>* rows = nullptr,
                               int cap = 4096);

// Real embedding of the phase problem for real signals: A2 = [Re A; Im A],
// B2 = diag(b; b), M2 = B2^T (I - A2 A2+) B2.
struct RealEmbedding {
  int n = 0;                 // complex observation count (matrix dims are 2n)
  Eigen::MatrixXd a2;        // 2n x p
  Eigen::MatrixXd pinv_a2;   // p x 2n
  Eigen::VectorXd b2;        // length 2n
  Eigen::MatrixXd m2;        // 2n x 2n symmetric PSD
  Eigen::MatrixXd recon;     // pinv(A2) * diag(b2): x = recon * v
};

RealEmbedding build_real_embedding(const Eigen::MatrixXcd& a,
                                   const Eigen::VectorXd& b);

struct SplitOptions {
  int max_iterations = 5000;
  double tolerance = 1e-6;
  double step = 0.0; // 0: scaled automatically from ||C||
};

struct RealSolveResult {
  Eigen::MatrixXd v_matrix;  // 2n x 2n, pair traces = 1, PSD within tolerance
  Eigen::VectorXd v;         // length 2n, unit pair norms
  Eigen::VectorXd x;         // length p real image
  double objective = 0.0;    // Tr(V M2)
  bool converged = false;
  int iterations = 0;
};

// PhaseCutR: min Tr(V M2) s.t. V_ii + V_{n+i,n+i} = 1, V >= 0, solved by
// Douglas-Rachford splitting over PSD and affine projections.
RealSolveResult solve_phasecut_real(const RealEmbedding& emb,
                                    const SplitOptions& opts = {});

// Same with the elementwise constraint (A2+ B2) V (A2+ B2)^T >= 0 enforced
// by an additional projection block.
RealSolveResult solve_phasecut_real_nonneg(const RealEmbedding& emb,
                                           const SplitOptions& opts = {});

// Hermitian Toeplitz matrix with first column y (conjugates above the
// diagonal); PSD exactly when y is the DFT of a nonnegative signal.
Eigen::MatrixXcd build_toeplitz(const Eigen::VectorXcd& y);

// One Bochner constraint: the observation indices (in order) whose phased
// values diag(b)u form the first column of a Toeplitz-PSD matrix.
struct ToeplitzSlice {
  std::vector<int> indices;
};

// Separable 2D reading of the Bochner constraint: the DC row and DC column
// of each mask block are 1D transforms of nonnegative marginals.
std::vector<ToeplitzSlice> separable_toeplitz_slices(const MaskedFourierOperator& op);

struct PlusSolveResult {
  Eigen::MatrixXcd u_matrix; // n x n, diag = 1
  Eigen::VectorXcd u;        // length n, u_0 = 1
  double objective = 0.0;    // Tr(UM)
  double toeplitz_min_eig = 0.0;
  bool converged = false;
  int iterations = 0;
};

// PhaseCut+: min Tr(UM) s.t. diag(U) = 1, u_0 = 1, B_j(diag(b)u) >= 0 per
// slice, [[U, u], [u*, 1]] >= 0. Desk scale, dense M.
PlusSolveResult solve_phasecut_plus(const Eigen::MatrixXcd& m,
                                    const Eigen::VectorXd& b,
                                    const std::vector<ToeplitzSlice>& slices,
                                    const SplitOptions& opts = {});

} // namespace phasecut
