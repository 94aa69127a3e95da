#pragma once

#include "phasecut/operator.hpp"
#include "phasecut/signal.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace phasecut {

struct BcdOptions {
  double nu = 1e-2;
  int cycles = 20;
  bool shuffle_order = false;    // randomized coordinate order per cycle
  std::uint64_t shuffle_seed = 0;
  bool early_stop = false;       // stop when per-cycle decrease < rel * ||M||_1
  double early_stop_rel = 1e-8;
  bool trace_updates = false;    // record the objective after every coordinate
                                 // update instead of per cycle (test use)
};

struct BcdTrace {
  std::vector<double> objective; // Tr(UM) per completed cycle
  int cycles = 0;
  double wall_seconds = 0.0;
};

struct FullLift {
  Eigen::MatrixXcd u_matrix; // Hermitian, unit diagonal
  BcdTrace trace;
  bool degenerate_identity = false; // no coordinate ever made progress
};

// Block coordinate descent for PhaseCut: visits each row/column in turn and
// solves that block subproblem exactly, so Tr(UM) never increases.
FullLift bcd_full(const MatrixAccess& m, const BcdOptions& opts);

struct LowRankLift {
  Eigen::MatrixXcd factor; // n x r, unit row norms, U ~ factor factor*
  int rank = 0;
  double eig_ratio = 0.0;  // max over iterations of lambda_r / lambda_1
  BcdTrace trace;
  bool degenerate_identity = false;
};

// Same sweep with U kept as a rank-r factor: each row/column assignment is a
// rank-two correction followed by re-truncation to the top r eigenpairs.
LowRankLift bcd_lowrank(const MatrixAccess& m, const BcdOptions& opts, int rank);

// Leading eigenvector normalized to unit modulus per entry, first entry made
// real positive (canonical global phase).
PhaseVector extract_phase(const Eigen::MatrixXcd& u_matrix);
PhaseVector extract_phase_factor(const Eigen::MatrixXcd& factor);

// x = A+ diag(b) u.
ComplexImage reconstruct_signal(const MaskedFourierOperator& op,
                                const Eigen::VectorXd& b, const PhaseVector& u);

struct TruncatedSolveResult {
  ComplexImage image;
  PhaseVector phase; // full length n, discarded positions set to 1
  double eig_ratio = 0.0;
  BcdTrace trace;
};

// Low-rank BCD on M1, phases off the support set to 1, reconstruction from
// the support-restricted observations.
TruncatedSolveResult solve_truncated(const MaskedFourierOperator& op,
                                     const Eigen::VectorXd& b,
                                     const SupportSelection& support,
                                     const BcdOptions& opts, int rank);

} // namespace phasecut
