#pragma once

#include "phasecut/operator.hpp"
#include "phasecut/signal.hpp"

#include <Eigen/Dense>

#include <vector>

namespace phasecut {

struct GreedyTrace {
  std::vector<double> objective; // one value per iteration / cycle
  int iterations = 0;
  double wall_seconds = 0.0;
};

struct GreedyResult {
  Eigen::VectorXcd y;
  GreedyTrace trace;
};

// Alternating projections between range(A) and the modulus constraint |y|=b.
// The reported objective is ||(I - AA+)y||^2 / ||b||^2. Entries where the
// range projection vanishes keep their previous phase.
GreedyResult gerchberg_saxton(const MaskedFourierOperator& op,
                              const Eigen::VectorXd& b,
                              const Eigen::VectorXcd& y0, int iters);

// Input-output variant: y <- y - beta (y - b o phase(AA+ y)). At beta = 1 the
// iteration reduces to Gerchberg-Saxton.
GreedyResult fienup(const MaskedFourierOperator& op, const Eigen::VectorXd& b,
                    const Eigen::VectorXcd& y0, double beta, int iters);

struct GreedyPhaseResult {
  PhaseVector u;
  GreedyTrace trace;
};

// Cyclic coordinate descent on u* M u over unit-modulus u: each step sets u_i
// to the exact single-coordinate minimizer, so the objective never increases.
GreedyPhaseResult greedy_phase(const MatrixAccess& m, const PhaseVector& u0,
                               int cycles);

} // namespace phasecut
