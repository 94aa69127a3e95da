#pragma once

#include "phasecut/signal.hpp"

#include <Eigen/Dense>

namespace phasecut::reference {

// Serial brute-force counterparts of the matrix-free operator, written as
// explicit DFT summations with no FFT and no parallelism. They serve as the
// independent oracle in the tests and as the baseline in the benchmark.

Eigen::VectorXcd apply_A(const MaskSet& masks, int osf, const Eigen::MatrixXcd& x);
Eigen::MatrixXcd apply_A_dagger(const MaskSet& masks, int osf, const Eigen::VectorXcd& y);
Eigen::VectorXcd apply_M(const MaskSet& masks, int osf, const Eigen::VectorXd& b,
                         const Eigen::VectorXcd& v);

// Dense n x p matrix of A, entry by entry.
Eigen::MatrixXcd dense_A(const MaskSet& masks, int osf);

} // namespace phasecut::reference
