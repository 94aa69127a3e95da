#pragma once

#include <Eigen/Dense>

namespace phasecut {

// Unitary 2D DFT on a square grid: both directions carry a 1/m factor so the
// transform is an isometry and the adjoint equals the inverse. Plans are
// cached per size; concurrent calls are safe.
Eigen::MatrixXcd fft2_unitary(const Eigen::MatrixXcd& in);
Eigen::MatrixXcd ifft2_unitary(const Eigen::MatrixXcd& in);

} // namespace phasecut
