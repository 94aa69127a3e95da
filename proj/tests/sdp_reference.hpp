#pragma once

#include <Eigen/Dense>

#include <complex>

namespace testutil {

// Desk-scale reference for min <M,U> s.t. U >= 0, diag(U) = 1, by
// Douglas-Rachford splitting between the shifted PSD prox and the unit
// diagonal. Independent of the library under test (dense, no BCD).
inline double sdp_reference_optimum(const Eigen::MatrixXcd& m,
                                    int iterations = 4000) {
  const int n = static_cast<int>(m.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> norm_eig(m);
  const double m_norm = norm_eig.eigenvalues().cwiseAbs().maxCoeff();
  const double t = 1.0 / std::max(m_norm, 1e-12);

  const auto herm = [](const Eigen::MatrixXcd& x) {
    return Eigen::MatrixXcd(0.5 * (x + x.adjoint()));
  };
  const auto proj_psd = [&](const Eigen::MatrixXcd& x) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm(x));
    const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    return Eigen::MatrixXcd(eig.eigenvectors() * lam.asDiagonal() *
                            eig.eigenvectors().adjoint());
  };
  const auto proj_diag = [&](const Eigen::MatrixXcd& x) {
    Eigen::MatrixXcd y = herm(x);
    y.diagonal().setOnes();
    return y;
  };

  Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd u = z;
  for (int it = 0; it < iterations; ++it) {
    u = proj_psd(z - t * m);
    const Eigen::MatrixXcd w = proj_diag(2.0 * u - z);
    z += w - u;
  }
  const Eigen::MatrixXcd feasible = proj_diag(u);
  return std::real((m * feasible).trace());
}

} // namespace testutil
