#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace phasecut {

// N x N complex signal on a pixel grid. When real_nonneg is set, construction
// checks that every value has zero imaginary part and nonnegative real part.
struct ComplexImage {
  Eigen::MatrixXcd values;
  bool real_nonneg = false;

  int side() const { return static_cast<int>(values.rows()); }
};

ComplexImage make_image(Eigen::MatrixXcd values, bool real_nonneg = false);

// k nonnegative masks of side N, constant on r x r blocks; mask 0 is
// identically one so every pixel is illuminated at least once.
struct MaskSet {
  int count = 0;
  int side = 0;
  int resolution = 1;
  std::vector<Eigen::MatrixXd> masks;
};

MaskSet make_masks(int count, int side, int resolution, std::uint64_t seed,
                   double bias = 0.5);

// Stacked Fourier magnitudes: count blocks of (osf*side)^2 entries each.
struct ObservationVector {
  int count = 0;
  int side = 0;
  int osf = 1;
  Eigen::VectorXd values;

  int grid() const { return osf * side; }
  int block_size() const { return grid() * grid(); }
  int size() const { return static_cast<int>(values.size()); }
};

ObservationVector make_observations(int count, int side, int osf,
                                    Eigen::VectorXd values);

// Complex vector with unit-modulus entries, the PhaseCut variable u.
struct PhaseVector {
  Eigen::VectorXcd values;

  int size() const { return static_cast<int>(values.size()); }
};

// Checks | |u_i| - 1 | <= 1e-12 for all entries.
PhaseVector make_phase_vector(Eigen::VectorXcd values);

// Normalizes each entry to unit modulus; entries below tol map to 1.
PhaseVector normalize_phases(const Eigen::VectorXcd& values, double tol = 1e-12);

// Ordered distinct 0-based indices into an observation vector.
struct SupportSelection {
  std::vector<int> indices;

  int size() const { return static_cast<int>(indices.size()); }
};

// Indices of the m largest entries of b, ties broken by lowest index.
SupportSelection select_support(const Eigen::VectorXd& b, int m);

// Removes the global phase ambiguity: returns exp(i theta*) xhat with theta*
// minimizing ||exp(i theta) xhat - ref||_2, plus the relative squared residual.
std::pair<ComplexImage, double> align_global_phase(const ComplexImage& xhat,
                                                   const ComplexImage& ref);

} // namespace phasecut
