#pragma once

#include "phasecut/operator.hpp"
#include "phasecut/signal.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace phasecut {

// One experiment cell: molecule, acquisition geometry, noise, solver choice
// and its parameters. All randomness (masks, noise) derives from seed.
struct ExperimentConfig {
  std::string pdb_path;     // empty: builtin synthetic density
  int side = 128;           // image is side x side
  int masks = 3;
  int filter_res = 1;       // masks constant on filter_res x filter_res blocks
  int osf = 2;              // oversampling factor of the Fourier grid
  double alpha = 0.0;       // Poisson noise level, 0 = noiseless
  int kept = 0;             // keep only the `kept` largest observations (0 = all)
  std::string method = "phasecut-bcdlr+refine";
  double nu = 1e-2;
  int cycles = 20;
  int rank = 2;
  int fienup_iters = 5000;
  double beta = 0.95;
  std::uint64_t seed = 0;
  std::string out_path;     // optional reconstruction output (CLI only)
};

struct ExperimentResult {
  double obs_mse = 0.0;       // || |A xhat| - b_clean ||^2 / ||b_clean||^2
  double img_residual = 0.0;  // relative residual after global-phase alignment
  bool recovered = false;     // obs_mse < 1e-4
  double obj_final = 0.0;     // ||(I - AA+) diag(b) u||^2 / ||b||^2 at the final phase
  double time_sdp_s = 0.0;    // main solver stage
  double time_refine_s = 0.0; // greedy / Fienup refinement stage
  double eig_ratio = 0.0;     // low-rank methods only, 0 otherwise
  std::vector<double> solver_objective;  // per-iteration / per-cycle trace
  std::vector<double> refine_objective;
  ComplexImage reconstruction;
  ComplexImage ground_truth;
};

// Names accepted as ExperimentConfig::method.
const std::vector<std::string>& supported_methods();

// Decorrelated per-purpose seeds derived from the config seed
// (stream 1: masks, 2: noise, 3: solver initialization).
std::uint64_t stream_seed(std::uint64_t seed, int stream);

// Ground-truth density for a config: PDB projection or the builtin blobs.
ComplexImage load_density(const ExperimentConfig& config);

// Throws std::invalid_argument on any inconsistency, including structured
// solvers (phasecut-real*, phasecut-plus) requested above their dense-scale
// cap. Called by run_pipeline before any compute.
void validate_config(const ExperimentConfig& config);

// b_clean = |A x|; b_noisy_i = sqrt(max(0, alpha * Poisson(b_clean_i^2 / alpha))),
// reducing to b_clean when alpha = 0.
std::pair<ObservationVector, ObservationVector> simulate_observations(
    const MaskedFourierOperator& op, const ComplexImage& x, double alpha,
    std::uint64_t seed);

// Full run: density -> masks -> simulate -> solve -> refine -> metrics.
ExperimentResult run_pipeline(const ExperimentConfig& config);

// Benchmark grid. Runs the Cartesian product masks x filter_res x alpha x osf,
// each cell once per seed, and appends one aggregate row per cell (seed -1,
// mean metrics, recovery probability in the `recovered` column).
struct SweepSpec {
  ExperimentConfig base;
  std::vector<int> masks_grid{1, 2, 3, 4};
  std::vector<int> res_grid{1};
  std::vector<double> alpha_grid{0.0};
  std::vector<int> osf_grid{2};
  std::vector<std::uint64_t> seeds{0};
  bool include_timings = false; // wall times break byte determinism; off by default
};

// Returns the CSV text. Byte-identical for identical specs (timings excluded
// unless requested).
std::string sweep(const SweepSpec& spec);

// Dispatch by extension: ".pgm" writes magnitudes as 16-bit binary PGM with
// the linear scale recorded in a header comment; anything else writes a CSV
// of (re, im) pairs under an "N,OSF" header. CSV round-trips exactly; PGM
// round-trips magnitudes up to quantization.
void write_image(const ComplexImage& x, const std::string& path);
ComplexImage read_image(const std::string& path);

} // namespace phasecut
