#include "phasecut/operator.hpp"
#include "phasecut/reference.hpp"
#include "phasecut/rng.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (s < best) best = s;
  }
  return best;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"FFT/OpenMP operator kernels vs the serial naive-DFT reference"};
  int side = 16;
  int mask_count = 3;
  int osf = 2;
  int reps = 5;
  app.add_option("--n", side, "image side length");
  app.add_option("--masks", mask_count, "number of masks");
  app.add_option("--osf", osf, "oversampling factor");
  app.add_option("--reps", reps, "repetitions (best time reported)");
  CLI11_PARSE(app, argc, argv);

  const phasecut::MaskSet masks =
      phasecut::make_masks(mask_count, side, 1, 7);
  const phasecut::MaskedFourierOperator op(masks, osf);

  phasecut::Rng rng(11);
  Eigen::MatrixXcd x(side, side);
  for (int c = 0; c < side; ++c)
    for (int r = 0; r < side; ++r) x(r, c) = {rng.normal(), rng.normal()};
  Eigen::VectorXcd y(op.n());
  Eigen::VectorXd b(op.n());
  for (int i = 0; i < op.n(); ++i) {
    y[i] = {rng.normal(), rng.normal()};
    b[i] = std::abs(rng.normal());
  }

  volatile double sink = 0.0;
  struct Row {
    const char* name;
    std::function<void()> fast;
    std::function<void()> slow;
  };
  const Row rows[] = {
      {"apply_A",
       [&] { sink += op.apply_A(x).squaredNorm(); },
       [&] { sink += phasecut::reference::apply_A(masks, osf, x).squaredNorm(); }},
      {"apply_A_dagger",
       [&] { sink += op.apply_A_dagger(y).squaredNorm(); },
       [&] {
         sink += phasecut::reference::apply_A_dagger(masks, osf, y).squaredNorm();
       }},
      {"apply_M",
       [&] { sink += op.apply_M(b, y).squaredNorm(); },
       [&] { sink += phasecut::reference::apply_M(masks, osf, b, y).squaredNorm(); }},
  };

  std::printf("n=%d masks=%d osf=%d (best of %d)\n", side, mask_count, osf,
              reps);
  std::printf("%-16s %14s %14s %9s\n", "kernel", "fft+omp (s)", "serial (s)",
              "speedup");
  for (const Row& row : rows) {
    const double fast = time_best_of(reps, row.fast);
    const double slow = time_best_of(reps, row.slow);
    std::printf("%-16s %14.6f %14.6f %8.1fx\n", row.name, fast, slow,
                slow / fast);
  }
  (void)sink;
  return 0;
}
