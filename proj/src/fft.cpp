#include "phasecut/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace phasecut {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// fftw_plan_dft_2d is not thread-safe; executions on distinct buffers are.
std::mutex g_plan_mutex;

const PlanPair& plans_for(int m) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> scratch_in(static_cast<size_t>(m) * m);
  std::vector<std::complex<double>> scratch_out(scratch_in.size());
  auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
  auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
  PlanPair p;
  // FFTW_ESTIMATE keeps plan selection (and hence floating-point results)
  // deterministic; FFTW_UNALIGNED allows execution on arbitrary buffers.
  p.fwd = fftw_plan_dft_2d(m, m, in, out, FFTW_FORWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.bwd = fftw_plan_dft_2d(m, m, in, out, FFTW_BACKWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (!p.fwd || !p.bwd) throw std::runtime_error("fftw plan creation failed");
  return cache.emplace(m, p).first->second;
}

Eigen::MatrixXcd transform(const Eigen::MatrixXcd& in, bool forward) {
  if (in.rows() != in.cols()) throw std::invalid_argument("fft2: square grid required");
  const int m = static_cast<int>(in.rows());
  const PlanPair& p = plans_for(m);
  Eigen::MatrixXcd out(m, m);
  auto* src = const_cast<fftw_complex*>(
      reinterpret_cast<const fftw_complex*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(forward ? p.fwd : p.bwd, src, dst);
  out *= 1.0 / m;
  return out;
}

} // namespace

Eigen::MatrixXcd fft2_unitary(const Eigen::MatrixXcd& in) { return transform(in, true); }
Eigen::MatrixXcd ifft2_unitary(const Eigen::MatrixXcd& in) { return transform(in, false); }

} // namespace phasecut
