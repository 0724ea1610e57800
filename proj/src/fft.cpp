#include "kglri/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace kglri {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftEngine::FftEngine(const TorusGrid& grid) : grid_(grid) {
  int ranks[3] = {grid.n, grid.n, grid.n};
  // Planning with FFTW_UNALIGNED lets us execute on plain std::vector
  // storage via fftw_execute_dft.
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_complex* dummy = fftw_alloc_complex(grid.size());
  fwd_ = fftw_plan_dft(grid.dim, ranks, dummy, dummy, FFTW_FORWARD,
                       FFTW_ESTIMATE | FFTW_UNALIGNED);
  bwd_ = fftw_plan_dft(grid.dim, ranks, dummy, dummy, FFTW_BACKWARD,
                       FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(dummy);
}

FftEngine::~FftEngine() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void FftEngine::forward(const std::complex<double>* in,
                        std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                   reinterpret_cast<fftw_complex*>(
                       const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void FftEngine::backward(const std::complex<double>* in,
                         std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                   reinterpret_cast<fftw_complex*>(
                       const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace kglri
