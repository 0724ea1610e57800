#pragma once

#include <complex>
#include <cstddef>

#include "kglri/grid.hpp"

namespace kglri {

// Complex-to-complex FFT plans for one grid. Planning is serialized behind a
// global mutex (the FFTW planner is not thread-safe); execution on distinct
// buffers is safe from multiple threads. Plans use FFTW_ESTIMATE so plan
// selection, and therefore floating-point output, is reproducible run to run.
class FftEngine {
 public:
  explicit FftEngine(const TorusGrid& grid);
  ~FftEngine();

  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  const TorusGrid& grid() const { return grid_; }

  // Unnormalized DFT with e^{-2*pi*i jk/n} kernel.
  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  // Unnormalized inverse kernel e^{+2*pi*i jk/n}.
  void backward(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  TorusGrid grid_;
  void* fwd_ = nullptr;  // fftw_plan, kept opaque here
  void* bwd_ = nullptr;
};

}  // namespace kglri
