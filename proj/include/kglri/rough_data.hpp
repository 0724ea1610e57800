#pragma once

#include <cstdint>

#include "kglri/field.hpp"

namespace kglri {

// Random initial data of prescribed Sobolev regularity.
//
// Construction: u0_hat(xi) = Z_xi (1+|xi_phys|^2)^{-(theta+1/2)/2} and
// v0_hat(xi) = W_xi (1+|xi_phys|^2)^{-(theta-1/2)/2}, with Z, W i.i.d.
// uniform complex in the unit square, Hermitian-symmetrized
// (Z_{-xi} = conj(Z_xi)). This is the critical decay for H^theta in one
// dimension: u0 lies in H^s for every s < theta, the H^theta mass of the
// dyadic shell 2^k <= |xi| < 2^{k+1} is flat in k, and measured norms at or
// above theta grow with resolution (logarithmically at theta itself,
// polynomially above). v0 sits at the H^{theta-1} edge the same way.
//
// The RNG is keyed by the signed mode vector, not by draw order, so refining
// n extends the data instead of reshuffling it: shared modes are
// bit-identical across resolutions. Both fields are scaled by the H^theta
// (resp. H^{theta-1}) norm of the underlying function, accumulated over a
// fixed mode band independent of the grid (2^16 modes per axis for d = 1,
// 2^10 for d = 2, 2^7 for d = 3). The band-limited underlying function has
// unit norm exactly; a grid resolving modes up to K carries the fraction
// sqrt(S(K)/S(band)) of it, S(K) = 1 + 2 sum_{1 <= xi <= K} <xi>^{-1}
// (about 0.72 at n = 256), and never more than 1. Nyquist rows are zeroed:
// an unpaired mode at one resolution would become a paired interior mode at
// the next and could not keep both values.
struct RoughData {
  double theta = 0.0;
  std::uint64_t seed = 0;
  SpectralField u0;
  SpectralField v0;
};

RoughData rough_data(double theta, std::uint64_t seed, const TorusGrid& grid);

// Smooth single-mode preset: u0 = cos(x_1), v0 = 0.
RoughData single_mode_data(const TorusGrid& grid);

}  // namespace kglri
