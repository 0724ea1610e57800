#pragma once

#include <iosfwd>

namespace kglri {

struct SelftestOptions {
  // Replaces the Psi2 branch threshold with a deliberately broken value so
  // the branch-continuity check must fail; exercises failure reporting.
  bool corrupt_psi2_threshold = false;
};

// Fast invariant battery (coefficient spot checks, Parseval, transform round
// trip, linear exactness, one-step defect ratio, zero fixed point, graceful
// energy skip). Prints one table row per check; returns the number of
// failures.
int run_selftest(std::ostream& os, const SelftestOptions& opts = {});

}  // namespace kglri
