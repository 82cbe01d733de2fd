#pragma once

#include "gyro/vec.hpp"

namespace gyro {

/// Inputs closer to the phase-space origin than this are treated as
/// singular (the interaction kernels blow up there).
inline constexpr double kSingularTol = 1e-14;

/// Two-particle potential -ln(max(|x|,|v|)) / (2 pi).  Symmetric in (x, v).
/// Throws std::domain_error when both blocks vanish.
double pair_potential(PhasePoint z);

/// Screened force kernel: perp(x) / (2 pi |x|^2) when |x| >= |v|, zero
/// otherwise.  Throws std::domain_error at the phase-space origin (where
/// |x| >= |v| and |x| < kSingularTol).
Vec2 force_kernel(PhasePoint z);

/// Both sides of the exact increment identity for the point-vortex part:
/// lhs = |perp(x)/|x|^2 - perp(xs)/|xs|^2|, rhs = |x - xs| / (|x||xs|).
/// The two agree exactly; rhs is further bounded by the arithmetic-mean
/// relaxation (1/|x|^2 + 1/|xs|^2) |x - xs| / 2.
struct IncrementIdentity {
  double lhs;
  double rhs;
};
IncrementIdentity increment_identity(Vec2 x, Vec2 xs);

/// Upper bound for |force_kernel(z) - force_kernel(zs)| built from the
/// screened increments plus the two gear terms that account for indicator
/// flips within delta = |x-xs| + |v-vs|.  All four blocks must be nonzero.
double force_variation_bound(PhasePoint z, PhasePoint zs);

}  // namespace gyro
