#pragma once

namespace mpsrg {

/// Complete elliptic integral of the first kind in the modulus convention,
/// K(k) = \int_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta), for 0 <= k < 1.
/// Evaluated by the arithmetic-geometric mean; accurate to ~1e-15 relative.
/// Throws InvalidInput for k < 0 or k >= 1.
double elliptic_k(double modulus);

} // namespace mpsrg
