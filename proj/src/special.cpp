#include <cmath>
#include <numbers>

#include "mpsrg/errors.hpp"
#include "mpsrg/special.hpp"

namespace mpsrg {

double elliptic_k(double modulus) {
    if (!(modulus >= 0.0) || modulus >= 1.0) {
        throw InvalidInput("elliptic_k: modulus must lie in [0, 1)");
    }
    double a = 1.0;
    double b = std::sqrt((1.0 - modulus) * (1.0 + modulus));
    for (int i = 0; i < 64 && std::abs(a - b) >= 1e-15; ++i) {
        const double am = 0.5 * (a + b);
        const double gm = std::sqrt(a * b);
        a = am;
        b = gm;
    }
    return std::numbers::pi / (2.0 * a);
}

} // namespace mpsrg
