#pragma once

#include <cmath>

namespace shortrate::numerics {

// (e^{x t} - 1) / x, with the removable singularity at x = 0 handled by a
// four-term series when |x| < 1e-8.
inline double expm1_over(double x, double t) {
    if (std::abs(x) < 1e-8) {
        const double xt = x * t;
        return t * (1.0 + xt / 2.0 * (1.0 + xt / 3.0 * (1.0 + xt / 4.0)));
    }
    return std::expm1(x * t) / x;
}

// Integer-exponent power that leaves 0^0 = 1 and avoids pow() for the
// common small cases.
inline double ipow(double x, int n) {
    double r = 1.0;
    bool neg = n < 0;
    unsigned k = static_cast<unsigned>(neg ? -n : n);
    while (k) {
        if (k & 1u) r *= x;
        x *= x;
        k >>= 1u;
    }
    return neg ? 1.0 / r : r;
}

// r^p for real p with r >= 0, treating 0^0 as 1 and returning +inf for 0^p, p < 0.
inline double rpow(double r, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return r;
    if (p == 0.5) return std::sqrt(r);
    if (p == 2.0) return r * r;
    return std::pow(r, p);
}

}  // namespace shortrate::numerics
