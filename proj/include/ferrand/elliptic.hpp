#pragma once

// Complete elliptic integrals and the Grotzsch ring modulus mu(r),
// computed through the arithmetic-geometric mean.  Everything here is
// double precision; inputs are validated and divergence is an error.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ferrand {

inline constexpr double kAgmRelTol = 1e-15;
inline constexpr int kAgmMaxIter = 64;

struct AgmResult {
    double value = 0.0;
    int iterations = 0;
    double residual = 0.0;  // final relative gap |a-b|/a
};

inline AgmResult agm_detailed(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::domain_error("agm: non-finite input");
    if (a <= 0.0 || b < 0.0)
        throw std::domain_error("agm: requires a > 0, b >= 0");
    if (b == 0.0) return {0.0, 0, 0.0};  // geometric mean collapses
    AgmResult res;
    for (res.iterations = 0; res.iterations < kAgmMaxIter; ++res.iterations) {
        res.residual = std::fabs(a - b) / a;
        if (res.residual < kAgmRelTol) {
            res.value = a;
            return res;
        }
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    throw std::runtime_error("agm: no convergence within " +
                             std::to_string(kAgmMaxIter) + " iterations");
}

inline double agm(double a, double b) { return agm_detailed(a, b).value; }

// A point r in (0,1) carried together with its conjugate sqrt(1-r^2).
// Keeping both components explicit preserves accuracy at either end of
// the interval, where one of them is far below the rounding radius of
// the other.
struct Modulus {
    double r;
    double rc;

    static Modulus from_r(double r) {
        if (!(r > 0.0 && r < 1.0))
            throw std::domain_error("Modulus: r outside (0,1)");
        return {r, std::sqrt((1.0 - r) * (1.0 + r))};
    }
    static Modulus from_rc(double rc) {
        Modulus m = from_r(rc);
        return {m.rc, m.r};
    }
    Modulus conjugate() const { return {rc, r}; }
};

/// Complete elliptic integral of the first kind, K(r) = pi/(2 agm(1, r')).
inline double ellint_K(double r) {
    if (!(r >= 0.0 && r < 1.0))
        throw std::domain_error("ellint_K: modulus outside [0,1)");
    const double rc = std::sqrt((1.0 - r) * (1.0 + r));
    return M_PI / (2.0 * agm(1.0, rc));
}

/// Grotzsch modulus mu(r) = (pi/2) K(r')/K(r), strictly decreasing on (0,1).
inline double mu(const Modulus& m) {
    return M_PI_2 * agm(1.0, m.rc) / agm(1.0, m.r);
}

inline double mu(double r) {
    if (!(r > 0.0 && r < 1.0))
        throw std::domain_error("mu: argument outside (0,1)");
    return mu(Modulus::from_r(r));
}

namespace detail {

// Jacobi theta constants at nome q.  Only called with q <= exp(-pi),
// where five terms already sit below double rounding.
inline double theta2(double q) {
    const double q2 = q * q, q6 = q2 * q2 * q2;
    return 2.0 * std::pow(q, 0.25) *
           (1.0 + q2 + q6 + q6 * q6 + q6 * q6 * q6 * q2);
}
inline double theta3(double q) {
    const double q4 = q * q * q * q, q9 = q4 * q4 * q;
    return 1.0 + 2.0 * (q + q4 + q9 + q4 * q4 * q4 * q4 + q9 * q9 * q4 * q * q * q);
}
inline double theta4(double q) {
    const double q4 = q * q * q * q, q9 = q4 * q4 * q;
    return 1.0 + 2.0 * (-q + q4 - q9 + q4 * q4 * q4 * q4 - q9 * q9 * q4 * q * q * q);
}

inline Modulus mu_inverse_large(double y) {
    // y >= pi/2, so q <= exp(-pi) ~ 0.0432
    const double q = std::exp(-2.0 * y);
    const double t3 = theta3(q);
    const double k = theta2(q) / t3;
    const double kc = theta4(q) / t3;
    return {k * k, kc * kc};
}

}  // namespace detail

/// Inverse of mu, returned with both components accurate: for y below
/// pi/2 the value crowds the upper endpoint and is recovered from the
/// functional identity mu(r) mu(r') = pi^2/4 applied to the conjugate.
inline Modulus mu_inverse(double y) {
    if (!(y > 0.0) || !std::isfinite(y))
        throw std::domain_error("mu_inverse: argument must be positive and finite");
    if (y >= M_PI_2) return detail::mu_inverse_large(y);
    return detail::mu_inverse_large(M_PI * M_PI / (4.0 * y)).conjugate();
}

}  // namespace ferrand
