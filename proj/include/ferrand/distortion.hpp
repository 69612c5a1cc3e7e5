#pragma once

// Quasiconformal distortion functions phi_{K} and psi_{K} of the plane,
// evaluated through the modulus-division form
//
//     mu(phi_K(r)) = mu(r) / K,
//
// which is what the defining gamma-inversion reduces to for n = 2.  All
// intermediate radii are carried as Modulus pairs so that values crowding
// either endpoint of (0,1) keep full relative accuracy.

#include <cmath>
#include <stdexcept>

#include "ferrand/capacity.hpp"
#include "ferrand/elliptic.hpp"

namespace ferrand {

struct DistortionParams {
    double K = 1.0;  // distortion parameter, K > 0
    int n = 2;       // dimension; exact evaluation requires n = 2

    void validate() const {
        if (!(K > 0.0)) throw std::domain_error("DistortionParams: K must be positive");
        if (n != 2)
            throw std::domain_error("DistortionParams: exact evaluation requires n = 2");
    }
};

/// phi_K(r) with both components; defined on the open interval.
inline Modulus phi_pair(double K, const Modulus& r) {
    if (!(K > 0.0)) throw std::domain_error("phi_pair: K must be positive");
    return mu_inverse(mu(r) / K);
}

/// phi_K(r) on [0,1]; the endpoints are fixed points of the definition
/// and bypass the singular formula.
inline double phi(const DistortionParams& params, double r) {
    params.validate();
    if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("phi: argument outside [0,1]");
    if (r == 0.0) return 0.0;
    if (r == 1.0) return 1.0;
    return phi_pair(params.K, Modulus::from_r(r)).r;
}

/// psi_K(r) = sqrt(1 - phi_{1/K}(sqrt(1-r^2))^2), evaluated as the
/// complement of phi_{1/K} at the conjugate point.
inline double psi(const DistortionParams& params, double r) {
    params.validate();
    if (!(r >= 0.0 && r <= 1.0)) throw std::domain_error("psi: argument outside [0,1]");
    if (r == 0.0) return 0.0;
    if (r == 1.0) return 1.0;
    return phi_pair(1.0 / params.K, Modulus::from_r(r).conjugate()).rc;
}

/// tau_n^{-1}(K tau_n(t)) expressed through phi:
/// (1 - phi_K(1/sqrt(1+t))^2) / phi_K(1/sqrt(1+t))^2.
/// Agrees with the directly composed inverse; the two routes share no
/// numerics and cross-validate each other.
inline double tau_inv_scaled(const DistortionParams& params, double t) {
    params.validate();
    if (!(t > 0.0)) throw std::domain_error("tau_inv_scaled: argument must be positive");
    const Modulus arg{1.0 / std::sqrt(1.0 + t), std::sqrt(t / (1.0 + t))};
    const Modulus f = phi_pair(params.K, arg);
    const double q = f.rc / f.r;
    return q * q;
}

}  // namespace ferrand
