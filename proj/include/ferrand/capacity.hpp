#pragma once

// Grotzsch capacity gamma_n and Teichmuller capacity tau_n with certified
// monotone inverses.  The plane case n = 2 evaluates exactly through the
// Grotzsch modulus:
//
//     gamma_2(t) = 2 pi / mu(1/t),        t > 1,
//     tau_2(s)   = gamma_2(sqrt(1+s))/2,  s > 0,
//
// and the second line, the half-plane/full-plane identity
// gamma_n(t) = 2^{n-1} tau_n(t^2 - 1), is exact by construction.
// Dimensions n >= 3 have no closed form; the evaluator keeps the
// identity and inversion machinery generic behind a pluggable gamma.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "ferrand/elliptic.hpp"
#include "ferrand/root_finding.hpp"

namespace ferrand {

// --- exact plane evaluations -------------------------------------------

/// gamma_2(t) = 2 pi / mu(1/t) for t > 1.
inline double gamma2(double t) {
    if (!(t > 1.0))
        throw std::domain_error("gamma2: argument must exceed 1");
    if (std::isinf(t)) throw std::domain_error("gamma2: argument must be finite");
    // complement of 1/t computed from t-1 so that t near 1 keeps accuracy
    const double r = 1.0 / t;
    const double rc = std::sqrt((t - 1.0) * (t + 1.0)) / t;
    return 2.0 * M_PI / mu(Modulus{r, rc});
}

/// tau_2(s) = pi / mu(1/sqrt(1+s)) for s > 0.
inline double tau2(double s) {
    if (!(s > 0.0))
        throw std::domain_error("tau2: argument must be positive");
    if (std::isinf(s)) throw std::domain_error("tau2: argument must be finite");
    // r = 1/sqrt(1+s), rc = sqrt(s/(1+s)); both exact in their own scale
    const double r = 1.0 / std::sqrt(1.0 + s);
    const double rc = std::sqrt(s / (1.0 + s));
    return M_PI / mu(Modulus{r, rc});
}

namespace detail {
// Argument range over which the inverse bracket search is attempted
// (for gamma the variable is w = t - 1).  Outside it the capacity
// under/overflows double evaluation and the search reports the failure
// loudly.
inline constexpr BracketRange kCapacityArgRange{1e-250, 1e250};
}  // namespace detail

/// Inverse of tau_2 by geometric bracket growth and log-space bisection.
inline double tau2_inv(double y) {
    if (!(y > 0.0))
        throw std::domain_error("tau2_inv: argument must be positive");
    return invert_decreasing([](double s) { return tau2(s); }, y,
                             detail::kCapacityArgRange, 1.0);
}

/// Inverse of gamma_2; the bisection runs on w = t - 1 to keep
/// resolution near the singular endpoint.
inline double gamma2_inv(double y) {
    if (!(y > 0.0))
        throw std::domain_error("gamma2_inv: argument must be positive");
    const double w = invert_decreasing(
        [](double w) { return gamma2(1.0 + w); }, y,
        detail::kCapacityArgRange, 1.0);
    return 1.0 + w;
}

// --- dimension-generic evaluator ----------------------------------------

/// Evaluator of the ring capacities for a fixed dimension.  Exact mode
/// exists only for n = 2; for n >= 3 evaluation requires a plugged
/// gamma_n and otherwise errors out.
class CapacityEvaluator {
  public:
    using GammaFn = std::function<double(double)>;

    static CapacityEvaluator plane() { return CapacityEvaluator(2, {}); }

    static CapacityEvaluator abstract(int n, GammaFn gamma_fn = {}) {
        if (n < 3)
            throw std::invalid_argument(
                "CapacityEvaluator: abstract mode requires n >= 3 (n = 2 is exact)");
        return CapacityEvaluator(n, std::move(gamma_fn));
    }

    int dimension() const { return n_; }
    bool exact() const { return n_ == 2; }

    double gamma(double t) const {
        if (!(t > 1.0))
            throw std::domain_error("CapacityEvaluator::gamma: argument must exceed 1");
        if (exact()) return gamma2(t);
        if (!gamma_fn_)
            throw std::runtime_error(
                "CapacityEvaluator::gamma: no evaluation available in abstract mode");
        return gamma_fn_(t);
    }

    // tau_n(s) = gamma_n(sqrt(1+s)) / 2^{n-1}; the identity is the
    // implementation path, not a separate formula.
    double tau(double s) const {
        if (!(s > 0.0))
            throw std::domain_error("CapacityEvaluator::tau: argument must be positive");
        if (exact()) return tau2(s);
        return gamma(std::sqrt(1.0 + s)) / std::exp2(n_ - 1);
    }

    double gamma_inv(double y) const {
        if (exact()) return gamma2_inv(y);
        if (!(y > 0.0))
            throw std::domain_error("CapacityEvaluator::gamma_inv: argument must be positive");
        // plugged evaluators carry no complementary form, so the search
        // stays in plain argument space over a configured exponent range
        const double w = invert_decreasing(
            [this](double w) { return gamma(1.0 + w); }, y,
            BracketRange{1e-12, 1e12}, 1.0);
        return 1.0 + w;
    }

    double tau_inv(double y) const {
        if (exact()) return tau2_inv(y);
        if (!(y > 0.0))
            throw std::domain_error("CapacityEvaluator::tau_inv: argument must be positive");
        return invert_decreasing([this](double s) { return tau(s); }, y,
                                 BracketRange{1e-12, 1e12}, 1.0);
    }

  private:
    CapacityEvaluator(int n, GammaFn fn) : n_(n), gamma_fn_(std::move(fn)) {}

    int n_;
    GammaFn gamma_fn_;
};

}  // namespace ferrand
