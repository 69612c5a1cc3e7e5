#pragma once

// The conformally invariant metric quantity lambda of a plane domain:
// exact in the unit ball, exact or interval-certified in punctured space,
// sandwich-bounded in a general domain through the boundary distance.
//
// Exactness is a certificate here.  A query returns `exact` only when the
// configuration reduces to one of the closed forms (collinear through the
// puncture, or both points on a common circle around it); anything else
// returns a two-sided bound and never a silently approximate value.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ferrand/bounded_value.hpp"
#include "ferrand/capacity.hpp"
#include "ferrand/elliptic.hpp"

namespace ferrand {

using cpx = std::complex<double>;

// tolerance for classifying a configuration as exactly reducible
inline constexpr double kExactClassifyTol = 1e-12;

// --- unit ball -----------------------------------------------------------

/// Hyperbolic distance in the unit ball of R^n, any n, via
/// sinh^2(rho/2) = |x-y|^2 / ((1-|x|^2)(1-|y|^2)).
inline double hyperbolic_distance_ball(const std::vector<double>& x,
                                       const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("hyperbolic_distance_ball: dimension mismatch");
    double xx = 0.0, yy = 0.0, dd = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx += x[i] * x[i];
        yy += y[i] * y[i];
        const double d = x[i] - y[i];
        dd += d * d;
    }
    if (!(xx < 1.0 && yy < 1.0))
        throw std::domain_error("hyperbolic_distance_ball: point not inside the unit ball");
    const double s = dd / ((1.0 - xx) * (1.0 - yy));
    return 2.0 * std::asinh(std::sqrt(s));
}

/// lambda of the unit ball: (1/2) tau_n(sinh^2(rho/2)).  Exact.
inline BoundedValue lambda_ball(const std::vector<double>& x,
                                const std::vector<double>& y,
                                const CapacityEvaluator& cap = CapacityEvaluator::plane()) {
    const double rho = hyperbolic_distance_ball(x, y);
    if (rho == 0.0)
        throw std::domain_error("lambda_ball: lambda is infinite for coincident points");
    const double sh = std::sinh(0.5 * rho);
    return BoundedValue::exactly(0.5 * cap.tau(sh * sh));
}

// --- punctured plane building blocks --------------------------------------

/// p on the positive axis: p(s e1) = tau_n(s - 1) for s > 1.
inline double p_axis(double s, const CapacityEvaluator& cap = CapacityEvaluator::plane()) {
    if (!(s > 1.0)) throw std::domain_error("p_axis: argument must exceed 1");
    return cap.tau(s - 1.0);
}

/// p on the unit circle (plane only):
/// p(e^{i theta}) = (K(sin(theta/4))^2 + K(cos(theta/4))^2)
///                / (K(sin(theta/4)) K(cos(theta/4))).
/// Symmetric under theta -> 2 pi - theta, minimum 2 at theta = pi.
inline double p_unit_circle(double theta) {
    if (!(theta > 0.0 && theta < 2.0 * M_PI))
        throw std::domain_error("p_unit_circle: angle must lie in (0, 2 pi); p diverges at e1");
    const double a = ellint_K(std::sin(0.25 * theta));
    const double b = ellint_K(std::cos(0.25 * theta));
    return (a * a + b * b) / (a * b);
}

/// A pair of punctured-plane points with its similarity normalization
/// r_x(y) (x mapped to e1, the puncture fixed).  The normalized ratio is
/// invariant under simultaneous scaling and rotation of the pair.
struct PuncturedPair {
    cpx x, y;
    cpx ratio;  // r_x(y) = y/x in complex form

    static PuncturedPair make(cpx x, cpx y) {
        if (x == cpx(0.0) || y == cpx(0.0))
            throw std::domain_error("PuncturedPair: points must avoid the puncture");
        if (x == y) throw std::domain_error("PuncturedPair: points must be distinct");
        return {x, y, y / x};
    }

    PuncturedPair swapped() const { return {y, x, x / y}; }

    // positive-axis alignment: x, y on a common ray from the puncture
    bool collinear() const {
        return ratio.real() > 0.0 &&
               std::fabs(ratio.imag()) <= kExactClassifyTol * std::abs(ratio);
    }
    // both points on a common circle around the puncture
    bool on_common_circle() const {
        return std::fabs(std::abs(ratio) - 1.0) <= kExactClassifyTol;
    }
    bool exactly_classifiable() const { return collinear() || on_common_circle(); }
};

/// lambda of the punctured plane.  Exact for collinear and common-circle
/// pairs; otherwise the two-sided estimate
///   tau(|x-y|/m) <= lambda <= tau(|x-y|/(2m)),  m = min(|x|, |y|),
/// tightened by the symmetrization lower bound
///   p(z) >= tau(min(|z|, |z - e1|))
/// applied to both normalized ratios.
inline BoundedValue lambda_punctured(const PuncturedPair& pair_in,
                                     const CapacityEvaluator& cap = CapacityEvaluator::plane()) {
    // canonical argument order makes the symmetry in the two points exact,
    // not just up to rounding
    const bool swap = std::abs(pair_in.y) < std::abs(pair_in.x) ||
                      (std::abs(pair_in.y) == std::abs(pair_in.x) &&
                       (pair_in.y.real() < pair_in.x.real() ||
                        (pair_in.y.real() == pair_in.x.real() &&
                         pair_in.y.imag() < pair_in.x.imag())));
    const PuncturedPair pair = swap ? pair_in.swapped() : pair_in;
    const double ax = std::abs(pair.x), ay = std::abs(pair.y);
    const double d = std::abs(pair.x - pair.y);

    if (pair.collinear()) {
        const double big = std::max(ax, ay), small = std::min(ax, ay);
        return BoundedValue::exactly(cap.tau(big / small - 1.0));
    }
    if (pair.on_common_circle()) {
        // both arguments of the min lie on the unit circle at conjugate
        // angles, so the two branches coincide and no tie-break is needed
        double theta = std::fabs(std::arg(pair.ratio));
        return BoundedValue::exactly(p_unit_circle(theta));
    }

    const double m = std::min(ax, ay);
    BoundedValue bound = BoundedValue::between(cap.tau(d / m), cap.tau(d / (2.0 * m)));
    const double lower_x = cap.tau(std::min(ay / ax, d / ax));
    const double lower_y = cap.tau(std::min(ax / ay, d / ay));
    return bound.intersect(
        BoundedValue::between(std::min(lower_x, lower_y), bound.upper));
}

inline BoundedValue lambda_punctured(cpx x, cpx y,
                                     const CapacityEvaluator& cap = CapacityEvaluator::plane()) {
    return lambda_punctured(PuncturedPair::make(x, y), cap);
}

// --- general domains -------------------------------------------------------

struct DomainSpec {
    enum class Kind { unit_ball, punctured_space, general };

    Kind kind = Kind::punctured_space;
    int dimension = 2;
    // boundary distance x -> d_G(x); required for Kind::general
    std::function<double(const std::vector<double>&)> boundary_distance;

    static DomainSpec unit_ball(int n = 2) { return {Kind::unit_ball, n, {}}; }
    static DomainSpec punctured(int n = 2) { return {Kind::punctured_space, n, {}}; }
    static DomainSpec general(std::function<double(const std::vector<double>&)> dist,
                              int n = 2) {
        return {Kind::general, n, std::move(dist)};
    }

    double distance_to_boundary(const std::vector<double>& x) const {
        double nrm = 0.0;
        for (double c : x) nrm += c * c;
        nrm = std::sqrt(nrm);
        switch (kind) {
            case Kind::unit_ball:
                return 1.0 - nrm;
            case Kind::punctured_space:
                return nrm;
            case Kind::general:
                if (!boundary_distance)
                    throw std::invalid_argument("DomainSpec: missing boundary distance");
                return boundary_distance(x);
        }
        throw std::logic_error("DomainSpec: bad kind");
    }
};

/// Two-sided estimate of lambda_G(x, y) from the boundary distance:
///   (1/2) tau(r^2/(1-r^2)) <= lambda <= tau(r/2),  r = |x-y|/d_G(x) < 1.
/// Valid only while y stays inside the boundary-distance ball around x;
/// outside that hypothesis the call refuses rather than extrapolates.
inline BoundedValue lambda_general_bounds(const DomainSpec& domain,
                                          const std::vector<double>& x,
                                          const std::vector<double>& y,
                                          const CapacityEvaluator& cap = CapacityEvaluator::plane()) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("lambda_general_bounds: dimension mismatch");
    const double dG = domain.distance_to_boundary(x);
    if (!(dG > 0.0))
        throw std::domain_error("lambda_general_bounds: nonpositive boundary distance");
    double dd = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dd += (x[i] - y[i]) * (x[i] - y[i]);
    const double r = std::sqrt(dd) / dG;
    if (r == 0.0)
        throw std::domain_error("lambda_general_bounds: coincident points");
    if (!(r < 1.0))
        throw std::domain_error("lambda_general_bounds: |x-y| >= d_G(x), outside the estimate's hypothesis");
    const double lower = 0.5 * cap.tau(r * r / ((1.0 - r) * (1.0 + r)));
    const double upper = cap.tau(0.5 * r);
    return BoundedValue::between(lower, upper);
}

// --- metric sphere tracing -------------------------------------------------

/// Polyline pair bracketing the boundary of the metric ball
/// { z : lambda(center, z) > level } in the punctured plane.  Radii are
/// measured from the center along equally spaced rays, with angle 0
/// pointing away from the puncture.  Along the two axis rays the crossing
/// is exact; elsewhere the certified Eq-bound crossings give
/// inner_radius <= outer_radius.
struct SphereTrace {
    cpx center = 0.0;
    double level = 0.0;
    std::vector<double> angles;
    std::vector<double> inner_radius, outer_radius;
    std::vector<cpx> inner, outer;
};

namespace detail {

// First level crossing of a bound function g (monotone decreasing until
// the crossing) along a ray; certifies g <= level up to the horizon.
template <class G>
double trace_crossing(G&& g, double level, double t0, double horizon) {
    double t = t0, gt = g(t);
    if (!(gt > level))
        throw std::runtime_error("trace_metric_sphere: level too large to bracket on a ray");
    while (true) {
        const double tn = t * 1.25;
        if (tn > horizon)
            throw std::runtime_error("trace_metric_sphere: level too small, no crossing within range");
        const double gn = g(tn);
        if (gn > gt)
            throw std::runtime_error("trace_metric_sphere: bound not monotone before crossing; level too small");
        t = tn;
        if (gn <= level) break;
        gt = gn;
    }
    // bisect inside [t/1.25, t]
    double lo = t / 1.25, hi = t;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > level ? lo : hi) = mid;
    }
    const double crossing = 0.5 * (lo + hi);
    // the certificate extends only while the bound stays below the level
    for (double s = hi; s < horizon; s *= 1.25)
        if (g(s) > level)
            throw std::runtime_error("trace_metric_sphere: bound re-crosses the level; level too small to certify");
    return crossing;
}

}  // namespace detail

inline SphereTrace trace_metric_sphere(cpx center, double level, int rays,
                                       const CapacityEvaluator& cap = CapacityEvaluator::plane()) {
    if (center == cpx(0.0))
        throw std::domain_error("trace_metric_sphere: center must avoid the puncture");
    if (!(level > 0.0)) throw std::domain_error("trace_metric_sphere: level must be positive");
    if (rays < 2) throw std::invalid_argument("trace_metric_sphere: need at least 2 rays");

    SphereTrace tr;
    tr.center = center;
    tr.level = level;
    const double R = std::abs(center);
    const cpx out_dir = center / R;
    const double t_inv = cap.tau_inv(level);  // errors out if the level is unreachable

    for (int k = 0; k < rays; ++k) {
        const double ang = 2.0 * M_PI * k / rays;
        const cpx dir = out_dir * std::polar(1.0, ang);
        double t_in, t_out;
        const bool outward_axis = (k == 0);
        const bool inward_axis = (2 * k == rays);
        if (outward_axis) {
            t_in = t_out = R * t_inv;  // tau(t/R) = level
        } else if (inward_axis) {
            t_in = t_out = R * (1.0 - 1.0 / (1.0 + t_inv));  // tau(R/|z| - 1) = level
        } else {
            auto z_at = [&](double t) { return center + t * dir; };
            auto lower_bound_at = [&](double t) {
                return lambda_punctured(center, z_at(t), cap).lower;
            };
            auto upper_bound_at = [&](double t) {
                return lambda_punctured(center, z_at(t), cap).upper;
            };
            const double horizon = 64.0 * R;
            t_in = detail::trace_crossing(lower_bound_at, level, 1e-9 * R, horizon);
            t_out = detail::trace_crossing(upper_bound_at, level, 1e-9 * R, horizon);
        }
        tr.angles.push_back(ang);
        tr.inner_radius.push_back(t_in);
        tr.outer_radius.push_back(t_out);
        tr.inner.push_back(center + t_in * dir);
        tr.outer.push_back(center + t_out * dir);
    }
    return tr;
}

}  // namespace ferrand
