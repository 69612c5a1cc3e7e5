#pragma once

// Measurement harness for lambda-distortion and linear dilatation of
// candidate self-maps of the punctured plane, together with the
// quantitative dilatation bound profile whose supremum the isometry
// theory caps at 256.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ferrand/capacity.hpp"
#include "ferrand/condenser.hpp"
#include "ferrand/distortion.hpp"
#include "ferrand/lambda.hpp"
#include "ferrand/plane_map.hpp"

namespace ferrand {

// --- lambda distortion -------------------------------------------------------

struct DistortionReport {
    double max_discrepancy = 0.0;  // max |lambda(f x, f y) - lambda(x, y)|
    int evaluated = 0;
    int skipped = 0;  // image pair not exactly classifiable; never approximated
};

/// Maximum lambda discrepancy of `map` over exactly classifiable pairs.
/// Pairs whose image loses exactness are skipped and reported, never
/// silently approximated.
inline DistortionReport lambda_distortion(const PlaneMap& map,
                                          const std::vector<PuncturedPair>& pairs) {
    if (!map.punctured_compatible())
        throw std::invalid_argument("lambda_distortion: map does not preserve the puncture");
    DistortionReport rep;
    for (const PuncturedPair& pair : pairs) {
        if (!pair.exactly_classifiable())
            throw std::invalid_argument("lambda_distortion: input pair has no exact value");
        const PuncturedPair image = PuncturedPair::make(map(pair.x), map(pair.y));
        if (!image.exactly_classifiable()) {
            ++rep.skipped;
            continue;
        }
        const double before = lambda_punctured(pair).lower;
        const double after = lambda_punctured(image).lower;
        rep.max_discrepancy = std::max(rep.max_discrepancy, std::fabs(after - before));
        ++rep.evaluated;
    }
    return rep;
}

/// Deterministic certified pair set: collinear pairs along several rays
/// plus common-circle pairs at several angles, spread over scales.
inline std::vector<PuncturedPair> certified_pair_set() {
    std::vector<PuncturedPair> pairs;
    const double dirs[] = {0.0, 0.4, M_PI / 3.0, 1.9, M_PI, 4.4};
    const double scales[] = {0.2, 1.0, 5.0};
    const double ratios[] = {0.25, 0.6, 1.7, 3.0};
    for (double d : dirs)
        for (double s : scales) {
            const cpx x = std::polar(s, d);
            for (double r : ratios) pairs.push_back(PuncturedPair::make(x, r * x));
            for (double a : {0.5, 1.5, M_PI}) pairs.push_back(PuncturedPair::make(x, x * std::polar(1.0, a)));
        }
    return pairs;
}

// --- linear dilatation -------------------------------------------------------

struct DilatationReport {
    cpx base_point;
    std::vector<double> radii;   // decreasing
    std::vector<double> ratios;  // max/min image distance per radius
    double limsup_estimate = 0.0;
    int samples = 0;
};

/// Sampled linear dilatation H(x, f): for each radius the ratio of the
/// largest to the smallest image displacement over equally spaced
/// directions; the limsup estimate is the maximum over the three
/// smallest radii.
inline DilatationReport linear_dilatation(const PlaneMap& map, cpx x,
                                          std::vector<double> radii, int samples = 64) {
    if (samples < 8)
        throw std::invalid_argument("linear_dilatation: need at least 8 angular samples");
    if (radii.empty()) throw std::invalid_argument("linear_dilatation: no radii");
    std::sort(radii.begin(), radii.end(), std::greater<double>());
    const double reach = map.distance_to_singularity(x);
    if (!(radii.front() < reach))
        throw std::domain_error("linear_dilatation: radius reaches a pole or the puncture");

    DilatationReport rep;
    rep.base_point = x;
    rep.radii = radii;
    rep.samples = samples;
    const cpx fx = map(x);
    for (double r : radii) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int k = 0; k < samples; ++k) {
            const cpx y = x + std::polar(r, 2.0 * M_PI * k / samples);
            const double d = std::abs(map(y) - fx);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        if (!(lo > 0.0))
            throw std::runtime_error("linear_dilatation: degenerate image circle");
        rep.ratios.push_back(hi / lo);
    }
    const std::size_t tail = std::min<std::size_t>(3, rep.ratios.size());
    for (std::size_t i = rep.ratios.size() - tail; i < rep.ratios.size(); ++i)
        rep.limsup_estimate = std::max(rep.limsup_estimate, rep.ratios[i]);
    return rep;
}

// --- dilatation bound profile ------------------------------------------------

/// The two-sided dilatation estimate for a lambda-isometry, as a function
/// of the relative radius r in (0,1):
///
///     profile(r) = 2 psi_2(r)^2 / psi_{1/2}( sqrt(r/(r+2)) ),
///
/// whose r -> 0 limit the distortion-function estimates cap at 256.
inline double dilatation_bound_profile(double r) {
    if (!(r > 0.0 && r < 1.0))
        throw std::domain_error("dilatation_bound_profile: r outside (0,1)");
    const double p2 = psi(DistortionParams{2.0, 2}, r);
    const double ph = psi(DistortionParams{0.5, 2}, std::sqrt(r / (r + 2.0)));
    return 2.0 * p2 * p2 / ph;
}

/// The same quantity routed through tau and its numeric inverse:
///
///     [ 2 x_n/(1+x_n) ] / sqrt( x_d/(1+x_d) ),
///     x_n = tau^{-1}( tau(r^2/(1-r^2))/2 ),  x_d = tau^{-1}( 2 tau(r/2) ).
///
/// Algebraically identical to the psi form; numerically it shares nothing
/// with it, so agreement validates both evaluation paths.
inline double dilatation_bound_profile_tau(double r) {
    if (!(r > 0.0 && r < 1.0))
        throw std::domain_error("dilatation_bound_profile_tau: r outside (0,1)");
    const double xn = tau2_inv(0.5 * tau2(r * r / ((1.0 - r) * (1.0 + r))));
    const double xd = tau2_inv(2.0 * tau2(0.5 * r));
    return (2.0 * xn / (1.0 + xn)) / std::sqrt(xd / (1.0 + xd));
}

// --- certified checks ----------------------------------------------------------

inline constexpr double kIsometryCertTol = 1e-10;

/// Certifies the map as a lambda-isometry on the fixed pair set, then
/// returns the largest sampled dilatation estimate over the sample
/// points.  For a certified isometry the theory bounds this by 4.
inline double isometry_dilatation_check(const PlaneMap& map,
                                        const std::vector<cpx>& points) {
    const DistortionReport rep = lambda_distortion(map, certified_pair_set());
    if (rep.max_discrepancy > kIsometryCertTol)
        throw std::invalid_argument("isometry_dilatation_check: map failed isometry certification");
    double worst = 0.0;
    for (cpx x : points) {
        const double reach = map.distance_to_singularity(x);
        const std::vector<double> radii = {reach * 0.1, reach * 0.01, reach * 0.001};
        worst = std::max(worst, linear_dilatation(map, x, radii).limsup_estimate);
    }
    return worst;
}

/// Margin tau_2(r-1) - M(join([0,e1], radial ray from z)), z = r e^{i theta},
/// measured with the grid oracle.  Positive margins witness the strict
/// ordering of lambda over the sphere of radius r against the axis point.
struct SphereOrderingMargin {
    double theta = 0.0;
    double oracle_value = 0.0;  // extrapolated modulus of the joining family
    double axis_value = 0.0;    // tau_2(r-1)
    double margin = 0.0;        // axis_value - oracle_value
    bool extrapolation_refused = false;
};

inline SphereOrderingMargin sphere_ordering_margin(double r, double theta,
                                                   std::optional<double> grid_h = {}) {
    if (!(r > 1.0)) throw std::domain_error("sphere_ordering_margin: need r > 1");
    if (theta == 0.0)
        throw std::domain_error("sphere_ordering_margin: theta = 0 is the excluded equality case");
    const cpx z = std::polar(r, theta);
    CondenserSpec spec;
    spec.plate_e = {Segment{cpx(0.0), cpx(1.0)}};
    spec.plate_f = {Ray{z, z / std::abs(z)}};
    spec.grid_h = grid_h;
    const RichardsonResult rr = solve_richardson(spec);
    SphereOrderingMargin m;
    m.theta = theta;
    m.oracle_value = rr.best();
    m.axis_value = tau2(r - 1.0);
    m.margin = m.axis_value - m.oracle_value;
    m.extrapolation_refused = rr.refused;
    return m;
}

}  // namespace ferrand
