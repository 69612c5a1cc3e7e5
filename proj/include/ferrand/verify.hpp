#pragma once

// One-shot verification: every module's invariant suite as a list of
// named pass/fail checks.  The slow checks (grid-oracle runs) can be
// excluded for quick iteration.

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ferrand/capacity.hpp"
#include "ferrand/condenser.hpp"
#include "ferrand/distortion.hpp"
#include "ferrand/elliptic.hpp"
#include "ferrand/isometry.hpp"
#include "ferrand/lambda.hpp"
#include "ferrand/plane_map.hpp"

namespace ferrand {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace verify_detail {

inline double rel_err(double a, double b) {
    return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

class Suite {
  public:
    explicit Suite(std::string prefix) : prefix_(std::move(prefix)) {}

    void check(const std::string& name, bool pass, double worst = 0.0) {
        std::ostringstream det;
        if (worst != 0.0) det << "worst " << worst;
        results_.push_back({prefix_ + "." + name, pass, det.str()});
    }

    std::vector<CheckResult> take() { return std::move(results_); }

  private:
    std::string prefix_;
    std::vector<CheckResult> results_;
};

inline std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}

inline std::vector<double> lin_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

// splitmix64: deterministic, seed-free stream for sample configurations
struct DetRng {
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    double next() {  // uniform in [0,1)
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return double(z >> 11) / double(1ull << 53);
    }
};

}  // namespace verify_detail

// --- elliptic_core -----------------------------------------------------------

inline std::vector<CheckResult> verify_elliptic() {
    using namespace verify_detail;
    Suite s("elliptic");

    {   // mu(r) mu(r') = pi^2/4 on a log grid
        double worst = 0.0;
        for (double r : log_grid(1e-6, 0.999, 50)) {
            const double prod = mu(r) * mu(std::sqrt((1.0 - r) * (1.0 + r)));
            worst = std::max(worst, rel_err(prod, M_PI * M_PI / 4.0));
        }
        s.check("mu_functional_identity", worst <= 1e-12, worst);
    }
    {   // K strictly increasing, mu strictly decreasing
        bool mono = true;
        const auto grid = log_grid(1e-4, 0.9999, 64);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            mono = mono && ellint_K(grid[i]) > ellint_K(grid[i - 1]);
            mono = mono && mu(grid[i]) < mu(grid[i - 1]);
        }
        s.check("monotonicity", mono);
    }
    {   // agm bounds and homogeneity
        double worst = 0.0;
        bool in_bounds = true;
        DetRng rng;
        for (int i = 0; i < 64; ++i) {
            const double a = 0.1 + 10.0 * rng.next(), b = 0.1 + 10.0 * rng.next();
            const double m = agm(a, b);
            in_bounds = in_bounds && m >= std::min(a, b) - 1e-14 && m <= std::max(a, b) + 1e-14;
            const double c = 0.25 + 4.0 * rng.next();
            worst = std::max(worst, rel_err(agm(c * a, c * b), c * m));
        }
        s.check("agm_bounds", in_bounds);
        s.check("agm_homogeneity", worst <= 1e-14, worst);
    }
    {   // mu_inverse round trip both ways
        double worst = 0.0;
        for (double y : log_grid(1e-2, 1e2, 40)) {
            const Modulus m = mu_inverse(y);
            worst = std::max(worst, rel_err(mu(m), y));
            worst = std::max(worst, std::fabs(m.r * m.r + m.rc * m.rc - 1.0));
        }
        s.check("mu_inverse_roundtrip", worst <= 1e-13, worst);
    }
    return s.take();
}

// --- ring_capacities ----------------------------------------------------------

inline std::vector<CheckResult> verify_capacity() {
    using namespace verify_detail;
    Suite s("capacity");

    s.check("gamma_anchor", rel_err(gamma2(std::sqrt(2.0)), 4.0) <= 1e-10,
            rel_err(gamma2(std::sqrt(2.0)), 4.0));
    s.check("tau_anchor", rel_err(tau2(1.0), 2.0) <= 1e-10, rel_err(tau2(1.0), 2.0));

    {   // gamma_2(t) = 2 tau_2(t^2 - 1) across the implementation path
        double worst = 0.0;
        for (double t : log_grid(1.0 + 1e-3, 100.0, 100))
            worst = std::max(worst, rel_err(gamma2(t), 2.0 * tau2((t - 1.0) * (t + 1.0))));
        s.check("gamma_tau_identity", worst <= 1e-10, worst);
    }
    {   // strict monotonicity
        bool mono = true;
        const auto tg = log_grid(1.001, 1e3, 64);
        for (std::size_t i = 1; i < tg.size(); ++i) mono = mono && gamma2(tg[i]) < gamma2(tg[i - 1]);
        const auto sg = log_grid(1e-6, 1e6, 64);
        for (std::size_t i = 1; i < sg.size(); ++i) mono = mono && tau2(sg[i]) < tau2(sg[i - 1]);
        s.check("monotonicity", mono);
    }
    {   // inverse round trips both directions
        double worst = 0.0;
        for (double ss : {0.1, 1.0, 7.0, 1e-4, 1e4})
            worst = std::max(worst, rel_err(tau2_inv(tau2(ss)), ss));
        for (double y : {0.5, 2.0, 4.0, 20.0})
            worst = std::max(worst, rel_err(tau2(tau2_inv(y)), y));
        for (double t : {1.1, 2.0, 10.0})
            worst = std::max(worst, rel_err(gamma2_inv(gamma2(t)), t));
        for (double y : {1.0, 4.0, 10.0})
            worst = std::max(worst, rel_err(gamma2(gamma2_inv(y)), y));
        s.check("inverse_roundtrip", worst <= 1e-10, worst);
    }
    return s.take();
}

// --- distortion_functions -------------------------------------------------------

inline std::vector<CheckResult> verify_distortion() {
    using namespace verify_detail;
    Suite s("distortion");

    {   // two-route agreement of tau^{-1}(K tau(t))
        double worst = 0.0;
        for (double K : {0.5, 1.0, 2.0, 4.0})
            for (double t : log_grid(1e-3, 1e3, 40)) {
                const double via_phi = tau_inv_scaled(DistortionParams{K, 2}, t);
                const double direct = tau2_inv(K * tau2(t));
                worst = std::max(worst, rel_err(via_phi, direct));
            }
        s.check("route_equivalence", worst <= 1e-9, worst);
    }
    {   // psi / r^{1/K} sandwiches, K >= 1 and its reciprocal companion
        bool ok = true;
        double worst_lo = 1.0, worst_hi = 0.0;
        for (double K : {1.0, 2.0, 4.0})
            for (double r : lin_grid(0.004, 1.0, 64)) {
                const double q1 = psi(DistortionParams{K, 2}, r) / std::pow(r, 1.0 / K);
                ok = ok && q1 >= 1.0 - 1e-12 && q1 <= std::exp2(2.0 - 1.0 / K) + 1e-12;
                const double q2 = psi(DistortionParams{1.0 / K, 2}, r) / std::pow(r, K);
                ok = ok && q2 >= std::exp2(1.0 - 2.0 * K) - 1e-12 && q2 <= 1.0 + 1e-12;
                worst_lo = std::min({worst_lo, q1 - 1.0});
                worst_hi = std::max(worst_hi, q2);
            }
        s.check("psi_sandwich", ok);
    }
    {   // phi_K . phi_K' = phi_{K K'}
        double worst = 0.0;
        for (double r : lin_grid(0.05, 0.95, 16)) {
            const double lhs = phi(DistortionParams{2.0, 2}, phi(DistortionParams{3.0, 2}, r));
            const double rhs = phi(DistortionParams{6.0, 2}, r);
            worst = std::max(worst, rel_err(lhs, rhs));
        }
        s.check("phi_composition", worst <= 1e-9, worst);
    }
    {   // K = 1 identities and endpoints
        double worst = 0.0;
        for (double r : {0.2, 0.5, 0.9})
            worst = std::max(worst, std::fabs(phi(DistortionParams{1.0, 2}, r) - r));
        worst = std::max(worst, std::fabs(psi(DistortionParams{1.0, 2}, 0.37) - 0.37));
        const bool endpoints = phi(DistortionParams{2.0, 2}, 0.0) == 0.0 &&
                               phi(DistortionParams{2.0, 2}, 1.0) == 1.0;
        s.check("identity_K1", worst <= 1e-12, worst);
        s.check("endpoints", endpoints);
    }
    return s.take();
}

// --- lambda_metrics -----------------------------------------------------------

inline std::vector<CheckResult> verify_lambda() {
    using namespace verify_detail;
    Suite s("lambda");

    {   // 200 deterministic exactly-classifiable pairs: both sandwiches
        // must bracket the exact value
        DetRng rng;
        bool ok = true;
        double worst = 0.0;
        const DomainSpec punct = DomainSpec::punctured(2);
        for (int i = 0; i < 200; ++i) {
            const double scale = 0.05 + 10.0 * rng.next();
            const double alpha = 2.0 * M_PI * rng.next();
            const cpx x = std::polar(scale, alpha);
            cpx y;
            if (i % 2 == 0) {
                const double c = 1.05 + 0.9 * rng.next();  // keeps r_G < 1
                y = (i % 4 == 0 ? c : 1.0 / c) * x;
            } else {
                const double th = 0.05 + (M_PI / 3.0 - 0.06) * rng.next();
                y = x * std::polar(1.0, (i % 4 == 1 ? th : -th));
            }
            const BoundedValue exact = lambda_punctured(x, y);
            ok = ok && exact.exact;

            // sandwich from the punctured-space estimate alone
            const double d = std::abs(x - y), m = std::min(std::abs(x), std::abs(y));
            const double lo7 = tau2(d / m), hi7 = tau2(d / (2.0 * m));
            ok = ok && exact.lower >= lo7 - 1e-9 && exact.lower <= hi7 + 1e-9;
            worst = std::max(worst, std::max(lo7 - exact.lower, exact.lower - hi7));

            // boundary-distance sandwich
            const BoundedValue gen = lambda_general_bounds(punct, {x.real(), x.imag()},
                                                           {y.real(), y.imag()});
            ok = ok && gen.contains(exact.lower, 1e-9);
        }
        s.check("sandwich_200", ok, worst);
    }
    {   // collinear pairs attain the punctured lower bound exactly
        double worst = 0.0;
        for (double c : {1.3, 2.0, 5.5}) {
            const cpx x = std::polar(2.0, 0.7);
            const BoundedValue v = lambda_punctured(x, c * x);
            worst = std::max(worst, rel_err(v.lower, tau2(c - 1.0)));
            worst = std::max(worst, rel_err(v.lower, tau2(std::abs(x - c * x) / std::abs(x))));
        }
        s.check("collinear_equality", worst <= 1e-12, worst);
    }
    {   // symmetry in the two arguments
        DetRng rng;
        double worst = 0.0;
        for (int i = 0; i < 32; ++i) {
            const cpx x = std::polar(0.5 + 3.0 * rng.next(), 2.0 * M_PI * rng.next());
            const cpx y = std::polar(0.5 + 3.0 * rng.next(), 2.0 * M_PI * rng.next());
            if (x == y) continue;
            const BoundedValue a = lambda_punctured(x, y), b = lambda_punctured(y, x);
            worst = std::max({worst, std::fabs(a.lower - b.lower), std::fabs(a.upper - b.upper)});
        }
        s.check("argument_symmetry", worst == 0.0, worst);
    }
    {   // invariance under inversion in the circle through the fixed point
        double worst = 0.0;
        for (double th : {0.4, 1.2, 2.9}) {
            const cpx z = std::polar(1.0, th);
            worst = std::max(worst, rel_err(lambda_punctured(cpx(1.0), z).lower,
                                            lambda_punctured(cpx(1.0), z / std::norm(z)).lower));
        }
        for (double r : {1.7, 3.0}) {
            worst = std::max(worst, rel_err(lambda_punctured(cpx(1.0), cpx(r)).lower,
                                            lambda_punctured(cpx(1.0), cpx(1.0 / r)).lower));
        }
        s.check("inversion_symmetry", worst <= 1e-12, worst);
    }
    {   // similarity invariance
        double worst = 0.0;
        for (double c : {0.1, 7.0}) {
            const cpx x(0.8, 0.45), y(-1.2, 2.0);
            const BoundedValue a = lambda_punctured(x, y);
            const BoundedValue b = lambda_punctured(c * x, c * y);
            worst = std::max(worst, rel_err(a.lower, b.lower));
            worst = std::max(worst, rel_err(a.upper, b.upper));
        }
        s.check("similarity_invariance", worst <= 1e-12, worst);
    }
    {   // p on the unit circle: conjugation symmetry, floor, axis bound
        bool ok = std::fabs(p_unit_circle(M_PI / 3.0) - p_unit_circle(5.0 * M_PI / 3.0)) <= 1e-12;
        ok = ok && rel_err(p_unit_circle(M_PI), 2.0) <= 1e-12;
        for (double th : {M_PI_2, M_PI, 3.0 * M_PI_2}) {
            const double bound = tau2(std::min(1.0, std::abs(std::polar(1.0, th) - cpx(1.0))));
            ok = ok && p_unit_circle(th) >= bound - 1e-12;
        }
        s.check("p_unit_circle", ok);
    }
    return s.take();
}

// --- isometry lab (fast parts) ----------------------------------------------

inline std::vector<CheckResult> verify_isometry() {
    using namespace verify_detail;
    Suite s("isometry");

    const std::vector<cpx> sample_points = {cpx(1.0, 0.0), cpx(0.3, 0.8), cpx(-2.0, 1.0),
                                            cpx(0.0, -1.5), cpx(4.0, 3.0)};
    {   // similarities and inversions certify; dilatation within the bound
        bool ok = true;
        double worst_h = 0.0;
        for (const PlaneMap& m : {PlaneMap::scaling(3.0), PlaneMap::scaling(cpx(0.0, 2.0)),
                                  PlaneMap::inversion(), PlaneMap::inversion(cpx(2.5, 0.0))}) {
            const DistortionReport rep = lambda_distortion(m, certified_pair_set());
            ok = ok && rep.max_discrepancy <= 1e-10 && rep.evaluated > 0;
            const double h = isometry_dilatation_check(m, sample_points);
            worst_h = std::max(worst_h, h);
            ok = ok && h <= 4.0;
        }
        s.check("isometries_certify", ok, worst_h);
    }
    {   // the radial power map is rejected with the exact witness
        const PlaneMap power = PlaneMap::radial_power(2.0);
        const DistortionReport rep =
            lambda_distortion(power, {PuncturedPair::make(cpx(1.0), cpx(2.0))});
        const double witness = tau2(1.0) - tau2(3.0);
        bool ok = rep.max_discrepancy > 0.0 && rel_err(rep.max_discrepancy, witness) <= 1e-12;
        bool refused = false;
        try {
            isometry_dilatation_check(power, sample_points);
        } catch (const std::invalid_argument&) {
            refused = true;
        }
        s.check("power_map_rejected", ok && refused, rep.max_discrepancy);
    }
    {   // sampled dilatation of the radial power map at the unit circle
        const PlaneMap power = PlaneMap::radial_power(2.0);
        const DilatationReport rep = linear_dilatation(power, cpx(1.0), {0.1, 0.01, 0.001});
        s.check("power_dilatation", rel_err(rep.limsup_estimate, 2.0) <= 0.05,
                rep.limsup_estimate);
    }
    return s.take();
}

// --- dilatation bound profile ----------------------------------------------

inline std::vector<CheckResult> verify_profile() {
    using namespace verify_detail;
    Suite s("profile");

    const auto grid = log_grid(1e-3, 0.3, 40);
    {   // bound and route agreement
        bool ok = true;
        double worst = 0.0, route = 0.0;
        for (double r : grid) {
            const double v = dilatation_bound_profile(r);
            ok = ok && v <= 256.0;
            worst = std::max(worst, v);
            route = std::max(route, rel_err(v, dilatation_bound_profile_tau(r)));
        }
        s.check("bound_256", ok, worst);
        s.check("route_agreement", route <= 1e-8, route);
    }
    {   // the limit probe stabilizes
        const double a = dilatation_bound_profile(0.003), b = dilatation_bound_profile(0.001);
        s.check("limit_stabilizes", std::fabs(a - b) / b <= 0.05, std::fabs(a - b) / b);
    }
    return s.take();
}

// --- condenser oracle (slow) -------------------------------------------------

inline CondenserSpec teichmuller_condenser(double s) {
    CondenserSpec spec;
    spec.plate_e = {Segment{cpx(-1.0, 0.0), cpx(0.0, 0.0)}};
    spec.plate_f = {Ray{cpx(s, 0.0), cpx(1.0, 0.0)}};
    return spec;
}

inline CondenserSpec grotzsch_condenser(double t) {
    CondenserSpec spec;
    spec.plate_e = {Disk{cpx(0.0, 0.0), 1.0}};
    spec.plate_f = {Ray{cpx(t, 0.0), cpx(1.0, 0.0)}};
    spec.margin = 5.0;
    return spec;
}

inline CondenserSpec annulus_condenser(double r_inner, double r_outer) {
    CondenserSpec spec;
    spec.plate_e = {full_circle(cpx(0.0, 0.0), r_inner)};
    spec.plate_f = {full_circle(cpx(0.0, 0.0), r_outer)};
    spec.margin = 1.5;
    return spec;
}

inline std::vector<CheckResult> verify_oracle() {
    using namespace verify_detail;
    Suite s("oracle");

    {   // annulus: the canonical smoke test with a closed form
        const RichardsonResult rr = solve_richardson(annulus_condenser(1.0, std::exp(1.0)));
        const double err = rel_err(rr.best(), 2.0 * M_PI);
        s.check("annulus_2pi", err <= 0.01, err);
    }
    {   // Teichmuller configurations against the elliptic closed form
        double worst = 0.0;
        for (double sv : {0.5, 1.0, 3.0}) {
            const RichardsonResult rr = solve_richardson(teichmuller_condenser(sv));
            worst = std::max(worst, rel_err(rr.best(), tau2(sv)));
        }
        s.check("teichmuller", worst <= 0.02, worst);
    }
    {   // Grotzsch configuration
        const RichardsonResult rr = solve_richardson(grotzsch_condenser(std::sqrt(2.0)));
        const double err = rel_err(rr.best(), 4.0);
        s.check("grotzsch", err <= 0.02, err);
    }
    {   // scaling invariance, within twice the discretization error
        CondenserSpec base = teichmuller_condenser(1.0);
        const double h = default_grid_h(base);
        const SolveReport a = solve_capacity(base, h);
        const SolveReport a2 = solve_capacity(base, 0.5 * h);
        const double disc = std::fabs(a.capacity - a2.capacity);
        double worst = 0.0;
        for (double c : {0.5, 3.0}) {
            CondenserSpec scaled;
            scaled.plate_e = {Segment{cpx(-c, 0.0), cpx(0.0, 0.0)}};
            scaled.plate_f = {Ray{cpx(c, 0.0), cpx(1.0, 0.0)}};
            const SolveReport b = solve_capacity(scaled, default_grid_h(scaled));
            worst = std::max(worst, std::fabs(a.capacity - b.capacity));
        }
        s.check("scaling_invariance", worst <= 2.0 * disc, worst);
    }
    {   // monotonicity: extending plate F toward E cannot lower the capacity
        CondenserSpec shorter, longer;
        shorter.plate_e = {Segment{cpx(-1.0, 0.0), cpx(0.0, 0.0)}};
        shorter.plate_f = {Segment{cpx(1.5, 0.0), cpx(4.0, 0.0)}};
        longer.plate_e = shorter.plate_e;
        longer.plate_f = {Segment{cpx(1.0, 0.0), cpx(4.0, 0.0)}};
        const double h = 0.03;
        const double cs = solve_capacity(shorter, h).capacity;
        const double cl = solve_capacity(longer, h).capacity;
        s.check("plate_monotonicity", cl >= cs, cl - cs);
    }
    {   // extrapolation guard rails
        auto mk = [](double c) {
            SolveReport r;
            r.capacity = c;
            return r;
        };
        const RichardsonResult constant = richardson_extrapolate({mk(2.0), mk(2.0), mk(2.0)});
        const RichardsonResult oscill = richardson_extrapolate({mk(2.0), mk(2.2), mk(2.1)});
        const RichardsonResult clean = richardson_extrapolate({mk(2.4), mk(2.2), mk(2.1)});
        s.check("extrapolation_guards",
                constant.extrapolated == 2.0 && !constant.refused && oscill.refused &&
                    oscill.extrapolated == 2.1 && !clean.refused &&
                    rel_err(clean.extrapolated, 2.0) <= 1e-12);
    }
    return s.take();
}

// --- sphere ordering margins (slow) -----------------------------------------

inline std::vector<CheckResult> verify_sphere_ordering() {
    using namespace verify_detail;
    Suite s("sphere_ordering");

    // oracle tolerance: 2% of the axis value
    const double axis = tau2(1.0);
    const double tol = 0.02 * axis;
    double worst = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (double th : {M_PI / 4.0, M_PI_2, M_PI}) {
        const SphereOrderingMargin m = sphere_ordering_margin(2.0, th);
        ok = ok && m.margin > tol;
        worst = std::min(worst, m.margin);
    }
    s.check("margins_r2", ok, worst);

    {   // continuity probe toward the excluded equality angle
        const SphereOrderingMargin m = sphere_ordering_margin(2.0, 0.05);
        s.check("continuity_theta0", m.oracle_value <= axis + tol, m.oracle_value);
    }
    return s.take();
}

// --- full run -----------------------------------------------------------------

inline std::vector<CheckResult> verify_all(bool include_slow = true) {
    std::vector<CheckResult> all;
    auto add = [&all](std::vector<CheckResult> v) {
        all.insert(all.end(), v.begin(), v.end());
    };
    add(verify_elliptic());
    add(verify_capacity());
    add(verify_distortion());
    add(verify_lambda());
    add(verify_isometry());
    add(verify_profile());
    if (include_slow) {
        add(verify_oracle());
        add(verify_sphere_ordering());
    }
    return all;
}

}  // namespace ferrand
