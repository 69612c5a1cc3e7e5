#pragma once

// Bracketed monotone inversion.  The capacity functions inverted here are
// strictly decreasing and smooth but span many orders of magnitude in both
// argument and value, so the bracket is grown geometrically and refined by
// bisection in log space.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace ferrand {

struct BracketRange {
    double lo;  // lower end of the admissible argument range
    double hi;  // upper end
};

// Solves f(x) = y for strictly decreasing f on [range.lo, range.hi],
// bisecting on log(x).  seed is an initial guess used to start the
// geometric bracket growth.
template <class F>
double invert_decreasing(F&& f, double y, BracketRange range, double seed,
                         double rel_tol = 1e-13, int max_iter = 200) {
    if (!(y > 0.0) || !std::isfinite(y))
        throw std::domain_error("invert_decreasing: target must be positive and finite");
    if (!(range.lo > 0.0 && range.lo < range.hi))
        throw std::domain_error("invert_decreasing: bad bracket range");
    if (seed < range.lo || seed > range.hi) seed = std::sqrt(range.lo * range.hi);

    // Grow a sign-changing bracket [lo, hi] with f(lo) >= y >= f(hi).
    double lo = seed, hi = seed;
    double flo = f(lo), fhi = flo;
    int guard = 0;
    while (flo < y) {
        if (lo <= range.lo)
            throw std::runtime_error("invert_decreasing: target above representable range");
        hi = lo;
        fhi = flo;
        lo = std::max(range.lo, lo * 0.0625);
        flo = f(lo);
        if (++guard > 200) throw std::runtime_error("invert_decreasing: bracket growth stalled");
    }
    guard = 0;
    while (fhi > y) {
        if (hi >= range.hi)
            throw std::runtime_error("invert_decreasing: target below representable range");
        lo = std::max(lo, hi);
        flo = std::min(flo, fhi);
        hi = std::min(range.hi, hi * 16.0);
        fhi = f(hi);
        if (++guard > 200) throw std::runtime_error("invert_decreasing: bracket growth stalled");
    }
    if (flo == y) return lo;
    if (fhi == y) return hi;

    double llo = std::log(lo), lhi = std::log(hi);
    for (int it = 0; it < max_iter; ++it) {
        const double lmid = 0.5 * (llo + lhi);
        const double mid = std::exp(lmid);
        const double fmid = f(mid);
        if (fmid == y || lhi - llo < rel_tol) return mid;
        if (fmid > y)
            llo = lmid;
        else
            lhi = lmid;
    }
    return std::exp(0.5 * (llo + lhi));
}

}  // namespace ferrand
