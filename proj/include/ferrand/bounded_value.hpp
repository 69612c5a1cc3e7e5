#pragma once

// Certified numeric result: either an exact value or a two-sided bound.

#include <limits>
#include <stdexcept>

namespace ferrand {

struct BoundedValue {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    bool exact = false;

    static BoundedValue exactly(double v) { return {v, v, true}; }

    static BoundedValue between(double lo, double hi) {
        if (!(lo <= hi)) throw std::invalid_argument("BoundedValue: lower exceeds upper");
        return {lo, hi, false};
    }

    // Tightens this bound with another one for the same quantity.  An
    // empty intersection means one of the bounds is wrong, which is a
    // bug, not bad input.
    BoundedValue intersect(const BoundedValue& other) const {
        const double lo = lower > other.lower ? lower : other.lower;
        const double hi = upper < other.upper ? upper : other.upper;
        if (lo > hi * (1.0 + 1e-12))
            throw std::logic_error("BoundedValue: bounds are inconsistent");
        return {lo, hi < lo ? lo : hi, exact || other.exact};
    }

    bool contains(double v, double slack = 0.0) const {
        return v >= lower - slack && v <= upper + slack;
    }
};

}  // namespace ferrand
