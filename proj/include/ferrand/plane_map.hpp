#pragma once

// Candidate self-maps of the punctured plane: Mobius transformations,
// radial power stretches x -> x |x|^{a-1}, and compositions.  Mobius
// pairs compose exactly through matrix multiplication; mixed kinds stay
// symbolic compositions.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ferrand {

using cpx = std::complex<double>;

class PlaneMap {
  public:
    enum class Kind { mobius, radial_power, composition };

    // (az + b) / (cz + d), ad - bc != 0
    static PlaneMap mobius(cpx a, cpx b, cpx c, cpx d) {
        if (std::abs(a * d - b * c) == 0.0)
            throw std::invalid_argument("PlaneMap: degenerate Mobius coefficients");
        PlaneMap m;
        m.kind_ = Kind::mobius;
        m.a_ = a; m.b_ = b; m.c_ = c; m.d_ = d;
        return m;
    }

    static PlaneMap identity() { return mobius(1.0, 0.0, 0.0, 1.0); }
    static PlaneMap scaling(cpx factor) { return mobius(factor, 0.0, 0.0, 1.0); }
    /// z -> factor / z
    static PlaneMap inversion(cpx factor = 1.0) { return mobius(0.0, factor, 1.0, 0.0); }

    /// x -> x |x|^{a-1}, a > 0
    static PlaneMap radial_power(double exponent) {
        if (!(exponent > 0.0))
            throw std::invalid_argument("PlaneMap: radial power exponent must be positive");
        PlaneMap m;
        m.kind_ = Kind::radial_power;
        m.exponent_ = exponent;
        return m;
    }

    Kind kind() const { return kind_; }
    double exponent() const { return exponent_; }

    /// Composition applying `first`, then `second`.
    static PlaneMap compose(const PlaneMap& second, const PlaneMap& first) {
        if (second.kind_ == Kind::mobius && first.kind_ == Kind::mobius)
            return mobius(second.a_ * first.a_ + second.b_ * first.c_,
                          second.a_ * first.b_ + second.b_ * first.d_,
                          second.c_ * first.a_ + second.d_ * first.c_,
                          second.c_ * first.b_ + second.d_ * first.d_);
        PlaneMap m;
        m.kind_ = Kind::composition;
        auto append = [&m](const PlaneMap& p) {
            if (p.kind_ == Kind::composition)
                m.parts_.insert(m.parts_.end(), p.parts_.begin(), p.parts_.end());
            else
                m.parts_.push_back(p);
        };
        append(first);
        append(second);
        if (m.parts_.empty()) throw std::invalid_argument("PlaneMap: empty composition");
        return m;
    }

    cpx apply(cpx z) const {
        switch (kind_) {
            case Kind::mobius: {
                const cpx den = c_ * z + d_;
                if (std::abs(den) == 0.0)
                    throw std::domain_error("PlaneMap: point at the Mobius pole");
                return (a_ * z + b_) / den;
            }
            case Kind::radial_power: {
                const double r = std::abs(z);
                if (r == 0.0) return 0.0;
                return z * std::pow(r, exponent_ - 1.0);
            }
            case Kind::composition: {
                cpx w = z;
                for (const PlaneMap& p : parts_) w = p.apply(w);
                return w;
            }
        }
        throw std::logic_error("PlaneMap: bad kind");
    }

    cpx operator()(cpx z) const { return apply(z); }

    /// True when the map fixes {0, infinity} as a set, i.e. restricts to
    /// a self-map of the punctured plane: z -> cz, z -> c/z, radial
    /// powers and their compositions.
    bool punctured_compatible() const {
        switch (kind_) {
            case Kind::mobius:
                return (b_ == cpx(0.0) && c_ == cpx(0.0)) ||
                       (a_ == cpx(0.0) && d_ == cpx(0.0));
            case Kind::radial_power:
                return true;
            case Kind::composition:
                for (const PlaneMap& p : parts_)
                    if (!p.punctured_compatible()) return false;
                return true;
        }
        return false;
    }

    /// Distance from z to the nearest point where the map is singular
    /// (Mobius poles and the puncture for radial powers).
    double distance_to_singularity(cpx z) const {
        switch (kind_) {
            case Kind::mobius:
                if (std::abs(c_) == 0.0) return std::numeric_limits<double>::infinity();
                return std::abs(z + d_ / c_);
            case Kind::radial_power:
                return std::abs(z);
            case Kind::composition: {
                // conservative: first factor only, then push forward
                double dist = std::numeric_limits<double>::infinity();
                cpx w = z;
                for (const PlaneMap& p : parts_) {
                    dist = std::min(dist, p.distance_to_singularity(w));
                    if (dist == 0.0) return 0.0;
                    w = p.apply(w);
                }
                return dist;
            }
        }
        return 0.0;
    }

  private:
    Kind kind_ = Kind::mobius;
    cpx a_{1.0}, b_{0.0}, c_{0.0}, d_{1.0};
    double exponent_ = 1.0;
    std::vector<PlaneMap> parts_;
};

}  // namespace ferrand
