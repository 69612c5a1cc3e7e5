#pragma once

// Brute-force estimator of ring-condenser capacity (= modulus of the
// joining curve family) for plane condensers: the equilibrium potential
// is computed on a uniform cell-centered grid with a 5-point Laplacian,
// plates entering as Dirichlet cells and the box sides as insulation,
// and the capacity is the discrete Dirichlet energy of the solution.
//
// Unbounded plates are compactified by a single inversion
// zeta = 1/(z - w); the modulus is conformally invariant, so the choice
// of w only affects conditioning.  The linear system is solved by
// conjugate gradients preconditioned with a geometric multigrid V-cycle;
// iteration order is fixed, so repeated runs are bit-identical.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace ferrand {

using cpx = std::complex<double>;

// --- plate primitives ------------------------------------------------------

struct Segment {
    cpx a, b;
};
struct Arc {  // counterclockwise from theta0 to theta1, theta1 - theta0 <= 2 pi
    cpx center;
    double radius;
    double theta0, theta1;
};
struct Disk {  // closed disk, a filled plate
    cpx center;
    double radius;
};
struct Ray {  // origin + t * dir, t >= 0, through infinity
    cpx origin;
    cpx dir;
};

using Primitive = std::variant<Segment, Arc, Disk, Ray>;

inline Arc full_circle(cpx center, double radius) {
    return Arc{center, radius, 0.0, 2.0 * M_PI};
}

namespace detail {

inline double cross(cpx a, cpx b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(cpx a, cpx b) { return a.real() * b.real() + a.imag() * b.imag(); }

inline bool angle_in_range(double phi, double t0, double t1) {
    double d = std::fmod(phi - t0, 2.0 * M_PI);
    if (d < 0) d += 2.0 * M_PI;
    return d <= t1 - t0 + 1e-15;
}

inline cpx closest_point(cpx p, const Segment& s) {
    const cpx ab = s.b - s.a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return s.a;
    const double t = std::clamp(dot(p - s.a, ab) / len2, 0.0, 1.0);
    return s.a + t * ab;
}

inline cpx closest_point(cpx p, const Arc& a) {
    const cpx v = p - a.center;
    const double phi = std::atan2(v.imag(), v.real());
    if (std::abs(v) > 0.0 && angle_in_range(phi, a.theta0, a.theta1))
        return a.center + a.radius * v / std::abs(v);
    const cpx e0 = a.center + std::polar(a.radius, a.theta0);
    const cpx e1 = a.center + std::polar(a.radius, a.theta1);
    return std::abs(p - e0) <= std::abs(p - e1) ? e0 : e1;
}

inline cpx closest_point(cpx p, const Disk& d) {
    const cpx v = p - d.center;
    const double r = std::abs(v);
    if (r <= d.radius) return p;
    return d.center + d.radius * v / r;
}

inline cpx closest_point(cpx p, const Ray& r) {
    const cpx d = r.dir / std::abs(r.dir);
    const double t = std::max(0.0, dot(p - r.origin, d));
    return r.origin + t * d;
}

inline cpx closest_point(cpx p, const Primitive& prim) {
    return std::visit([&](const auto& g) { return closest_point(p, g); }, prim);
}

inline double distance(cpx p, const Primitive& prim) {
    return std::abs(p - closest_point(p, prim));
}

inline bool is_unbounded(const Primitive& prim) {
    return std::holds_alternative<Ray>(prim);
}

inline std::vector<cpx> sample_boundary(const Primitive& prim, int n) {
    std::vector<cpx> pts;
    pts.reserve(n);
    if (const auto* s = std::get_if<Segment>(&prim)) {
        for (int i = 0; i < n; ++i)
            pts.push_back(s->a + (s->b - s->a) * (double(i) / (n - 1)));
    } else if (const auto* a = std::get_if<Arc>(&prim)) {
        for (int i = 0; i < n; ++i)
            pts.push_back(a->center +
                          std::polar(a->radius, a->theta0 +
                                     (a->theta1 - a->theta0) * (double(i) / (n - 1))));
    } else if (const auto* d = std::get_if<Disk>(&prim)) {
        for (int i = 0; i < n; ++i)
            pts.push_back(d->center + std::polar(d->radius, 2.0 * M_PI * i / n));
    } else if (const auto* r = std::get_if<Ray>(&prim)) {
        // geometric parameter spacing; only used for nearest-pair searches,
        // where the exact foot point is computed against the other plate
        const cpx dhat = r->dir / std::abs(r->dir);
        for (int i = 0; i < n; ++i) {
            const double u = double(i) / (n - 1);
            pts.push_back(r->origin + dhat * (std::exp(6.0 * u) - 1.0));
        }
    }
    return pts;
}

// --- inversion of primitives ----------------------------------------------

// Image of a full circle (center q, radius rho, not through the origin)
// under zeta = 1/u.
inline void invert_circle(cpx q, double rho, cpx& q_img, double& rho_img) {
    const double denom = std::norm(q) - rho * rho;
    q_img = std::conj(q) / denom;
    rho_img = std::fabs(rho / denom);
}

inline constexpr double kLineSnapTol = 1e-9;

// Image of the primitive under zeta = 1/(z - w).  w must not lie on the
// primitive.  Lines and circles through w map to lines; their bounded
// pieces come back as segments.
inline Primitive invert_primitive(const Primitive& prim, cpx w) {
    if (distance(w, prim) < kLineSnapTol)
        throw std::invalid_argument("condenser: inversion center lies on a plate");
    const auto map = [w](cpx z) { return 1.0 / (z - w); };

    if (const auto* s = std::get_if<Segment>(&prim)) {
        const cpx d = (s->b - s->a) / std::abs(s->b - s->a);
        if (std::fabs(cross(w - s->a, d)) < kLineSnapTol * (1.0 + std::abs(w - s->a)))
            return Segment{map(s->a), map(s->b)};  // line through w
        // image circle through 0 with center 1/(2 f), f = foot of w on the line
        const cpx foot = s->a + dot(w - s->a, d) * d - w;
        const cpx c = 0.5 / foot;
        const double r = std::abs(c);
        const cpx za = map(s->a), zb = map(s->b), zm = map(0.5 * (s->a + s->b));
        double t0 = std::arg(za - c), t1 = std::arg(zb - c), tm = std::arg(zm - c);
        if (t1 < t0) std::swap(t0, t1);
        if (!angle_in_range(tm, t0, t1)) {  // take the complementary arc
            const double t = t0;
            t0 = t1;
            t1 = t + 2.0 * M_PI;
        }
        return Arc{c, r, t0, t1};
    }
    if (const auto* r = std::get_if<Ray>(&prim)) {
        const cpx d = r->dir / std::abs(r->dir);
        if (std::fabs(cross(w - r->origin, d)) < kLineSnapTol * (1.0 + std::abs(w - r->origin)))
            return Segment{map(r->origin), cpx(0.0)};  // radial through w; infinity -> 0
        const cpx foot = r->origin + dot(w - r->origin, d) * d - w;
        const cpx c = 0.5 / foot;
        const double rad = std::abs(c);
        const cpx za = map(r->origin), zm = map(r->origin + d * (1.0 + std::abs(r->origin - w)));
        const cpx zb = cpx(0.0);  // image of infinity
        double t0 = std::arg(za - c), t1 = std::arg(zb - c), tm = std::arg(zm - c);
        if (t1 < t0) std::swap(t0, t1);
        if (!angle_in_range(tm, t0, t1)) {
            const double t = t0;
            t0 = t1;
            t1 = t + 2.0 * M_PI;
        }
        return Arc{c, rad, t0, t1};
    }
    if (const auto* a = std::get_if<Arc>(&prim)) {
        const cpx q = a->center - w;
        if (std::fabs(std::abs(q) - a->radius) < kLineSnapTol * a->radius) {
            // circle through w: the arc (w excluded) maps to a segment
            const cpx za = map(a->center + std::polar(a->radius, a->theta0));
            const cpx zb = map(a->center + std::polar(a->radius, a->theta1));
            return Segment{za, zb};
        }
        cpx c;
        double rad;
        invert_circle(q, a->radius, c, rad);
        const cpx za = map(a->center + std::polar(a->radius, a->theta0));
        const cpx zb = map(a->center + std::polar(a->radius, a->theta1));
        const cpx zm = map(a->center + std::polar(a->radius, 0.5 * (a->theta0 + a->theta1)));
        if (a->theta1 - a->theta0 >= 2.0 * M_PI - 1e-12)
            return Arc{c, rad, 0.0, 2.0 * M_PI};
        double t0 = std::arg(za - c), t1 = std::arg(zb - c), tm = std::arg(zm - c);
        if (t1 < t0) std::swap(t0, t1);
        if (!angle_in_range(tm, t0, t1)) {
            const double t = t0;
            t0 = t1;
            t1 = t + 2.0 * M_PI;
        }
        return Arc{c, rad, t0, t1};
    }
    const auto& dk = std::get<Disk>(prim);
    const cpx q = dk.center - w;
    if (std::abs(q) <= dk.radius + kLineSnapTol)
        throw std::invalid_argument("condenser: inversion center inside a disk plate");
    cpx c;
    double rad;
    invert_circle(q, dk.radius, c, rad);
    return Disk{c, rad};
}

inline void bounding_box(const Primitive& prim, double& xmin, double& xmax,
                         double& ymin, double& ymax) {
    auto grow = [&](cpx p) {
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag());
        ymax = std::max(ymax, p.imag());
    };
    if (const auto* s = std::get_if<Segment>(&prim)) {
        grow(s->a);
        grow(s->b);
    } else if (const auto* a = std::get_if<Arc>(&prim)) {
        grow(a->center + std::polar(a->radius, a->theta0));
        grow(a->center + std::polar(a->radius, a->theta1));
        for (int k = -4; k <= 8; ++k) {
            const double phi = k * M_PI_2;
            if (angle_in_range(phi, a->theta0, a->theta1))
                grow(a->center + std::polar(a->radius, phi));
        }
    } else if (const auto* d = std::get_if<Disk>(&prim)) {
        grow(d->center + cpx(d->radius, d->radius));
        grow(d->center - cpx(d->radius, d->radius));
    } else {
        throw std::logic_error("condenser: unbounded primitive reached the grid");
    }
}

inline Primitive mirror_primitive(const Primitive& prim) {
    auto m = [](cpx z) { return std::conj(z); };
    if (const auto* s = std::get_if<Segment>(&prim)) return Segment{m(s->a), m(s->b)};
    if (const auto* d = std::get_if<Disk>(&prim)) return Disk{m(d->center), d->radius};
    if (const auto* r = std::get_if<Ray>(&prim)) return Ray{m(r->origin), m(r->dir)};
    const auto& a = std::get<Arc>(prim);
    return Arc{m(a.center), a.radius, -a.theta1, -a.theta0};
}

inline bool primitives_equal(const Primitive& x, const Primitive& y, double tol) {
    if (x.index() != y.index()) return false;
    if (const auto* s = std::get_if<Segment>(&x)) {
        const auto& t = std::get<Segment>(y);
        return (std::abs(s->a - t.a) < tol && std::abs(s->b - t.b) < tol) ||
               (std::abs(s->a - t.b) < tol && std::abs(s->b - t.a) < tol);
    }
    if (const auto* d = std::get_if<Disk>(&x)) {
        const auto& t = std::get<Disk>(y);
        return std::abs(d->center - t.center) < tol && std::fabs(d->radius - t.radius) < tol;
    }
    if (const auto* a = std::get_if<Arc>(&x)) {
        const auto& t = std::get<Arc>(y);
        if (std::abs(a->center - t.center) > tol || std::fabs(a->radius - t.radius) > tol)
            return false;
        // same circle: compare endpoint sets and midpoints
        const cpx e0 = a->center + std::polar(a->radius, a->theta0);
        const cpx e1 = a->center + std::polar(a->radius, a->theta1);
        const cpx f0 = t.center + std::polar(t.radius, t.theta0);
        const cpx f1 = t.center + std::polar(t.radius, t.theta1);
        const cpx em = a->center + std::polar(a->radius, 0.5 * (a->theta0 + a->theta1));
        const cpx fm = t.center + std::polar(t.radius, 0.5 * (t.theta0 + t.theta1));
        const bool ends = (std::abs(e0 - f0) < tol && std::abs(e1 - f1) < tol) ||
                          (std::abs(e0 - f1) < tol && std::abs(e1 - f0) < tol);
        return ends && std::abs(em - fm) < tol;
    }
    return false;
}

}  // namespace detail

// --- condenser specification -------------------------------------------------

struct CondenserSpec {
    std::vector<Primitive> plate_e;  // potential 1
    std::vector<Primitive> plate_f;  // potential 0

    // inversion center for compactification; chosen automatically on the
    // segment between the plates when an unbounded primitive is present
    std::optional<cpx> inversion_center;

    // box half-side as a multiple of the plate bounding radius
    double margin = 8.0;

    // grid spacing override; default is separation/16 after compactification
    std::optional<double> grid_h;
};

struct SolveReport {
    double capacity = 0.0;
    double h = 0.0;
    int iterations = 0;
    double residual = 0.0;  // final relative residual of the linear solve
    int nx = 0, ny = 0;
    bool half_grid = false;
    double separation = 0.0;  // plate separation in the solved (image) plane
};

struct RichardsonResult {
    std::array<SolveReport, 3> reports;  // at h, h/2, h/4
    double extrapolated = 0.0;
    double fitted_order = 0.0;
    bool refused = false;  // non-monotone sequence: extrapolated = finest raw value

    double best() const { return extrapolated; }
};

namespace detail {

// shortest connecting pair between the two plates, by dense sampling of
// one side against exact foot points on the other
inline void nearest_pair(const std::vector<Primitive>& pe, const std::vector<Primitive>& pf,
                         cpx& best_e, cpx& best_f, double& best_d) {
    best_d = std::numeric_limits<double>::infinity();
    for (const auto& e : pe) {
        for (cpx p : sample_boundary(e, 512)) {
            for (const auto& f : pf) {
                const cpx q = closest_point(p, f);
                const double d = std::abs(p - q);
                if (d < best_d) {
                    best_d = d;
                    best_e = p;
                    best_f = q;
                }
            }
        }
    }
    // refine from the other side
    for (const auto& f : pf) {
        for (cpx q : sample_boundary(f, 512)) {
            for (const auto& e : pe) {
                const cpx p = closest_point(q, e);
                const double d = std::abs(p - q);
                if (d < best_d) {
                    best_d = d;
                    best_e = p;
                    best_f = q;
                }
            }
        }
    }
}

// --- multigrid-preconditioned CG on the masked 5-point Laplacian -----------

struct GridLevel {
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> fixed;  // Dirichlet cell at this level
    std::vector<std::uint8_t> deg;    // in-box neighbor count (0 for fixed)
    std::vector<int> near_plate;      // free cells within a few cells of a plate
    std::vector<double> x, b, r;      // work vectors for the V-cycle

    std::size_t size() const { return std::size_t(nx) * ny; }
    int idx(int i, int j) const { return j * nx + i; }

    void finalize_mask() {
        deg.assign(size(), 0);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int c = idx(i, j);
                if (fixed[c]) continue;
                int d = 0;
                if (i > 0) ++d;
                if (i + 1 < nx) ++d;
                if (j > 0) ++d;
                if (j + 1 < ny) ++d;
                deg[c] = std::uint8_t(d);
            }
        // dilate the plate mask to collect the near-plate band, where the
        // coarse-grid correction is least reliable
        std::vector<std::uint8_t> band(fixed);
        for (int pass = 0; pass < 10; ++pass) {
            std::vector<std::uint8_t> next(band);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    if (band[idx(i, j)]) continue;
                    if ((i > 0 && band[idx(i - 1, j)]) || (i + 1 < nx && band[idx(i + 1, j)]) ||
                        (j > 0 && band[idx(i, j - 1)]) || (j + 1 < ny && band[idx(i, j + 1)]))
                        next[idx(i, j)] = 1;
                }
            band.swap(next);
        }
        near_plate.clear();
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int c = idx(i, j);
                if (band[c] && !fixed[c]) near_plate.push_back(c);
            }
    }
};

// out = A x on free cells; fixed cells carry zero through the operator
inline void apply_laplacian(const GridLevel& g, const std::vector<double>& x,
                            std::vector<double>& out) {
    const int nx = g.nx, ny = g.ny;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int c = g.idx(i, j);
            if (g.fixed[c]) {
                out[c] = 0.0;
                continue;
            }
            double acc = g.deg[c] * x[c];
            if (i > 0 && !g.fixed[c - 1]) acc -= x[c - 1];
            if (i + 1 < nx && !g.fixed[c + 1]) acc -= x[c + 1];
            if (j > 0 && !g.fixed[c - nx]) acc -= x[c - nx];
            if (j + 1 < ny && !g.fixed[c + nx]) acc -= x[c + nx];
            out[c] = acc;
        }
    }
}

// one symmetric Gauss-Seidel sweep (forward then backward)
inline void sgs_sweep(const GridLevel& g, std::vector<double>& x, const std::vector<double>& b) {
    const int nx = g.nx, ny = g.ny;
    auto relax = [&](int i, int j) {
        const int c = g.idx(i, j);
        if (g.fixed[c] || g.deg[c] == 0) return;
        double acc = b[c];
        if (i > 0 && !g.fixed[c - 1]) acc += x[c - 1];
        if (i + 1 < nx && !g.fixed[c + 1]) acc += x[c + 1];
        if (j > 0 && !g.fixed[c - nx]) acc += x[c - nx];
        if (j + 1 < ny && !g.fixed[c + nx]) acc += x[c + nx];
        x[c] = acc / g.deg[c];
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) relax(i, j);
    for (int j = ny - 1; j >= 0; --j)
        for (int i = nx - 1; i >= 0; --i) relax(i, j);
}

// symmetric Gauss-Seidel restricted to the near-plate band
inline void sgs_local(const GridLevel& g, std::vector<double>& x, const std::vector<double>& b) {
    const int nx = g.nx;
    auto relax = [&](int c) {
        if (g.deg[c] == 0) return;
        double acc = b[c];
        const int i = c % nx, j = c / nx;
        if (i > 0 && !g.fixed[c - 1]) acc += x[c - 1];
        if (i + 1 < nx && !g.fixed[c + 1]) acc += x[c + 1];
        if (j > 0 && !g.fixed[c - nx]) acc += x[c - nx];
        if (j + 1 < g.ny && !g.fixed[c + nx]) acc += x[c + nx];
        x[c] = acc / g.deg[c];
    };
    for (std::size_t k = 0; k < g.near_plate.size(); ++k) relax(g.near_plate[k]);
    for (std::size_t k = g.near_plate.size(); k-- > 0;) relax(g.near_plate[k]);
}

class MultigridHierarchy {
  public:
    explicit MultigridHierarchy(GridLevel&& finest) {
        levels_.push_back(std::move(finest));
        while (levels_.back().size() > 2048 && levels_.back().nx > 3 && levels_.back().ny > 3) {
            const GridLevel& f = levels_.back();
            GridLevel c;
            c.nx = (f.nx + 1) / 2;
            c.ny = (f.ny + 1) / 2;
            c.fixed.assign(c.size(), 0);
            for (int j = 0; j < f.ny; ++j)
                for (int i = 0; i < f.nx; ++i)
                    if (f.fixed[f.idx(i, j)]) c.fixed[c.idx(i / 2, j / 2)] = 1;
            c.finalize_mask();
            c.x.assign(c.size(), 0.0);
            c.b.assign(c.size(), 0.0);
            c.r.assign(c.size(), 0.0);
            levels_.push_back(std::move(c));
        }
        levels_.front().r.assign(levels_.front().size(), 0.0);
    }

    GridLevel& finest() { return levels_.front(); }

    // z = M^{-1} r via one V(1,1) cycle with symmetric GS smoothing
    void precondition(const std::vector<double>& r, std::vector<double>& z) {
        GridLevel& top = levels_.front();
        std::fill(z.begin(), z.end(), 0.0);
        v_cycle(0, z, r);
    }

  private:
    void v_cycle(std::size_t l, std::vector<double>& x, const std::vector<double>& b) {
        GridLevel& g = levels_[l];
        if (l + 1 == levels_.size()) {
            for (int s = 0; s < 400; ++s) sgs_sweep(g, x, b);
            return;
        }
        sgs_sweep(g, x, b);
        sgs_local(g, x, b);
        sgs_local(g, x, b);
        apply_laplacian(g, x, g.r);
        for (std::size_t k = 0; k < g.size(); ++k) g.r[k] = b[k] - g.r[k];

        GridLevel& c = levels_[l + 1];
        std::fill(c.b.begin(), c.b.end(), 0.0);
        transfer(g, c, g.r, c.b, /*restrict_mode=*/true);
        std::fill(c.x.begin(), c.x.end(), 0.0);
        v_cycle(l + 1, c.x, c.b);
        transfer(g, c, c.x, x, /*restrict_mode=*/false);
        sgs_local(g, x, b);
        sgs_local(g, x, b);
        sgs_sweep(g, x, b);
    }

    // Cell-centered bilinear interpolation and its adjoint.
    // restrict_mode=true scatters P^T fine -> coarse, otherwise the
    // coarse correction is interpolated and added to the fine vector.
    static void transfer(const GridLevel& f, const GridLevel& c,
                         const std::vector<double>& src, std::vector<double>& dst,
                         bool restrict_mode) {
        for (int j = 0; j < f.ny; ++j) {
            const int J = j / 2;
            int Jn = (j & 1) ? J + 1 : J - 1;
            Jn = std::clamp(Jn, 0, c.ny - 1);
            for (int i = 0; i < f.nx; ++i) {
                const int fc = f.idx(i, j);
                if (f.fixed[fc]) continue;
                const int I = i / 2;
                int In = (i & 1) ? I + 1 : I - 1;
                In = std::clamp(In, 0, c.nx - 1);
                const int c00 = c.idx(I, J), c10 = c.idx(In, J);
                const int c01 = c.idx(I, Jn), c11 = c.idx(In, Jn);
                if (restrict_mode) {
                    // plain adjoint: the dimensionless 5-point operator
                    // rediscretized at 2h matches P^T A P only with an
                    // unscaled transpose
                    const double v = src[fc];
                    if (!c.fixed[c00]) dst[c00] += 0.5625 * v;
                    if (!c.fixed[c10]) dst[c10] += 0.1875 * v;
                    if (!c.fixed[c01]) dst[c01] += 0.1875 * v;
                    if (!c.fixed[c11]) dst[c11] += 0.0625 * v;
                } else {
                    double acc = 0.0;
                    if (!c.fixed[c00]) acc += 0.5625 * src[c00];
                    if (!c.fixed[c10]) acc += 0.1875 * src[c10];
                    if (!c.fixed[c01]) acc += 0.1875 * src[c01];
                    if (!c.fixed[c11]) acc += 0.0625 * src[c11];
                    dst[fc] += acc;
                }
            }
        }
    }

    std::vector<GridLevel> levels_;
};

struct PcgResult {
    int iterations = 0;
    double residual = 0.0;
};

inline PcgResult pcg_solve(MultigridHierarchy& mg, const std::vector<double>& b,
                           std::vector<double>& x, double rel_tol, int max_iter) {
    GridLevel& g = mg.finest();
    const std::size_t n = g.size();
    std::vector<double> r(b), z(n, 0.0), p(n, 0.0), ap(n, 0.0);
    x.assign(n, 0.0);

    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return {0, 0.0};

    mg.precondition(r, z);
    p = z;
    double rz = 0.0;
    for (std::size_t k = 0; k < n; ++k) rz += r[k] * z[k];

    double best_res = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int it = 1; it <= max_iter; ++it) {
        apply_laplacian(g, p, ap);
        double pap = 0.0;
        for (std::size_t k = 0; k < n; ++k) pap += p[k] * ap[k];
        if (!(pap > 0.0)) throw std::runtime_error("condenser: PCG lost positive definiteness");
        const double alpha = rz / pap;
        double rnorm = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
            rnorm += r[k] * r[k];
        }
        rnorm = std::sqrt(rnorm);
        const double rel = rnorm / bnorm;
        if (rel < best_res) {
            best_res = rel;
            since_best = 0;
        } else if (++since_best > 150) {
            throw std::runtime_error("condenser: solver stagnation");
        }
#ifdef FERRAND_PCG_TRACE
        if (it % 10 == 0 || rel <= rel_tol) std::fprintf(stderr, "  it=%d rel=%.3e\n", it, rel);
#endif
        if (rel <= rel_tol) return {it, rel};
        mg.precondition(r, z);
        double rz_new = 0.0;
        for (std::size_t k = 0; k < n; ++k) rz_new += r[k] * z[k];
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    throw std::runtime_error("condenser: PCG iteration cap exceeded");
}

}  // namespace detail

/// Solves the condenser at grid spacing h and returns the capacity with
/// solve diagnostics.
inline SolveReport solve_capacity(const CondenserSpec& spec, double h) {
    if (spec.plate_e.empty() || spec.plate_f.empty())
        throw std::invalid_argument("condenser: both plates must be nonempty");
    if (!(h > 0.0)) throw std::invalid_argument("condenser: h must be positive");

    // compactify if needed
    bool needs_inversion = spec.inversion_center.has_value();
    for (const auto& p : spec.plate_e)
        needs_inversion = needs_inversion || detail::is_unbounded(p);
    for (const auto& p : spec.plate_f)
        needs_inversion = needs_inversion || detail::is_unbounded(p);

    std::vector<Primitive> pe = spec.plate_e, pf = spec.plate_f;
    if (needs_inversion) {
        cpx w;
        if (spec.inversion_center) {
            w = *spec.inversion_center;
        } else {
            cpx a, b;
            double d;
            detail::nearest_pair(pe, pf, a, b, d);
            if (!(d > 0.0)) throw std::invalid_argument("condenser: plates touch");
            w = 0.5 * (a + b);
        }
        for (auto& p : pe) p = detail::invert_primitive(p, w);
        for (auto& p : pf) p = detail::invert_primitive(p, w);
    }

    // separation in the solved plane
    cpx ne, nf;
    double sep;
    detail::nearest_pair(pe, pf, ne, nf, sep);
    if (!(sep > 0.0)) throw std::invalid_argument("condenser: plates intersect");
    if (sep < 4.0 * h)
        throw std::invalid_argument("condenser: plate separation below 4h; refine the grid");

    // bounding box and mirror symmetry
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& p : pe) detail::bounding_box(p, xmin, xmax, ymin, ymax);
    for (const auto& p : pf) detail::bounding_box(p, xmin, xmax, ymin, ymax);
    const double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    const double brad = std::max({0.5 * (xmax - xmin), 0.5 * (ymax - ymin), 2.0 * h});

    auto plate_symmetric = [&](const std::vector<Primitive>& plate) {
        for (const auto& p : plate) {
            const Primitive m = detail::mirror_primitive(p);
            bool found = false;
            for (const auto& q : plate)
                if (detail::primitives_equal(m, q, 1e-9 * (1.0 + brad))) {
                    found = true;
                    break;
                }
            if (!found) return false;
        }
        return true;
    };
    const bool symmetric = std::fabs(cy) < 1e-12 * (1.0 + brad) &&
                           plate_symmetric(pe) && plate_symmetric(pf);

    if (!(spec.margin >= 1.25))
        throw std::invalid_argument("condenser: margin must be at least 1.25");
    const double half = spec.margin * brad;

    // even cell count keeps y = 0 on a cell boundary, so the symmetric
    // half-grid is exactly half of the full one
    const int nx = 2 * int(std::ceil(half / h));
    const int ny_full = nx;
    const int ny = symmetric ? ny_full / 2 : ny_full;
    const double x0 = cx - 0.5 * nx * h;
    const double y0 = symmetric ? 0.0 : cy - 0.5 * ny_full * h;
    if (std::size_t(nx) * ny > std::size_t(28'000'000))
        throw std::invalid_argument("condenser: grid too large; increase h or reduce margin");

    // rasterize: a cell is plate when the primitive passes within h/2 of
    // its center
    detail::GridLevel g;
    g.nx = nx;
    g.ny = ny;
    g.fixed.assign(g.size(), 0);
    std::vector<double> bvec(g.size(), 0.0);
    std::vector<double> uval(g.size(), 0.0);

    std::size_t count_e = 0, count_f = 0;
    auto stamp = [&](const std::vector<Primitive>& plate, std::uint8_t tag, std::size_t& count) {
        for (const auto& prim : plate) {
            double pxmin = 1e300, pxmax = -1e300, pymin = 1e300, pymax = -1e300;
            detail::bounding_box(prim, pxmin, pxmax, pymin, pymax);
            const int i0 = std::max(0, int(std::floor((pxmin - h - x0) / h)));
            const int i1 = std::min(nx - 1, int(std::ceil((pxmax + h - x0) / h)));
            const int j0 = std::max(0, int(std::floor((pymin - h - y0) / h)));
            const int j1 = std::min(ny - 1, int(std::ceil((pymax + h - y0) / h)));
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i) {
                    const cpx center(x0 + (i + 0.5) * h, y0 + (j + 0.5) * h);
                    if (detail::distance(center, prim) <= 0.5 * h) {
                        const int c = g.idx(i, j);
                        if (g.fixed[c] && uval[c] != (tag == 1 ? 1.0 : 0.0))
                            throw std::invalid_argument(
                                "condenser: plates intersect after rasterization");
                        if (!g.fixed[c]) ++count;
                        g.fixed[c] = 1;
                        uval[c] = (tag == 1) ? 1.0 : 0.0;
                    }
                }
        }
    };
    stamp(pe, 1, count_e);
    stamp(pf, 2, count_f);
    if (count_e < 3 || count_f < 3)
        throw std::invalid_argument("condenser: h too coarse, a plate rasterizes to fewer than 3 cells");

    g.finalize_mask();

    // Dirichlet contributions to the right-hand side
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int c = g.idx(i, j);
            if (g.fixed[c]) continue;
            double acc = 0.0;
            if (i > 0 && g.fixed[c - 1]) acc += uval[c - 1];
            if (i + 1 < nx && g.fixed[c + 1]) acc += uval[c + 1];
            if (j > 0 && g.fixed[c - nx]) acc += uval[c - nx];
            if (j + 1 < ny && g.fixed[c + nx]) acc += uval[c + nx];
            bvec[c] = acc;
        }

    detail::MultigridHierarchy mg(std::move(g));
    std::vector<double> sol;
    const detail::PcgResult pr = detail::pcg_solve(mg, bvec, sol, 1e-10, 4000);

    // assemble the potential and its Dirichlet energy
    const detail::GridLevel& gf = mg.finest();
    for (std::size_t k = 0; k < gf.size(); ++k)
        if (gf.fixed[k]) sol[k] = uval[k];
    double energy = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int c = j * nx + i;
            if (i + 1 < nx) {
                const double d = sol[c + 1] - sol[c];
                energy += d * d;
            }
            if (j + 1 < ny) {
                const double d = sol[c + nx] - sol[c];
                energy += d * d;
            }
        }
    if (symmetric) energy *= 2.0;

    SolveReport rep;
    rep.capacity = energy;
    rep.h = h;
    rep.iterations = pr.iterations;
    rep.residual = pr.residual;
    rep.nx = nx;
    rep.ny = ny;
    rep.half_grid = symmetric;
    rep.separation = sep;
    return rep;
}

/// Default grid spacing: plate separation (after compactification) / 16.
inline double default_grid_h(const CondenserSpec& spec) {
    if (spec.grid_h) return *spec.grid_h;
    std::vector<Primitive> pe = spec.plate_e, pf = spec.plate_f;
    bool needs_inversion = spec.inversion_center.has_value();
    for (const auto& p : pe) needs_inversion = needs_inversion || detail::is_unbounded(p);
    for (const auto& p : pf) needs_inversion = needs_inversion || detail::is_unbounded(p);
    if (needs_inversion) {
        cpx w;
        if (spec.inversion_center) {
            w = *spec.inversion_center;
        } else {
            cpx a, b;
            double d;
            detail::nearest_pair(pe, pf, a, b, d);
            w = 0.5 * (a + b);
        }
        for (auto& p : pe) p = detail::invert_primitive(p, w);
        for (auto& p : pf) p = detail::invert_primitive(p, w);
    }
    cpx a, b;
    double sep;
    detail::nearest_pair(pe, pf, a, b, sep);
    if (!(sep > 0.0)) throw std::invalid_argument("condenser: plates touch");
    return sep / 16.0;
}

inline SolveReport solve_capacity(const CondenserSpec& spec) {
    return solve_capacity(spec, default_grid_h(spec));
}

/// Fits c(h) = c* + C h^q through three reports at h, h/2, h/4 and
/// returns c*.  A non-monotone sequence refuses extrapolation and falls
/// back to the finest raw value with the refusal flagged.
inline RichardsonResult richardson_extrapolate(const std::array<SolveReport, 3>& reports) {
    RichardsonResult res;
    res.reports = reports;
    const double c0 = reports[0].capacity, c1 = reports[1].capacity, c2 = reports[2].capacity;
    const double d0 = c0 - c1, d1 = c1 - c2;
    if (d0 == 0.0 && d1 == 0.0) {  // already converged
        res.extrapolated = c2;
        res.fitted_order = std::numeric_limits<double>::infinity();
        return res;
    }
    if (d0 * d1 <= 0.0 || std::fabs(d1) >= std::fabs(d0)) {
        res.refused = true;
        res.extrapolated = c2;
        res.fitted_order = 0.0;
        return res;
    }
    const double ratio = d0 / d1;  // = 2^q
    if (ratio < 1.32 || ratio > 32.0) {
        // differences shrink too slowly or too fast for a power law at
        // these spacings; the raw finest value is the safer estimate
        res.refused = true;
        res.extrapolated = c2;
        res.fitted_order = std::log2(ratio);
        return res;
    }
    res.fitted_order = std::log2(ratio);
    res.extrapolated = c2 - d1 / (ratio - 1.0);
    return res;
}

/// Solves at h, h/2, h/4 (default h = separation/16) and extrapolates.
inline RichardsonResult solve_richardson(const CondenserSpec& spec) {
    const double h = default_grid_h(spec);
    std::array<SolveReport, 3> reports{solve_capacity(spec, h), solve_capacity(spec, 0.5 * h),
                                       solve_capacity(spec, 0.25 * h)};
    return richardson_extrapolate(reports);
}

}  // namespace ferrand
