#pragma once

// Structured input/output: JSON forms of the result types, the condenser
// spec file schema, and the CSV/SVG writers used by the command line.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ferrand/bounded_value.hpp"
#include "ferrand/condenser.hpp"
#include "ferrand/isometry.hpp"
#include "ferrand/lambda.hpp"

namespace ferrand {

using nlohmann::json;

/// Positional rendering with a fixed digit budget, matching the CLI
/// output contract (plain decimal for ordinary magnitudes).
inline std::string format_value(double x) {
    if (x == 0.0) return "0.000000000000000";
    const double ax = std::fabs(x);
    if (ax >= 1e-4 && ax < 1e16) {
        const int int_digits = std::max(1, int(std::floor(std::log10(ax))) + 1);
        const int prec = std::max(0, 16 - int_digits);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", prec, x);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15e", x);
    return buf;
}

// --- JSON forms -------------------------------------------------------------

inline json to_json(const BoundedValue& v) {
    json j;
    j["lower"] = v.lower;
    j["upper"] = std::isinf(v.upper) ? json("inf") : json(v.upper);
    j["exact"] = v.exact;
    return j;
}

inline json to_json(const SolveReport& r) {
    return json{{"capacity", r.capacity}, {"h", r.h},
                {"iterations", r.iterations}, {"residual", r.residual},
                {"nx", r.nx}, {"ny", r.ny},
                {"half_grid", r.half_grid}, {"separation", r.separation}};
}

inline json to_json(const RichardsonResult& rr) {
    json grids = json::array();
    for (const auto& r : rr.reports) grids.push_back(to_json(r));
    return json{{"grids", grids},
                {"extrapolated", rr.extrapolated},
                {"fitted_order", std::isfinite(rr.fitted_order) ? json(rr.fitted_order) : json("inf")},
                {"refused", rr.refused}};
}

inline json to_json(const DilatationReport& r) {
    return json{{"point", {r.base_point.real(), r.base_point.imag()}},
                {"radii", r.radii}, {"ratios", r.ratios},
                {"samples", r.samples}, {"limsup", r.limsup_estimate}};
}

// --- condenser spec files ----------------------------------------------------

namespace detail {

inline cpx json_point(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument(std::string("condenser spec: ") + what +
                                    " must be a [x, y] pair");
    return cpx(j[0].get<double>(), j[1].get<double>());
}

inline Primitive primitive_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "segment") return Segment{json_point(j.at("from"), "from"), json_point(j.at("to"), "to")};
    if (type == "circle") return full_circle(json_point(j.at("center"), "center"), j.at("radius").get<double>());
    if (type == "arc")
        return Arc{json_point(j.at("center"), "center"), j.at("radius").get<double>(),
                   j.at("theta0").get<double>(), j.at("theta1").get<double>()};
    if (type == "disk") return Disk{json_point(j.at("center"), "center"), j.at("radius").get<double>()};
    if (type == "ray") return Ray{json_point(j.at("origin"), "origin"), json_point(j.at("dir"), "dir")};
    throw std::invalid_argument("condenser spec: unknown primitive type '" + type + "'");
}

inline json primitive_to_json(const Primitive& p) {
    if (const auto* s = std::get_if<Segment>(&p))
        return json{{"type", "segment"}, {"from", {s->a.real(), s->a.imag()}}, {"to", {s->b.real(), s->b.imag()}}};
    if (const auto* a = std::get_if<Arc>(&p))
        return json{{"type", "arc"}, {"center", {a->center.real(), a->center.imag()}},
                    {"radius", a->radius}, {"theta0", a->theta0}, {"theta1", a->theta1}};
    if (const auto* d = std::get_if<Disk>(&p))
        return json{{"type", "disk"}, {"center", {d->center.real(), d->center.imag()}}, {"radius", d->radius}};
    const auto& r = std::get<Ray>(p);
    return json{{"type", "ray"}, {"origin", {r.origin.real(), r.origin.imag()}},
                {"dir", {r.dir.real(), r.dir.imag()}}};
}

}  // namespace detail

inline CondenserSpec condenser_spec_from_json(const json& j) {
    CondenserSpec spec;
    for (const auto& p : j.at("plate_e")) spec.plate_e.push_back(detail::primitive_from_json(p));
    for (const auto& p : j.at("plate_f")) spec.plate_f.push_back(detail::primitive_from_json(p));
    if (j.contains("inversion_center"))
        spec.inversion_center = detail::json_point(j["inversion_center"], "inversion_center");
    if (j.contains("margin")) spec.margin = j["margin"].get<double>();
    if (j.contains("h")) spec.grid_h = j["h"].get<double>();
    return spec;
}

inline json condenser_spec_to_json(const CondenserSpec& spec) {
    json je = json::array(), jf = json::array();
    for (const auto& p : spec.plate_e) je.push_back(detail::primitive_to_json(p));
    for (const auto& p : spec.plate_f) jf.push_back(detail::primitive_to_json(p));
    json j{{"plate_e", je}, {"plate_f", jf}, {"margin", spec.margin}};
    if (spec.inversion_center)
        j["inversion_center"] = {spec.inversion_center->real(), spec.inversion_center->imag()};
    if (spec.grid_h) j["h"] = *spec.grid_h;
    return j;
}

inline CondenserSpec load_condenser_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open condenser spec file: " + path);
    json j;
    in >> j;
    return condenser_spec_from_json(j);
}

// --- CSV / SVG --------------------------------------------------------------

inline std::string sphere_trace_csv(const SphereTrace& tr) {
    std::ostringstream out;
    out << "ray,angle,r_inner,r_outer,x_inner,y_inner,x_outer,y_outer\n";
    for (std::size_t k = 0; k < tr.angles.size(); ++k) {
        out << k << ',' << format_value(tr.angles[k]) << ','
            << format_value(tr.inner_radius[k]) << ',' << format_value(tr.outer_radius[k]) << ','
            << format_value(tr.inner[k].real()) << ',' << format_value(tr.inner[k].imag()) << ','
            << format_value(tr.outer[k].real()) << ',' << format_value(tr.outer[k].imag()) << '\n';
    }
    return out.str();
}

inline std::string sphere_trace_svg(const SphereTrace& tr) {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;  // include the puncture
    auto grow = [&](cpx p) {
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag());
        ymax = std::max(ymax, p.imag());
    };
    for (cpx p : tr.outer) grow(p);
    grow(tr.center);
    const double pad = 0.1 * std::max(xmax - xmin, ymax - ymin);
    xmin -= pad; xmax += pad; ymin -= pad; ymax += pad;
    const double w = xmax - xmin, hgt = ymax - ymin;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << xmin << ' ' << -ymax
        << ' ' << w << ' ' << hgt << "\">\n";
    auto polygon = [&](const std::vector<cpx>& pts, const char* color) {
        out << "  <polygon fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
            << 0.004 * w << "\" points=\"";
        for (cpx p : pts) out << p.real() << ',' << -p.imag() << ' ';
        out << "\"/>\n";
    };
    polygon(tr.outer, "#b03030");
    polygon(tr.inner, "#3050b0");
    out << "  <circle cx=\"" << tr.center.real() << "\" cy=\"" << -tr.center.imag()
        << "\" r=\"" << 0.008 * w << "\" fill=\"#000\"/>\n";
    out << "  <circle cx=\"0\" cy=\"0\" r=\"" << 0.008 * w
        << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"" << 0.003 * w << "\"/>\n";
    out << "</svg>\n";
    return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace ferrand
