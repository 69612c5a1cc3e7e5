// Command-line surface: capacity and distortion evaluations, lambda
// queries, metric-sphere tracing, the grid condenser oracle, dilatation
// reports, the dilatation bound profile, and the one-shot verification
// suite.  Exit codes: 0 success, 1 failed verification or solver error,
// 2 usage error.

#include <complex>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ferrand/capacity.hpp"
#include "ferrand/condenser.hpp"
#include "ferrand/distortion.hpp"
#include "ferrand/io.hpp"
#include "ferrand/isometry.hpp"
#include "ferrand/lambda.hpp"
#include "ferrand/plane_map.hpp"
#include "ferrand/verify.hpp"

namespace {

using ferrand::cpx;

cpx parse_point(const std::string& s) {
    std::istringstream in(s);
    double x, y;
    char comma;
    if (!(in >> x >> comma >> y) || comma != ',')
        throw CLI::ValidationError("point", "expected 'x,y' but got '" + s + "'");
    return {x, y};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// map grammar: stage[|stage...], applied left to right; stages are
//   scale:re[,im]  inv[:re[,im]]  power:a  mobius:ar,ai,br,bi,cr,ci,dr,di
ferrand::PlaneMap parse_map(const std::string& spec) {
    std::optional<ferrand::PlaneMap> acc;
    std::istringstream in(spec);
    std::string stage;
    while (std::getline(in, stage, '|')) {
        const auto colon = stage.find(':');
        const std::string kind = stage.substr(0, colon);
        const std::string args = colon == std::string::npos ? "" : stage.substr(colon + 1);
        ferrand::PlaneMap m = ferrand::PlaneMap::identity();
        if (kind == "scale") {
            const auto v = parse_list(args);
            m = ferrand::PlaneMap::scaling(cpx(v.at(0), v.size() > 1 ? v[1] : 0.0));
        } else if (kind == "inv") {
            cpx c{1.0, 0.0};
            if (!args.empty()) {
                const auto v = parse_list(args);
                c = cpx(v.at(0), v.size() > 1 ? v[1] : 0.0);
            }
            m = ferrand::PlaneMap::inversion(c);
        } else if (kind == "power") {
            m = ferrand::PlaneMap::radial_power(std::stod(args));
        } else if (kind == "mobius") {
            const auto v = parse_list(args);
            if (v.size() != 8)
                throw CLI::ValidationError("map", "mobius needs 8 numbers ar,ai,br,bi,cr,ci,dr,di");
            m = ferrand::PlaneMap::mobius({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]});
        } else {
            throw CLI::ValidationError("map", "unknown map kind '" + kind + "'");
        }
        acc = acc ? ferrand::PlaneMap::compose(m, *acc) : m;
    }
    if (!acc) throw CLI::ValidationError("map", "empty map spec");
    return *acc;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        ferrand::write_file(out_path, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ferrand invariant toolbox: capacities, distortion functions, "
                 "lambda queries, and the grid condenser oracle"};
    app.require_subcommand(1);

    // cap ----------------------------------------------------------------
    auto* cap_cmd = app.add_subcommand("cap", "evaluate ring capacities and their inverses");
    int cap_n = 2;
    std::optional<double> cap_gamma, cap_tau, cap_gamma_inv, cap_tau_inv;
    cap_cmd->add_option("--n", cap_n, "dimension (2 = exact)");
    cap_cmd->add_option("--gamma", cap_gamma, "evaluate gamma_n at t > 1");
    cap_cmd->add_option("--tau", cap_tau, "evaluate tau_n at s > 0");
    cap_cmd->add_option("--gamma-inv", cap_gamma_inv, "invert gamma_n at y > 0");
    cap_cmd->add_option("--tau-inv", cap_tau_inv, "invert tau_n at y > 0");

    // dist ---------------------------------------------------------------
    auto* dist_cmd = app.add_subcommand("dist", "distortion functions phi_K and psi_K");
    double dist_K = 2.0;
    std::optional<double> dist_phi, dist_psi, dist_tis;
    int dist_steps = 0;
    double dist_rmin = 0.05, dist_rmax = 0.95;
    std::string dist_out;
    dist_cmd->add_option("--K", dist_K, "distortion parameter K > 0");
    dist_cmd->add_option("--phi", dist_phi, "evaluate phi_K at r in [0,1]");
    dist_cmd->add_option("--psi", dist_psi, "evaluate psi_K at r in [0,1]");
    dist_cmd->add_option("--tau-inv-scaled", dist_tis, "evaluate tau^{-1}(K tau(t)) at t > 0");
    dist_cmd->add_option("--table", dist_steps, "emit a CSV table with this many rows");
    dist_cmd->add_option("--rmin", dist_rmin, "table range start");
    dist_cmd->add_option("--rmax", dist_rmax, "table range end");
    dist_cmd->add_option("--out", dist_out, "output path (default stdout)");

    // lam ----------------------------------------------------------------
    auto* lam_cmd = app.add_subcommand("lam", "lambda point queries (JSON)");
    std::string lam_x, lam_y;
    bool lam_punctured = false, lam_ball_flag = false, lam_general = false;
    double lam_dgx = 0.0;
    std::string lam_out;
    lam_cmd->add_option("--x", lam_x, "first point as 'x,y'")->required();
    lam_cmd->add_option("--y", lam_y, "second point as 'x,y'")->required();
    lam_cmd->add_flag("--punctured", lam_punctured, "punctured plane (default)");
    lam_cmd->add_flag("--ball", lam_ball_flag, "unit disk");
    lam_cmd->add_flag("--general", lam_general, "general domain via --dgx");
    lam_cmd->add_option("--dgx", lam_dgx, "boundary distance d_G(x) for --general");
    lam_cmd->add_option("--out", lam_out, "output path (default stdout)");

    // ball ---------------------------------------------------------------
    auto* ball_cmd = app.add_subcommand("ball", "trace a metric sphere in the punctured plane");
    std::string ball_center = "1,0", ball_format = "csv", ball_out;
    double ball_level = 4.0;
    int ball_rays = 64;
    ball_cmd->add_option("--center", ball_center, "center point 'x,y'");
    ball_cmd->add_option("--level", ball_level, "lambda level of the traced sphere");
    ball_cmd->add_option("--rays", ball_rays, "number of rays");
    ball_cmd->add_option("--format", ball_format, "csv | svg | json")
        ->check(CLI::IsMember({"csv", "svg", "json"}));
    ball_cmd->add_option("--out", ball_out, "output path (default stdout)");

    // oracle -------------------------------------------------------------
    auto* oracle_cmd = app.add_subcommand("oracle", "grid condenser capacity (JSON report)");
    std::string oracle_spec, oracle_out;
    std::optional<double> oracle_h;
    bool oracle_single = false;
    oracle_cmd->add_option("--spec", oracle_spec, "condenser spec file (JSON)")->required();
    oracle_cmd->add_option("--h", oracle_h, "grid spacing override");
    oracle_cmd->add_flag("--single", oracle_single, "one grid only, no extrapolation");
    oracle_cmd->add_option("--out", oracle_out, "output path (default stdout)");

    // dilat --------------------------------------------------------------
    auto* dilat_cmd = app.add_subcommand("dilat", "sampled linear dilatation of a map (JSON)");
    std::string dilat_map, dilat_point = "1,0", dilat_radii = "0.1,0.01,0.001", dilat_out;
    int dilat_samples = 64;
    dilat_cmd->add_option("--map", dilat_map,
                          "map spec: scale:c | inv[:c] | power:a | mobius:8 numbers, "
                          "stages joined by '|'")->required();
    dilat_cmd->add_option("--point", dilat_point, "base point 'x,y'");
    dilat_cmd->add_option("--radii", dilat_radii, "comma-separated radii");
    dilat_cmd->add_option("--samples", dilat_samples, "angular samples per radius");
    dilat_cmd->add_option("--out", dilat_out, "output path (default stdout)");

    // profile -------------------------------------------------------------
    auto* profile_cmd = app.add_subcommand("profile", "dilatation bound profile (CSV)");
    double prof_rmin = 0.001, prof_rmax = 0.3;
    int prof_steps = 20;
    std::string prof_out;
    profile_cmd->add_option("--rmin", prof_rmin, "smallest relative radius");
    profile_cmd->add_option("--rmax", prof_rmax, "largest relative radius");
    profile_cmd->add_option("--steps", prof_steps, "number of rows");
    profile_cmd->add_option("--out", prof_out, "output path (default stdout)");

    // verify --------------------------------------------------------------
    auto* verify_cmd = app.add_subcommand("verify", "run every invariant suite");
    bool verify_fast = false;
    verify_cmd->add_flag("--skip-slow", verify_fast, "skip the grid-oracle suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        using namespace ferrand;

        if (*cap_cmd) {
            const CapacityEvaluator ev =
                cap_n == 2 ? CapacityEvaluator::plane() : CapacityEvaluator::abstract(cap_n);
            const int given = int(cap_gamma.has_value()) + int(cap_tau.has_value()) +
                              int(cap_gamma_inv.has_value()) + int(cap_tau_inv.has_value());
            if (given != 1)
                throw std::invalid_argument(
                    "cap: give exactly one of --gamma, --tau, --gamma-inv, --tau-inv");
            double v = 0.0;
            if (cap_gamma) v = ev.gamma(*cap_gamma);
            if (cap_tau) v = ev.tau(*cap_tau);
            if (cap_gamma_inv) v = ev.gamma_inv(*cap_gamma_inv);
            if (cap_tau_inv) v = ev.tau_inv(*cap_tau_inv);
            std::cout << format_value(v) << "\n";
        }

        if (*dist_cmd) {
            const DistortionParams params{dist_K, 2};
            if (dist_steps > 0) {
                std::ostringstream csv;
                csv << "r,phi,psi,psi_ratio,psi_ratio_lower,psi_ratio_upper\n";
                for (int i = 0; i < dist_steps; ++i) {
                    const double r =
                        dist_rmin + (dist_rmax - dist_rmin) * i / std::max(1, dist_steps - 1);
                    const double ph = phi(params, r), ps = psi(params, r);
                    const double ratio = ps / std::pow(r, 1.0 / dist_K);
                    csv << format_value(r) << ',' << format_value(ph) << ',' << format_value(ps)
                        << ',' << format_value(ratio) << ",1,"
                        << format_value(std::exp2(2.0 - 1.0 / dist_K)) << "\n";
                }
                emit(csv.str(), dist_out);
            } else {
                double v = 0.0;
                const int given = int(dist_phi.has_value()) + int(dist_psi.has_value()) +
                                  int(dist_tis.has_value());
                if (given != 1)
                    throw std::invalid_argument(
                        "dist: give one of --phi, --psi, --tau-inv-scaled, or --table N");
                if (dist_phi) v = phi(params, *dist_phi);
                if (dist_psi) v = psi(params, *dist_psi);
                if (dist_tis) v = tau_inv_scaled(params, *dist_tis);
                std::cout << format_value(v) << "\n";
            }
        }

        if (*lam_cmd) {
            const cpx x = parse_point(lam_x), y = parse_point(lam_y);
            BoundedValue v;
            std::string domain = "punctured";
            if (lam_ball_flag) {
                v = lambda_ball({x.real(), x.imag()}, {y.real(), y.imag()});
                domain = "ball";
            } else if (lam_general) {
                if (!(lam_dgx > 0.0))
                    throw std::invalid_argument("lam: --general requires --dgx > 0");
                const DomainSpec dom =
                    DomainSpec::general([&](const std::vector<double>&) { return lam_dgx; });
                v = lambda_general_bounds(dom, {x.real(), x.imag()}, {y.real(), y.imag()});
                domain = "general";
            } else {
                v = lambda_punctured(x, y);
            }
            json j = to_json(v);
            j["domain"] = domain;
            j["x"] = {x.real(), x.imag()};
            j["y"] = {y.real(), y.imag()};
            emit(j.dump(2) + "\n", lam_out);
        }

        if (*ball_cmd) {
            const SphereTrace tr =
                trace_metric_sphere(parse_point(ball_center), ball_level, ball_rays);
            if (ball_format == "csv") {
                emit(sphere_trace_csv(tr), ball_out);
            } else if (ball_format == "svg") {
                emit(sphere_trace_svg(tr), ball_out);
            } else {
                json j{{"center", {tr.center.real(), tr.center.imag()}},
                       {"level", tr.level},
                       {"angles", tr.angles},
                       {"inner_radius", tr.inner_radius},
                       {"outer_radius", tr.outer_radius}};
                emit(j.dump(2) + "\n", ball_out);
            }
        }

        if (*oracle_cmd) {
            CondenserSpec spec = load_condenser_spec(oracle_spec);
            if (oracle_h) spec.grid_h = oracle_h;
            json j;
            if (oracle_single) {
                j = to_json(solve_capacity(spec));
            } else {
                j = to_json(solve_richardson(spec));
            }
            j["spec"] = condenser_spec_to_json(spec);
            emit(j.dump(2) + "\n", oracle_out);
        }

        if (*dilat_cmd) {
            const PlaneMap m = parse_map(dilat_map);
            const DilatationReport rep =
                linear_dilatation(m, parse_point(dilat_point), parse_list(dilat_radii),
                                  dilat_samples);
            emit(to_json(rep).dump(2) + "\n", dilat_out);
        }

        if (*profile_cmd) {
            std::ostringstream csv;
            csv << "r,bound,tau_route\n";
            for (int i = 0; i < prof_steps; ++i) {
                const double r = prof_rmin * std::pow(prof_rmax / prof_rmin,
                                                      double(i) / std::max(1, prof_steps - 1));
                csv << format_value(r) << ',' << format_value(dilatation_bound_profile(r)) << ','
                    << format_value(dilatation_bound_profile_tau(r)) << "\n";
            }
            emit(csv.str(), prof_out);
        }

        if (*verify_cmd) {
            const std::vector<CheckResult> results = verify_all(!verify_fast);
            bool all_pass = true;
            for (const CheckResult& r : results) {
                std::printf("%-6s %-34s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                            r.detail.c_str());
                all_pass = all_pass && r.pass;
            }
            std::printf("%s (%zu checks)\n", all_pass ? "ALL PASS" : "FAILURES PRESENT",
                        results.size());
            return all_pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
