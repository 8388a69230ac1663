// Command-line front end: one subcommand per analysis.

#include <sdmap/io.hpp>
#include <sdmap/sdmap.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#ifndef SDMAP_VERSION
#define SDMAP_VERSION "unknown"
#endif

namespace {

using sdmap::io::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& s, std::size_t n, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
        out.push_back(v);
    }
    if (out.size() != n)
        throw UsageError(std::string(what) + " needs " + std::to_string(n) + " comma-separated values");
    return out;
}

sdmap::Point3 parse_point(const std::string& s, const char* what) {
    const auto v = parse_list(s, 3, what);
    return {v[0], v[1], v[2]};
}

sdmap::Bracket parse_bracket(const std::string& s, const char* what) {
    const auto v = parse_list(s, 2, what);
    if (!(v[0] < v[1])) throw UsageError(std::string(what) + " must be increasing");
    return {v[0], v[1]};
}

sdmap::Axis parse_axis(const std::string& s) {
    if (s == "x") return sdmap::Axis::x;
    if (s == "y") return sdmap::Axis::y;
    if (s == "z") return sdmap::Axis::z;
    throw UsageError("axis must be x, y or z");
}

/// Flag values of the subcommand that ran, defaults included.
json echo_config(const CLI::App& sub) {
    json cfg = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_name(false, true);
        if (name.empty() || name == "--help") continue;
        const std::string key = opt->get_single_name();
        if (opt->count() > 0) {
            const auto& r = opt->results();
            cfg[key] = r.size() == 1 ? json(r.front()) : json(r);
        } else if (!opt->get_default_str().empty()) {
            cfg[key] = opt->get_default_str();
        }
    }
    return cfg;
}

struct Result {
    std::string body;
    json extra_meta = json::object();
};

void write_file(const std::string& path, const std::string& data, bool binary) {
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

sdmap::Cycle1D pick_cycle(const sdmap::Params& params, const std::string& spec) {
    // period[:index], index into cycles sorted by first point.
    const auto colon = spec.find(':');
    int period = 0;
    std::size_t index = 0;
    try {
        period = std::stoi(spec.substr(0, colon));
        if (colon != std::string::npos) index = std::stoul(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw UsageError("--source must look like PERIOD or PERIOD:INDEX");
    }
    const auto cycles = sdmap::find_cycles_1d(params, period);
    if (index >= cycles.size())
        throw sdmap::Error(sdmap::Errc::invalid_argument, "no cycle " + spec + " at this b (found " +
                                                               std::to_string(cycles.size()) + ")");
    return cycles[index];
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic orbits, bifurcations, Lyapunov exponents, critical planes and basins of "
                 "T(x, y, z) = (y, z, x^2 + b)"};
    app.set_version_flag("--version", std::string("sdmap ") + SDMAP_VERSION);
    app.require_subcommand(1);

    std::string out_path;
    std::string format;
    unsigned threads = 0;
    double b = 0.0;
    int period = 1;

    const auto common = [&](CLI::App* s, const std::string& default_format) {
        s->add_option("--out", out_path, "Output file (stdout if omitted); a .meta.json sidecar echoes the config");
        s->add_option("--format", format, "Output format")->default_str(default_format);
        s->add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
    };

    auto* fixed = app.add_subcommand("fixed-points", "The two fixed points of T with eigenvalues");
    fixed->add_option("--b", b, "Parameter b")->required();
    common(fixed, "json");

    auto* c1d = app.add_subcommand("cycles-1d", "All cycles of H(u) = u^2 + b with a given minimal period");
    c1d->add_option("--b", b, "Parameter b")->required();
    c1d->add_option("--period", period, "Minimal period")->required();
    common(c1d, "csv");

    std::string lift_mode = "homogeneous";
    std::vector<std::string> sources;
    auto* lift = app.add_subcommand("lift", "Lift cycles of H to cycles of T");
    lift->add_option("--b", b, "Parameter b")->required();
    lift->add_option("--mode", lift_mode, "homogeneous | homogeneous-3n | pair | triple")->capture_default_str();
    lift->add_option("--source", sources, "Source cycle as PERIOD[:INDEX], repeat per cycle")->required();
    common(lift, "json");

    auto* cen = app.add_subcommand("census", "Every cycle of T of a period obtainable by lifting");
    cen->add_option("--b", b, "Parameter b")->required();
    cen->add_option("--period", period, "Period of T")->required();
    common(cen, "json");

    std::string kind = "flip";
    std::string bracket_s;
    int curve_steps = 200;
    auto* bif = app.add_subcommand("bifurcations",
                                   "Locate a fold, flip or transcritical bifurcation in b, or trace multipliers");
    bif->add_option("--kind", kind, "fold | flip | transcritical | multipliers")->capture_default_str();
    bif->add_option("--period", period, "Cycle period")->capture_default_str();
    bif->add_option("--bracket", bracket_s, "Search interval lo,hi")->required();
    bif->add_option("--steps", curve_steps, "Samples in b for --kind multipliers")->capture_default_str();
    common(bif, "csv");

    double b_min = -2.0;
    double b_max = 0.25;
    int steps = 1000;
    std::size_t samples = 200;
    auto* diag = app.add_subcommand("diagram", "Bifurcation diagram: post-transient x samples per b");
    diag->add_option("--b-min", b_min, "Lowest b")->capture_default_str();
    diag->add_option("--b-max", b_max, "Highest b")->capture_default_str();
    diag->add_option("--steps", steps, "Number of b values")->capture_default_str();
    std::size_t diag_transient = 1000;
    std::string diag_x0 = "0,-0.5,0";
    diag->add_option("--transient", diag_transient, "Discarded iterations")->capture_default_str();
    diag->add_option("--samples", samples, "Recorded iterations per b")->capture_default_str();
    diag->add_option("--x0", diag_x0, "Initial point x,y,z")->capture_default_str();
    common(diag, "csv");

    std::size_t reorth = 1;
    auto* lyap = app.add_subcommand("lyapunov", "Lyapunov spectrum of T");
    lyap->add_option("--b", b, "Parameter b")->required();
    std::string lyap_x0 = "0,-0.5,0.5";
    std::size_t lyap_iters = 1000000;
    std::size_t lyap_transient = 10000;
    lyap->add_option("--x0", lyap_x0, "Initial point x,y,z")->capture_default_str();
    lyap->add_option("--iters", lyap_iters, "Averaged iterations")->capture_default_str();
    lyap->add_option("--transient", lyap_transient, "Discarded iterations")->capture_default_str();
    lyap->add_option("--reorth", reorth, "Steps between re-orthonormalizations")->capture_default_str();
    common(lyap, "csv");

    int k_max = 8;
    auto* planes = app.add_subcommand("critical-planes", "Critical planes PC_-1 .. PC_k");
    planes->add_option("--b", b, "Parameter b")->required();
    planes->add_option("--k-max", k_max, "Largest plane index")->capture_default_str();
    common(planes, "csv");

    std::string point_s;
    auto* pre = app.add_subcommand("preimages", "Rank-one preimages of a point");
    pre->add_option("--b", b, "Parameter b")->required();
    pre->add_option("--point", point_s, "Point x,y,z")->required();
    common(pre, "csv");

    auto* orb = app.add_subcommand("orbit", "Orbit of a point");
    orb->add_option("--b", b, "Parameter b")->required();
    std::string orb_x0 = "0,-0.5,0.5";
    std::size_t orb_iters = 1000;
    std::size_t orb_transient = 0;
    orb->add_option("--x0", orb_x0, "Initial point x,y,z")->capture_default_str();
    orb->add_option("--iters", orb_iters, "Recorded states")->capture_default_str();
    orb->add_option("--transient", orb_transient, "Discarded iterations")->capture_default_str();
    common(orb, "csv");

    std::string fixed_axis = "z";
    double fixed_value = 0.5;
    std::string u_axis = "x";
    std::string v_axis = "y";
    std::string u_range = "-2.5,2.5";
    std::string v_range = "-2.5,2.5";
    int res = 200;
    int u_res = 0;
    int v_res = 0;
    std::vector<std::string> seed_s;
    std::string image_path;
    sdmap::CatalogOptions cat_opt;
    auto* basin = app.add_subcommand("basin", "Classify a 2D slice of initial conditions into basins");
    basin->add_option("--b", b, "Parameter b")->required();
    basin->add_option("--fixed-axis", fixed_axis, "Axis held constant")->capture_default_str();
    basin->add_option("--fixed-value", fixed_value, "Value of the fixed axis")->capture_default_str();
    basin->add_option("--u-axis", u_axis, "Horizontal swept axis")->capture_default_str();
    basin->add_option("--v-axis", v_axis, "Vertical swept axis")->capture_default_str();
    basin->add_option("--u-range", u_range, "Horizontal range lo,hi")->capture_default_str();
    basin->add_option("--v-range", v_range, "Vertical range lo,hi")->capture_default_str();
    basin->add_option("--res", res, "Cells per axis")->capture_default_str();
    basin->add_option("--u-res", u_res, "Horizontal cells (overrides --res)");
    basin->add_option("--v-res", v_res, "Vertical cells (overrides --res)");
    basin->add_option("--max-iter", cat_opt.max_iter, "Iterations per point")->capture_default_str();
    basin->add_option("--transient", cat_opt.transient, "Discarded iterations per point")->capture_default_str();
    basin->add_option("--match-tol", cat_opt.match_tol, "Sup-distance tolerance for cycles")->capture_default_str();
    basin->add_option("--cloud-score", cat_opt.cloud_score_min, "Minimum score for chaotic attractors")
        ->capture_default_str();
    basin->add_option("--seed", seed_s, "Catalog seed x,y,z, repeatable (built-in seeds if omitted)");
    basin->add_option("--image", image_path, "Also render the grid to this PPM file");
    common(basin, "csv");

    std::string in_path;
    std::string meta_path;
    auto* render = app.add_subcommand("render", "Render a basin CSV to a binary PPM image");
    render->add_option("--in", in_path, "Basin CSV")->required();
    render->add_option("--meta", meta_path, "Metadata sidecar (default: <in>.meta.json)");
    render->add_option("--out", out_path, "PPM output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const auto fmt_is = [&](const char* f) { return format == f; };

    try {
        if (name != "render" && !format.empty() && format != "csv" && format != "json")
            throw UsageError("--format must be csv or json");
        if (format.empty() && name != "render") format = sub->get_option("--format")->get_default_str();

        Result res_out;
        std::ostringstream os;
        if (name == "fixed-points") {
            const auto fps = sdmap::fixed_points_T(sdmap::Params(b));
            if (fmt_is("json")) {
                os << sdmap::io::to_json(std::vector<sdmap::Cycle3D>(fps.begin(), fps.end())).dump(2) << '\n';
            } else {
                os << "name,x,stability,l1,l2,l3\n";
                const char* names[2] = {"X1", "X2"};
                for (int i = 0; i < 2; ++i) {
                    const auto& c = fps[static_cast<std::size_t>(i)];
                    os << names[i] << ',' << sdmap::io::fmt(c.points[0].x) << ',' << sdmap::to_string(c.stability);
                    for (double e : c.eigenvalues) os << ',' << sdmap::io::fmt(e);
                    os << '\n';
                }
            }
        } else if (name == "cycles-1d") {
            const auto cycles = sdmap::find_cycles_1d(sdmap::Params(b), period);
            if (fmt_is("json")) {
                json arr = json::array();
                for (const auto& c : cycles) arr.push_back(sdmap::io::to_json(c));
                os << arr.dump(2) << '\n';
            } else {
                sdmap::io::write_cycles_1d_csv(os, cycles);
            }
        } else if (name == "lift") {
            const sdmap::Params params(b);
            std::vector<sdmap::Cycle1D> src;
            for (const auto& s : sources) src.push_back(pick_cycle(params, s));
            sdmap::Diagnostics d;
            std::vector<sdmap::Cycle3D> cycles;
            const auto need = [&](std::size_t n) {
                if (src.size() != n)
                    throw UsageError("--mode " + lift_mode + " takes " + std::to_string(n) + " --source flags");
            };
            if (lift_mode == "homogeneous") {
                need(1);
                cycles.push_back(sdmap::lift_homogeneous(src[0]));
            } else if (lift_mode == "homogeneous-3n") {
                need(1);
                cycles = sdmap::lift_homogeneous_3n(src[0], &d);
            } else if (lift_mode == "pair") {
                need(2);
                cycles = sdmap::lift_mixed_pair(src[0], src[1], &d);
            } else if (lift_mode == "triple") {
                need(3);
                cycles = sdmap::lift_mixed_triple(src[0], src[1], src[2], &d);
            } else {
                throw UsageError("--mode must be homogeneous, homogeneous-3n, pair or triple");
            }
            if (!fmt_is("json")) throw UsageError("lift writes json only");
            os << json{{"b", b}, {"mode", lift_mode}, {"cycles", sdmap::io::to_json(cycles)}, {"diagnostics", d}}.dump(2)
               << '\n';
        } else if (name == "census") {
            sdmap::Diagnostics d;
            const auto c = sdmap::census(sdmap::Params(b), period, {}, &d);
            if (!fmt_is("json")) throw UsageError("census writes json only");
            auto j = sdmap::io::to_json(c);
            j["diagnostics"] = d;
            os << j.dump(2) << '\n';
        } else if (name == "bifurcations") {
            const auto br = parse_bracket(bracket_s, "--bracket");
            if (kind == "multipliers") {
                const auto branches = sdmap::multiplier_curve(period, br, curve_steps);
                if (fmt_is("json")) os << sdmap::io::to_json(branches).dump(2) << '\n';
                else sdmap::io::write_multipliers_csv(os, period, branches);
            } else {
                sdmap::BifurcationEvent ev;
                if (kind == "flip") ev = sdmap::find_flip(period, br);
                else if (kind == "fold") ev = sdmap::find_fold(period, br);
                else if (kind == "transcritical") ev = sdmap::find_transcritical(br);
                else throw UsageError("--kind must be fold, flip, transcritical or multipliers");
                if (fmt_is("json")) os << sdmap::io::to_json(ev).dump(2) << '\n';
                else sdmap::io::write_events_csv(os, {ev});
            }
        } else if (name == "diagram") {
            sdmap::DiagramOptions o;
            o.p0 = parse_point(diag_x0, "--x0");
            o.transient = diag_transient;
            o.samples = samples;
            o.threads = threads;
            if (!(b_min < b_max)) throw UsageError("--b-min must be below --b-max");
            const auto ds = sdmap::bifurcation_diagram({b_min, b_max}, steps, o);
            if (!fmt_is("csv")) throw UsageError("diagram writes csv only");
            sdmap::io::write_diagram_csv(os, ds);
        } else if (name == "lyapunov") {
            sdmap::LyapunovOptions o;
            o.n_iter = lyap_iters;
            o.transient = lyap_transient;
            o.reorth_every = reorth;
            const auto r = sdmap::lyapunov_spectrum(parse_point(lyap_x0, "--x0"), sdmap::Params(b), o);
            if (fmt_is("json"))
                os << json{{"b", b}, {"exponents", r.exponents}, {"n_iter", r.n_used}, {"transient", r.transient}}.dump(2)
                   << '\n';
            else
                sdmap::io::write_lyapunov_csv(os, b, r);
        } else if (name == "critical-planes") {
            if (k_max < -1) throw UsageError("--k-max must be >= -1");
            std::vector<sdmap::AxisPlane> pls;
            for (int k = -1; k <= k_max; ++k) pls.push_back(sdmap::critical_plane(k, sdmap::Params(b)));
            if (!fmt_is("csv")) throw UsageError("critical-planes writes csv only");
            sdmap::io::write_planes_csv(os, pls);
        } else if (name == "preimages") {
            const sdmap::Params params(b);
            const auto p = parse_point(point_s, "--point");
            const auto pre_pts = sdmap::preimages(p, params);
            if (fmt_is("json")) {
                json arr = json::array();
                for (const auto& q : pre_pts)
                    arr.push_back({{"region", sdmap::to_string(q.region)}, {"point", sdmap::io::to_json(q.point)}});
                os << json{{"zone", sdmap::to_string(sdmap::zone_of(p, params))}, {"preimages", arr}}.dump(2) << '\n';
            } else {
                os << "region,x,y,z\n";
                for (const auto& q : pre_pts)
                    os << sdmap::to_string(q.region) << ',' << sdmap::io::fmt(q.point.x) << ','
                       << sdmap::io::fmt(q.point.y) << ',' << sdmap::io::fmt(q.point.z) << '\n';
            }
        } else if (name == "orbit") {
            const auto pts = sdmap::orbit(parse_point(orb_x0, "--x0"), sdmap::Params(b), orb_iters, orb_transient);
            if (!fmt_is("csv")) throw UsageError("orbit writes csv only");
            sdmap::io::write_orbit_csv(os, pts, orb_transient);
        } else if (name == "basin") {
            sdmap::SliceSpec sl;
            sl.fixed_axis = parse_axis(fixed_axis);
            sl.fixed_value = fixed_value;
            const auto ur = parse_bracket(u_range, "--u-range");
            const auto vr = parse_bracket(v_range, "--v-range");
            sl.u = {parse_axis(u_axis), ur.lo, ur.hi, u_res > 0 ? u_res : res};
            sl.v = {parse_axis(v_axis), vr.lo, vr.hi, v_res > 0 ? v_res : res};
            sl.validate();
            cat_opt.threads = threads;
            std::vector<sdmap::Point3> seeds;
            for (const auto& s : seed_s) seeds.push_back(parse_point(s, "--seed"));
            if (seeds.empty()) seeds = sdmap::default_seeds();
            const sdmap::Params params(b);
            const auto grid = sdmap::basin_slice(params, sl, sdmap::build_catalog(params, seeds, cat_opt), cat_opt);
            if (!fmt_is("csv")) throw UsageError("basin writes csv only");
            sdmap::io::write_basin_csv(os, grid);
            res_out.extra_meta = sdmap::io::basin_metadata(grid);
            if (!image_path.empty()) {
                const auto img = sdmap::render_grid(grid, sdmap::default_palette(grid));
                write_file(image_path, std::string(img.begin(), img.end()), true);
            }
        } else if (name == "render") {
            if (meta_path.empty()) meta_path = in_path + ".meta.json";
            json meta;
            try {
                meta = json::parse(read_file(meta_path));
            } catch (const json::exception& e) {
                throw sdmap::Error(sdmap::Errc::invalid_argument, std::string("bad metadata: ") + e.what());
            }
            std::istringstream csv(read_file(in_path));
            const auto grid = sdmap::io::read_basin(csv, meta.contains("basin") ? meta["basin"] : meta);
            const auto img = sdmap::render_grid(grid, sdmap::default_palette(grid));
            write_file(out_path, std::string(img.begin(), img.end()), true);
            return 0;
        }

        res_out.body = os.str();
        if (out_path.empty()) {
            std::cout << res_out.body;
        } else {
            write_file(out_path, res_out.body, false);
            json meta = {{"command", name}, {"version", SDMAP_VERSION}, {"config", echo_config(*sub)}};
            if (!res_out.extra_meta.empty()) meta["basin"] = res_out.extra_meta;
            write_file(out_path + ".meta.json", meta.dump(2) + "\n", false);
        }
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << sub->help();
        return 1;
    } catch (const sdmap::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == sdmap::Errc::invalid_argument ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
