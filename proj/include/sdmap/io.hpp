#pragma once

// CSV and JSON serialization. Needs nlohmann/json on the include path.

#include <sdmap/basin.hpp>
#include <sdmap/bifurcation.hpp>
#include <sdmap/critical.hpp>
#include <sdmap/cycles.hpp>
#include <sdmap/error.hpp>
#include <sdmap/lyapunov.hpp>
#include <sdmap/map_core.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace sdmap::io {

using json = nlohmann::json;

/// 17 significant digits, "nan"/"inf" for non-finite values.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_orbit_csv(std::ostream& os, const std::vector<Point3>& pts, std::size_t first_index = 0) {
    os << "n,x,y,z\n";
    for (std::size_t i = 0; i < pts.size(); ++i)
        os << first_index + i << ',' << fmt(pts[i].x) << ',' << fmt(pts[i].y) << ',' << fmt(pts[i].z) << '\n';
}

inline void write_cycles_1d_csv(std::ostream& os, const std::vector<Cycle1D>& cycles) {
    os << "period,i,x_i,multiplier\n";
    for (const auto& c : cycles)
        for (std::size_t i = 0; i < c.points.size(); ++i)
            os << c.period << ',' << i + 1 << ',' << fmt(c.points[i]) << ',' << fmt(c.multiplier) << '\n';
}

inline void write_diagram_csv(std::ostream& os, const DiagramDataset& d) {
    os << "b,x\n";
    for (const auto& row : d.rows) {
        if (row.diverged) {
            os << fmt(row.b) << ",nan\n";
            continue;
        }
        for (double x : row.xs) os << fmt(row.b) << ',' << fmt(x) << '\n';
    }
}

inline void write_events_csv(std::ostream& os, const std::vector<BifurcationEvent>& events) {
    os << "kind,period,b_star,x_star\n";
    for (const auto& e : events)
        os << to_string(e.kind) << ',' << e.period << ',' << fmt(e.b_star) << ',' << fmt(e.x_star) << '\n';
}

inline void write_multipliers_csv(std::ostream& os, int period, const std::vector<MultiplierBranch>& branches) {
    os << "period,branch,b,multiplier,x1\n";
    for (std::size_t k = 0; k < branches.size(); ++k)
        for (const auto& s : branches[k].samples)
            os << period << ',' << k << ',' << fmt(s.b) << ',' << fmt(s.multiplier) << ',' << fmt(s.x1) << '\n';
}

inline void write_lyapunov_csv(std::ostream& os, double b, const LyapunovResult& r) {
    os << "b,l1,l2,l3,n_iter\n";
    os << fmt(b) << ',' << fmt(r.exponents[0]) << ',' << fmt(r.exponents[1]) << ',' << fmt(r.exponents[2]) << ','
       << r.n_used << '\n';
}

inline void write_planes_csv(std::ostream& os, const std::vector<AxisPlane>& planes) {
    os << "k,axis,offset\n";
    for (const auto& p : planes) os << p.index << ',' << to_string(p.axis) << ',' << fmt(p.offset) << '\n';
}

inline void write_basin_csv(std::ostream& os, const BasinGrid& g) {
    os << "i,j," << to_string(g.slice.u.axis) << ',' << to_string(g.slice.v.axis) << ",label\n";
    for (int j = 0; j < g.nv(); ++j)
        for (int i = 0; i < g.nu(); ++i)
            os << i << ',' << j << ',' << fmt(g.slice.u.center(i)) << ',' << fmt(g.slice.v.center(j)) << ','
               << g.at(i, j) << '\n';
}

inline json to_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

inline json to_json(const Cycle3D& c) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back(to_json(p));
    json sources = json::array();
    for (const auto& s : c.provenance.sources) sources.push_back({{"period", s.period}, {"x1", s.x1}});
    return {{"period", c.period},
            {"points", pts},
            {"eigenvalues", json::array({c.eigenvalues[0], c.eigenvalues[1], c.eigenvalues[2]})},
            {"stability", to_string(c.stability)},
            {"provenance", {{"kind", to_string(c.provenance.kind)}, {"sources", sources}, {"seed", to_json(c.provenance.seed)}}},
            {"degenerate", c.degenerate}};
}

inline json to_json(const std::vector<Cycle3D>& cycles) {
    json out = json::array();
    for (const auto& c : cycles) out.push_back(to_json(c));
    return out;
}

inline json to_json(const Cycle1D& c) {
    return {{"period", c.period}, {"points", c.points}, {"multiplier", c.multiplier}, {"b", c.b},
            {"degenerate", c.degenerate}};
}

inline json to_json(const Census& c) {
    return {{"b", c.b},
            {"period", c.period},
            {"counts", {{"homogeneous", c.homogeneous.size()}, {"mixed", c.mixed.size()}, {"total", c.total()}}},
            {"homogeneous", to_json(c.homogeneous)},
            {"mixed", to_json(c.mixed)}};
}

inline json to_json(const BifurcationEvent& e) {
    return {{"kind", to_string(e.kind)}, {"period", e.period}, {"b_star", e.b_star}, {"x_star", e.x_star}};
}

inline json to_json(const std::vector<MultiplierBranch>& branches) {
    json out = json::array();
    for (const auto& br : branches) {
        json samples = json::array();
        for (const auto& s : br.samples) samples.push_back({{"b", s.b}, {"multiplier", s.multiplier}, {"x1", s.x1}});
        out.push_back({{"samples", samples}});
    }
    return out;
}

inline json to_json(const SweepAxis& a) {
    return {{"axis", to_string(a.axis)}, {"min", a.lo}, {"max", a.hi}, {"resolution", a.resolution}};
}

inline json to_json(const Attractor& a) {
    json j = {{"id", a.id}, {"kind", to_string(a.kind)}, {"seed", to_json(a.seed)}};
    if (a.kind == AttractorKind::chaotic) {
        j["occupied_voxels"] = a.histogram.occupied();
        j["signature_size"] = a.signature.size();
    } else {
        j["period"] = a.period;
        json pts = json::array();
        for (const auto& p : a.signature) pts.push_back(to_json(p));
        j["points"] = pts;
    }
    return j;
}

/// Sidecar describing how a basin grid was produced.
inline json basin_metadata(const BasinGrid& g) {
    const auto& o = g.options;
    json catalog = json::array();
    for (const auto& a : g.catalog) catalog.push_back(to_json(a));
    json counts = json::object();
    for (const auto& [label, n] : g.histogram()) counts[std::to_string(label)] = n;
    return {{"b", g.b},
            {"slice",
             {{"fixed_axis", to_string(g.slice.fixed_axis)},
              {"fixed_value", g.slice.fixed_value},
              {"u", to_json(g.slice.u)},
              {"v", to_json(g.slice.v)}}},
            {"labels", {{"divergent", kDivergent}, {"undecided", kUndecided}}},
            {"tolerances",
             {{"max_iter", o.max_iter},
              {"transient", o.transient},
              {"escape_radius", o.escape_radius},
              {"signature_points", o.signature_points},
              {"match_tol", o.match_tol},
              {"recurrence_tol", o.recurrence_tol},
              {"max_recurrence_period", o.max_recurrence_period},
              {"histogram_samples", o.histogram_samples},
              {"voxel", o.voxel},
              {"cloud_score_min", o.cloud_score_min},
              {"rerun_undecided", o.rerun_undecided}}},
            {"catalog", catalog},
            {"label_counts", counts}};
}

inline Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    if (s == "z") return Axis::z;
    throw Error(Errc::invalid_argument, "unknown axis '" + s + "'");
}

/// Rebuilds a label grid from basin CSV and its metadata sidecar.
inline BasinGrid read_basin(std::istream& csv, const json& meta) {
    BasinGrid g;
    try {
        g.b = meta.at("b").get<double>();
        const auto& sl = meta.at("slice");
        g.slice.fixed_axis = parse_axis(sl.at("fixed_axis").get<std::string>());
        g.slice.fixed_value = sl.at("fixed_value").get<double>();
        for (auto [key, ax] : {std::pair{"u", &g.slice.u}, std::pair{"v", &g.slice.v}}) {
            const auto& a = sl.at(key);
            ax->axis = parse_axis(a.at("axis").get<std::string>());
            ax->lo = a.at("min").get<double>();
            ax->hi = a.at("max").get<double>();
            ax->resolution = a.at("resolution").get<int>();
        }
        if (meta.contains("catalog"))
            for (const auto& a : meta.at("catalog")) {
                Attractor att;
                att.id = a.at("id").get<int>();
                g.catalog.push_back(att);
            }
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_argument, std::string("bad basin metadata: ") + e.what());
    }
    g.slice.validate();
    const auto nu = static_cast<std::size_t>(g.nu());
    const auto nv = static_cast<std::size_t>(g.nv());
    g.labels.assign(nu * nv, kUndecided);
    std::vector<bool> seen(nu * nv, false);
    std::string line;
    if (!std::getline(csv, line)) throw Error(Errc::invalid_argument, "empty basin CSV");
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f[5];
        for (auto& s : f) std::getline(ls, s, ',');
        try {
            const auto i = std::stoul(f[0]);
            const auto j = std::stoul(f[1]);
            if (i >= nu || j >= nv) throw Error(Errc::invalid_argument, "basin CSV cell out of range: " + line);
            g.labels[j * nu + i] = std::stoi(f[4]);
            seen[j * nu + i] = true;
        } catch (const std::logic_error&) {
            throw Error(Errc::invalid_argument, "bad basin CSV row: " + line);
        }
    }
    for (bool s : seen)
        if (!s) throw Error(Errc::invalid_argument, "basin CSV does not cover every cell");
    return g;
}

} // namespace sdmap::io
