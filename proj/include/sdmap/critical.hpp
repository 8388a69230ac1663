#pragma once

// Critical planes, zones Z0/Z2, the half-spaces R1/R2 and the two inverse
// branches of T.
//
// The Jacobian degenerates on PC_{-1} = {x = 0}. Its images are axis-aligned:
// PC_k sits at offset H^{m+1}(0) on axis z, y, x for k = 3m, 3m+1, 3m+2.

#include <sdmap/error.hpp>
#include <sdmap/map_core.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace sdmap {

enum class Axis { x, y, z };

inline const char* to_string(Axis a) {
    switch (a) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
    }
    return "?";
}

inline double coord(const Point3& p, Axis a) {
    switch (a) {
    case Axis::x: return p.x;
    case Axis::y: return p.y;
    case Axis::z: return p.z;
    }
    return 0.0;
}

/// The plane {p : coord(p, axis) = offset}, labelled PC_index.
struct AxisPlane {
    Axis axis = Axis::x;
    double offset = 0.0;
    int index = -1;

    double signed_distance(const Point3& p) const { return coord(p, axis) - offset; }
};

enum class ZoneLabel { Z0, Z2, on_PC0 };
enum class Region { R1, R2, on_PC_minus1 };

inline const char* to_string(ZoneLabel z) {
    switch (z) {
    case ZoneLabel::Z0: return "Z0";
    case ZoneLabel::Z2: return "Z2";
    case ZoneLabel::on_PC0: return "on_PC0";
    }
    return "?";
}

inline const char* to_string(Region r) {
    switch (r) {
    case Region::R1: return "R1";
    case Region::R2: return "R2";
    case Region::on_PC_minus1: return "on_PC_minus1";
    }
    return "?";
}

inline constexpr double kBoundaryTieTol = 1e-12;

inline AxisPlane critical_plane(int k, const Params& params) {
    if (k < -1) throw Error(Errc::invalid_argument, "critical plane index must be >= -1");
    if (k == -1) return AxisPlane{Axis::x, 0.0, -1};
    const int m = k / 3;
    const double offset = h1d_n(0.0, params, m + 1);
    static constexpr Axis axes[3] = {Axis::z, Axis::y, Axis::x};
    return AxisPlane{axes[k % 3], offset, k};
}

/// Three non-collinear points of a plane.
inline std::array<Point3, 3> sample_points(const AxisPlane& pl) {
    const double o = pl.offset;
    switch (pl.axis) {
    case Axis::x: return {Point3{o, 0.3, -0.7}, Point3{o, -1.1, 0.2}, Point3{o, 0.9, 1.3}};
    case Axis::y: return {Point3{0.3, o, -0.7}, Point3{-1.1, o, 0.2}, Point3{0.9, o, 1.3}};
    case Axis::z: return {Point3{0.3, -0.7, o}, Point3{-1.1, 0.2, o}, Point3{0.9, 1.3, o}};
    }
    return {};
}

inline ZoneLabel zone_of(const Point3& p, const Params& params) {
    const double d = p.z - params.b;
    if (std::abs(d) <= kBoundaryTieTol) return ZoneLabel::on_PC0;
    return d > 0.0 ? ZoneLabel::Z2 : ZoneLabel::Z0;
}

inline Region region_of(const Point3& p) {
    if (std::abs(p.x) <= kBoundaryTieTol) return Region::on_PC_minus1;
    return p.x > 0.0 ? Region::R1 : Region::R2;
}

struct Preimage {
    Point3 point;
    Region region = Region::R1;
};

/// Rank-one preimages: (+-sqrt(z - b), x, y) in Z2, the merged (0, x, y) on PC0,
/// none in Z0.
inline std::vector<Preimage> preimages(const Point3& p, const Params& params) {
    if (!p.finite()) throw Error(Errc::invalid_argument, "point must be finite");
    switch (zone_of(p, params)) {
    case ZoneLabel::Z0: return {};
    case ZoneLabel::on_PC0: return {Preimage{Point3{0.0, p.x, p.y}, Region::on_PC_minus1}};
    case ZoneLabel::Z2: {
        const double r = std::sqrt(p.z - params.b);
        return {Preimage{Point3{r, p.x, p.y}, Region::R1}, Preimage{Point3{-r, p.x, p.y}, Region::R2}};
    }
    }
    return {};
}

struct PlaneSideStats {
    AxisPlane plane;
    std::size_t below = 0;  ///< signed distance < -tol
    std::size_t on = 0;
    std::size_t above = 0;
    double min_signed = 0.0;
    double max_signed = 0.0;

    double fraction_below(std::size_t total) const { return static_cast<double>(below) / total; }
    double fraction_above(std::size_t total) const { return static_cast<double>(above) / total; }
};

struct BoundsReport {
    std::size_t n_points = 0;
    std::vector<PlaneSideStats> planes;
    Point3 box_min;
    Point3 box_max;
};

/// Side statistics of an orbit relative to PC_{-1} .. PC_{k_max}.
inline BoundsReport attractor_bounds_report(const std::vector<Point3>& orbit_pts, const Params& params,
                                            int k_max = 8) {
    if (orbit_pts.empty()) throw Error(Errc::invalid_argument, "empty orbit");
    BoundsReport rep;
    rep.n_points = orbit_pts.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    rep.box_min = {inf, inf, inf};
    rep.box_max = {-inf, -inf, -inf};
    for (const auto& p : orbit_pts) {
        rep.box_min = {std::min(rep.box_min.x, p.x), std::min(rep.box_min.y, p.y), std::min(rep.box_min.z, p.z)};
        rep.box_max = {std::max(rep.box_max.x, p.x), std::max(rep.box_max.y, p.y), std::max(rep.box_max.z, p.z)};
    }
    for (int k = -1; k <= k_max; ++k) {
        PlaneSideStats st;
        st.plane = critical_plane(k, params);
        st.min_signed = inf;
        st.max_signed = -inf;
        for (const auto& p : orbit_pts) {
            const double d = st.plane.signed_distance(p);
            st.min_signed = std::min(st.min_signed, d);
            st.max_signed = std::max(st.max_signed, d);
            if (d < -kBoundaryTieTol) ++st.below;
            else if (d > kBoundaryTieTol) ++st.above;
            else ++st.on;
        }
        rep.planes.push_back(st);
    }
    return rep;
}

} // namespace sdmap
