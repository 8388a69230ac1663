#pragma once

// Attractor catalogs and basin classification on 2D slices of state space.
//
// Cycles are found by exact recurrence and matched by sup-distance. Bounded
// non-periodic limit sets are stored as voxel occupancy histograms; a tail
// matches one when it stays inside the occupied voxels and visits about as
// much of the histogram mass as a sample of the same length would.

#include <sdmap/critical.hpp>
#include <sdmap/error.hpp>
#include <sdmap/map_core.hpp>
#include <sdmap/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sdmap {

inline constexpr int kDivergent = -1;
inline constexpr int kUndecided = -2;

enum class AttractorKind { fixed_point, cycle, chaotic };

inline const char* to_string(AttractorKind k) {
    switch (k) {
    case AttractorKind::fixed_point: return "fixed_point";
    case AttractorKind::cycle: return "cycle";
    case AttractorKind::chaotic: return "chaotic";
    }
    return "?";
}

/// Occupancy of a cubic voxel grid covering [-half_width, half_width]^3.
struct VoxelHistogram {
    double half_width = kDefaultEscapeRadius;
    double voxel = 0.25;
    int per_axis = 0;
    std::vector<float> mass;  ///< normalized to sum 1

    std::size_t index_of(const Point3& p) const {
        const auto idx = [&](double c) {
            const int k = static_cast<int>(std::floor((c + half_width) / voxel));
            return static_cast<std::size_t>(std::clamp(k, 0, per_axis - 1));
        };
        const auto n = static_cast<std::size_t>(per_axis);
        return (idx(p.x) * n + idx(p.y)) * n + idx(p.z);
    }

    std::size_t occupied() const {
        return static_cast<std::size_t>(std::count_if(mass.begin(), mass.end(), [](float m) { return m > 0.0f; }));
    }

    /// Mass a sample of n independent draws is expected to touch.
    double expected_coverage(std::size_t n) const {
        double e = 0.0;
        for (float m : mass)
            if (m > 0.0f) e += m * -std::expm1(static_cast<double>(n) * std::log1p(-static_cast<double>(m)));
        return e;
    }
};

struct Attractor {
    int id = 0;
    AttractorKind kind = AttractorKind::chaotic;
    int period = 0;  ///< 0 for chaotic
    /// Exact cycle points in orbit order, or an evenly spaced cloud sample.
    std::vector<Point3> signature;
    double b = 0.0;
    Point3 seed;
    VoxelHistogram histogram;  ///< chaotic only
    std::size_t coverage_n = 0;
    double coverage_expected = 0.0;
};

struct CatalogOptions {
    std::size_t max_iter = 5000;
    std::size_t transient = 1000;
    double escape_radius = kDefaultEscapeRadius;
    std::size_t signature_points = 512;
    /// Sup-distance from tail points to a cycle's points.
    double match_tol = 0.05;
    double recurrence_tol = 1e-8;
    int max_recurrence_period = 64;
    /// Orbit length used to build a chaotic attractor's histogram.
    std::size_t histogram_samples = 50'000;
    double voxel = 0.25;
    /// Minimum of containment and normalized coverage for a cloud match.
    double cloud_score_min = 0.8;
    bool rerun_undecided = true;
    unsigned threads = 0;
};

/// Seeds used when the caller supplies none. The last three are generic points
/// on the two strand-coincidence sheets and off them; the others hit the
/// critical point 0 and so never leave an unstable cycle of H when b = -2.
inline std::vector<Point3> default_seeds() {
    return {{0.0, -0.5, 0.0},  {0.0, -0.5, 0.5}, {-0.5, 0.0, 0.0}, {-0.5, -0.01, 0.0}, {-0.5, -0.5, 0.0},
            {0.1, 0.1, 0.3}, {0.1, 0.3, 0.1}, {0.1, 0.2, 0.3}};
}

namespace detail {

inline bool escaped(const Point3& p, double r) { return !(p.sup_norm() <= r); }

/// Advances p by n steps; false on escape.
inline bool advance(Point3& p, const Params& params, std::size_t n, double r) {
    for (std::size_t i = 0; i < n; ++i) {
        if (escaped(p, r)) return false;
        p = Point3{p.y, p.z, p.x * p.x + params.b};
    }
    return !escaped(p, r);
}

/// Smallest p <= max_period with |T^p(q) - q| < tol, else 0.
inline int recurrence_period(const Point3& q, const Params& params, int max_period, double tol) {
    Point3 p = q;
    for (int k = 1; k <= max_period; ++k) {
        p = Point3{p.y, p.z, p.x * p.x + params.b};
        if (sup_distance(p, q) < tol) return k;
    }
    return 0;
}

inline std::vector<Point3> cycle_points(Point3 q, const Params& params, int period) {
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(period));
    for (int k = 0; k < period; ++k) {
        pts.push_back(q);
        q = Point3{q.y, q.z, q.x * q.x + params.b};
    }
    const auto first = std::min_element(pts.begin(), pts.end(), lex_less);
    std::rotate(pts.begin(), first, pts.end());
    return pts;
}

inline VoxelHistogram make_histogram(const std::vector<Point3>& pts, double half_width, double voxel) {
    VoxelHistogram h;
    h.half_width = half_width;
    h.voxel = voxel;
    h.per_axis = static_cast<int>(std::ceil(2.0 * half_width / voxel));
    const auto n = static_cast<std::size_t>(h.per_axis);
    std::vector<double> counts(n * n * n, 0.0);
    for (const auto& p : pts) counts[h.index_of(p)] += 1.0;
    h.mass.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) h.mass[i] = static_cast<float>(counts[i] / pts.size());
    return h;
}

/// Largest distance from any tail point to its nearest cycle point.
inline double cycle_distance(const std::vector<Point3>& tail, const Attractor& a) {
    double worst = 0.0;
    for (const auto& p : tail) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : a.signature) best = std::min(best, sup_distance(p, s));
        worst = std::max(worst, best);
        if (!(worst < std::numeric_limits<double>::infinity())) break;
    }
    return worst;
}

/// Voxels visited by a tail, sorted, with visit counts.
struct TailCells {
    double half_width = 0.0;
    double voxel = 0.0;
    std::size_t n_points = 0;
    std::vector<std::pair<std::size_t, std::size_t>> cells;
};

inline TailCells tail_cells(const std::vector<Point3>& tail, const VoxelHistogram& grid) {
    std::vector<std::size_t> idx;
    idx.reserve(tail.size());
    for (const auto& p : tail) idx.push_back(grid.index_of(p));
    std::sort(idx.begin(), idx.end());
    TailCells tc{grid.half_width, grid.voxel, tail.size(), {}};
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && idx[j] == idx[i]) ++j;
        tc.cells.emplace_back(idx[i], j - i);
        i = j;
    }
    return tc;
}

inline double cloud_score(const TailCells& tc, const Attractor& a) {
    const auto& h = a.histogram;
    std::size_t inside = 0;
    double covered = 0.0;
    for (const auto& [v, count] : tc.cells) {
        if (h.mass[v] > 0.0f) inside += count;
        covered += h.mass[v];
    }
    const double expected = tc.n_points == a.coverage_n ? a.coverage_expected : h.expected_coverage(tc.n_points);
    const double containment = static_cast<double>(inside) / static_cast<double>(tc.n_points);
    const double coverage = expected > 0.0 ? std::min(1.0, covered / expected) : 0.0;
    return std::min(containment, coverage);
}

inline double cloud_score(const std::vector<Point3>& tail, const Attractor& a) {
    return cloud_score(tail_cells(tail, a.histogram), a);
}

/// Tail of the orbit after `transient` steps, `length` points long; empty on escape.
inline std::optional<std::vector<Point3>> tail_of(Point3 p, const Params& params, std::size_t transient,
                                                  std::size_t length, double r) {
    if (!advance(p, params, transient, r)) return std::nullopt;
    std::vector<Point3> tail;
    tail.reserve(length);
    for (std::size_t i = 0; i < length; ++i) {
        if (escaped(p, r)) return std::nullopt;
        tail.push_back(p);
        p = Point3{p.y, p.z, p.x * p.x + params.b};
    }
    if (escaped(p, r)) return std::nullopt;
    return tail;
}

inline std::size_t tail_length(const CatalogOptions& opt) {
    return opt.max_iter > opt.transient ? opt.max_iter - opt.transient : 1;
}

/// Label of a tail against the catalog, or nullopt when nothing matches.
inline std::optional<int> match_tail(const std::vector<Point3>& tail, const std::vector<Attractor>& catalog,
                                     const CatalogOptions& opt) {
    // Cycles are checked on the last signature_points of the tail.
    const std::size_t k = std::min(tail.size(), opt.signature_points);
    const std::vector<Point3> recent(tail.end() - static_cast<std::ptrdiff_t>(k), tail.end());
    std::optional<int> best;
    double best_d = opt.match_tol;
    for (const auto& a : catalog) {
        if (a.kind == AttractorKind::chaotic) continue;
        const double d = cycle_distance(recent, a);
        if (d < best_d) {
            best_d = d;
            best = a.id;
        }
    }
    if (best) return best;
    double best_s = opt.cloud_score_min;
    std::optional<TailCells> tc;
    for (const auto& a : catalog) {
        if (a.kind != AttractorKind::chaotic) continue;
        if (!tc || tc->half_width != a.histogram.half_width || tc->voxel != a.histogram.voxel)
            tc = tail_cells(tail, a.histogram);
        const double s = cloud_score(*tc, a);
        if (s >= best_s) {
            best_s = s;
            best = a.id;
        }
    }
    return best;
}

} // namespace detail

/// Iterates each seed and records its bounded limit set unless an equal one is
/// already cataloged. Divergent seeds contribute nothing.
inline std::vector<Attractor> build_catalog(const Params& params, const std::vector<Point3>& seeds,
                                            const CatalogOptions& opt = {}) {
    if (seeds.empty()) throw Error(Errc::invalid_argument, "catalog needs at least one seed");
    if (opt.max_iter <= opt.transient) throw Error(Errc::invalid_argument, "max_iter must exceed transient");
    const double r = opt.escape_radius;
    std::vector<Attractor> catalog;
    for (const auto& seed : seeds) {
        if (!seed.finite()) throw Error(Errc::invalid_argument, "seed must be finite");
        Point3 p = seed;
        if (!detail::advance(p, params, opt.transient, r)) continue;

        // Look for an exact cycle, advancing in chunks until max_iter is used up.
        int period = 0;
        const auto chunk = static_cast<std::size_t>(opt.max_recurrence_period);
        bool bounded = true;
        Point3 q = p;
        for (std::size_t used = opt.transient; used < opt.max_iter; used += chunk) {
            period = detail::recurrence_period(q, params, opt.max_recurrence_period, opt.recurrence_tol);
            if (period > 0) break;
            if (!detail::advance(q, params, chunk, r)) {
                bounded = false;
                break;
            }
        }
        if (!bounded) continue;

        if (period > 0) {
            auto pts = detail::cycle_points(q, params, period);
            const bool known = std::any_of(catalog.begin(), catalog.end(), [&](const Attractor& a) {
                return a.kind != AttractorKind::chaotic && detail::cycle_distance(pts, a) < opt.match_tol;
            });
            if (known) continue;
            Attractor a;
            a.id = static_cast<int>(catalog.size());
            a.kind = period == 1 ? AttractorKind::fixed_point : AttractorKind::cycle;
            a.period = period;
            a.signature = std::move(pts);
            a.b = params.b;
            a.seed = seed;
            catalog.push_back(std::move(a));
            continue;
        }

        // Same tail a classified point would produce, so catalog and classifier agree.
        const auto tail = detail::tail_of(seed, params, opt.transient, detail::tail_length(opt), r);
        if (!tail) continue;
        if (detail::match_tail(*tail, catalog, opt)) continue;

        std::vector<Point3> cloud;
        cloud.reserve(opt.histogram_samples);
        Point3 c = tail->back();
        bool ok = true;
        for (std::size_t i = 0; i < opt.histogram_samples; ++i) {
            if (detail::escaped(c, r)) {
                ok = false;
                break;
            }
            cloud.push_back(c);
            c = Point3{c.y, c.z, c.x * c.x + params.b};
        }
        if (!ok || cloud.empty()) continue;

        Attractor a;
        a.id = static_cast<int>(catalog.size());
        a.kind = AttractorKind::chaotic;
        a.period = 0;
        a.b = params.b;
        a.seed = seed;
        a.histogram = detail::make_histogram(cloud, r, opt.voxel);
        a.coverage_n = tail->size();
        a.coverage_expected = a.histogram.expected_coverage(a.coverage_n);
        const std::size_t m = std::min(opt.signature_points, cloud.size());
        for (std::size_t i = 0; i < m; ++i) a.signature.push_back(cloud[i * cloud.size() / m]);
        catalog.push_back(std::move(a));
    }
    return catalog;
}

/// Attractor id, kDivergent or kUndecided.
inline int classify_point(const Point3& p0, const Params& params, const std::vector<Attractor>& catalog,
                          const CatalogOptions& opt = {}) {
    if (!p0.finite()) return kDivergent;
    if (opt.max_iter <= opt.transient) throw Error(Errc::invalid_argument, "max_iter must exceed transient");
    const std::size_t len = detail::tail_length(opt);
    const auto tail = detail::tail_of(p0, params, opt.transient, len, opt.escape_radius);
    if (!tail) return kDivergent;
    if (auto id = detail::match_tail(*tail, catalog, opt)) return *id;
    if (!opt.rerun_undecided) return kUndecided;

    // Longer transient, same tail length.
    const auto longer = detail::tail_of(p0, params, 4 * opt.max_iter - len, len, opt.escape_radius);
    if (!longer) return kDivergent;
    if (auto id = detail::match_tail(*longer, catalog, opt)) return *id;
    return kUndecided;
}

struct SweepAxis {
    Axis axis = Axis::x;
    double lo = -2.0;
    double hi = 2.0;
    int resolution = 200;

    double center(int i) const { return lo + (i + 0.5) * (hi - lo) / resolution; }
};

struct SliceSpec {
    Axis fixed_axis = Axis::z;
    double fixed_value = 0.5;
    SweepAxis u{Axis::x, -2.0, 2.0, 200};
    SweepAxis v{Axis::y, -2.0, 2.0, 200};

    void validate() const {
        if (u.resolution < 2 || v.resolution < 2)
            throw Error(Errc::invalid_argument, "slice resolution must be at least 2 per axis");
        if (u.axis == v.axis || u.axis == fixed_axis || v.axis == fixed_axis)
            throw Error(Errc::invalid_argument, "slice axes must be distinct");
        if (!(u.lo < u.hi) || !(v.lo < v.hi)) throw Error(Errc::invalid_argument, "slice ranges must be increasing");
    }

    Point3 point(int i, int j) const {
        double c[3] = {0, 0, 0};
        c[static_cast<int>(fixed_axis)] = fixed_value;
        c[static_cast<int>(u.axis)] = u.center(i);
        c[static_cast<int>(v.axis)] = v.center(j);
        return Point3{c[0], c[1], c[2]};
    }
};

/// labels[j * nu + i] is the cell at u index i, v index j.
struct BasinGrid {
    SliceSpec slice;
    double b = 0.0;
    std::vector<int> labels;
    std::vector<Attractor> catalog;
    CatalogOptions options;

    int nu() const { return slice.u.resolution; }
    int nv() const { return slice.v.resolution; }
    int at(int i, int j) const { return labels[static_cast<std::size_t>(j) * nu() + i]; }

    std::map<int, std::size_t> histogram() const {
        std::map<int, std::size_t> h;
        for (int l : labels) ++h[l];
        return h;
    }
};

inline BasinGrid basin_slice(const Params& params, const SliceSpec& slice, const std::vector<Attractor>& catalog,
                             const CatalogOptions& opt = {}) {
    slice.validate();
    BasinGrid g;
    g.slice = slice;
    g.b = params.b;
    g.catalog = catalog;
    g.options = opt;
    const auto nu = static_cast<std::size_t>(slice.u.resolution);
    const auto nv = static_cast<std::size_t>(slice.v.resolution);
    g.labels.assign(nu * nv, kUndecided);
    parallel_for(nu * nv, opt.threads, [&](std::size_t k) {
        const int i = static_cast<int>(k % nu);
        const int j = static_cast<int>(k / nu);
        g.labels[k] = classify_point(slice.point(i, j), params, catalog, opt);
    });
    return g;
}

inline BasinGrid basin_slice(const Params& params, const SliceSpec& slice, const CatalogOptions& opt = {},
                             const std::vector<Point3>& seeds = default_seeds()) {
    return basin_slice(params, slice, build_catalog(params, seeds, opt), opt);
}

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

using Palette = std::map<int, Rgb>;

/// Black for divergence, grey for undecided, then a fixed color cycle.
inline Palette default_palette(const BasinGrid& grid) {
    static constexpr Rgb cycle[] = {{230, 159, 0},  {86, 180, 233}, {0, 158, 115}, {240, 228, 66},
                                    {0, 114, 178},  {213, 94, 0},   {204, 121, 167}, {255, 255, 255}};
    Palette pal{{kDivergent, {0, 0, 0}}, {kUndecided, {128, 128, 128}}};
    int hi = -1;
    for (int l : grid.labels) hi = std::max(hi, l);
    for (const auto& a : grid.catalog) hi = std::max(hi, a.id);
    for (int id = 0; id <= hi; ++id) {
        const Rgb base = cycle[id % 8];
        const int shade = id / 8;
        pal[id] = Rgb{static_cast<std::uint8_t>(base.r >> shade), static_cast<std::uint8_t>(base.g >> shade),
                      static_cast<std::uint8_t>(base.b >> shade)};
    }
    return pal;
}

/// Binary PPM, one pixel per cell, highest v on the top row.
inline std::vector<std::uint8_t> render_grid(const BasinGrid& grid, const Palette& palette) {
    const int w = grid.nu();
    const int h = grid.nv();
    if (w <= 0 || h <= 0 || grid.labels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h))
        throw Error(Errc::invalid_argument, "grid dimensions do not match its labels");
    char header[64];
    const int n = std::snprintf(header, sizeof header, "P6\n%d %d\n255\n", w, h);
    std::vector<std::uint8_t> out(header, header + n);
    out.reserve(out.size() + 3 * grid.labels.size());
    for (int row = 0; row < h; ++row) {
        const int j = h - 1 - row;
        for (int i = 0; i < w; ++i) {
            const int label = grid.at(i, j);
            const auto it = palette.find(label);
            if (it == palette.end())
                throw Error(Errc::palette_missing_label, "palette has no color for label " + std::to_string(label));
            out.push_back(it->second.r);
            out.push_back(it->second.g);
            out.push_back(it->second.b);
        }
    }
    return out;
}

} // namespace sdmap
