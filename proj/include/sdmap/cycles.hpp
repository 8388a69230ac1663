#pragma once

// Periodic orbits of the reduced map H and their lifts to cycles of T.
//
// T^3 acts as H on each coordinate strand, so every cycle of T of period 3s
// is assembled from periodic points of H whose periods divide s. Seeds for
// the lifts follow the classical index families (one seed per homogeneous
// cycle when 3 does not divide n, two index families for period 3n, and the
// pair/triple mixing rules). Seeds are only trusted after the orbit they
// generate has been iterated, closed, and checked for minimal period.

#include <sdmap/error.hpp>
#include <sdmap/map_core.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sdmap {

struct Interval {
    double lo = -2.5;
    double hi = 2.5;
};

/// A periodic orbit of H. `points` are in orbit order, H(points[i]) = points[i+1].
struct Cycle1D {
    int period = 0;
    std::vector<double> points;
    double multiplier = 0.0;
    double b = 0.0;
    /// Another cycle found in the same search has a point within 1e-7 of this one.
    bool degenerate = false;
};

/// Identifies a source cycle by period and first point.
struct CycleRef {
    int period = 0;
    double x1 = 0.0;
};

inline CycleRef ref_of(const Cycle1D& c) { return CycleRef{c.period, c.points.front()}; }

enum class Stability { stable, unstable, nonhyperbolic };
enum class CycleKind { homogeneous, mixed };

inline const char* to_string(Stability s) {
    switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::nonhyperbolic: return "nonhyperbolic";
    }
    return "unknown";
}

inline const char* to_string(CycleKind k) { return k == CycleKind::homogeneous ? "homogeneous" : "mixed"; }

struct Provenance {
    CycleKind kind = CycleKind::homogeneous;
    std::vector<CycleRef> sources;
    Point3 seed;
};

/// A cycle of T. `eigenvalues` are those of the Jacobian product over
/// lcm(period, 3) steps, i.e. of the cycle seen as a cycle of T^3; that
/// product is diagonal, so they are real and equal the strand multipliers.
struct Cycle3D {
    int period = 0;
    std::vector<Point3> points;
    std::array<double, 3> eigenvalues{};
    Stability stability = Stability::unstable;
    Provenance provenance;
    bool degenerate = false;
};

struct ConjugateTriple {
    Cycle1D X;
    Cycle1D Y;
    Cycle1D Z;
};

struct StabilityReport {
    Stability stability = Stability::unstable;
    std::array<double, 3> eigenvalues{};
};

struct CycleSearchOptions {
    Interval interval{};
    int grid_points = 20001;
};

/// Seeds that failed validation, one message each.
using Diagnostics = std::vector<std::string>;

inline constexpr double kOrbitResidualTol = 1e-10;
inline constexpr double kMinimalPeriodTol = 1e-9;
inline constexpr double kDedupTol = 1e-9;
inline constexpr double kUnitModulusTol = 1e-9;
inline constexpr double kDegenerateTol = 1e-7;

namespace detail {

struct Residual {
    double g;   // H^n(x) - x
    double dg;  // (H^n)'(x) - 1
};

inline Residual cycle_residual(double x, double b, int n) {
    double u = x;
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        d *= 2.0 * u;
        u = u * u + b;
    }
    return {u - x, d - 1.0};
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Root of g = H^n(x) - x in [lo, hi] where g(lo) and g(hi) have opposite signs.
inline double refine_root(double lo, double hi, double b, int n) {
    double glo = cycle_residual(lo, b, n).g;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = cycle_residual(mid, b, n).g;
        if (gm == 0.0) return mid;
        if (sign_of(gm) == sign_of(glo)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    double x = 0.5 * (lo + hi);
    // Newton polish, kept only while it stays inside the bracket and improves.
    for (int it = 0; it < 8; ++it) {
        const auto r = cycle_residual(x, b, n);
        if (r.g == 0.0 || r.dg == 0.0) break;
        const double next = x - r.g / r.dg;
        if (next < lo || next > hi) break;
        if (std::abs(cycle_residual(next, b, n).g) >= std::abs(r.g)) break;
        x = next;
    }
    return x;
}

/// Zero of g' = (H^n)' - 1 in [lo, hi], assuming a sign change.
inline std::optional<double> refine_extremum(double lo, double hi, double b, int n) {
    double dlo = cycle_residual(lo, b, n).dg;
    const double dhi = cycle_residual(hi, b, n).dg;
    if (sign_of(dlo) == sign_of(dhi) || sign_of(dlo) == 0) return std::nullopt;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double dm = cycle_residual(mid, b, n).dg;
        if (dm == 0.0) return mid;
        if (sign_of(dm) == sign_of(dlo)) {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline std::vector<int> proper_divisors(int n) {
    std::vector<int> out;
    for (int d = 1; d < n; ++d)
        if (n % d == 0) out.push_back(d);
    return out;
}

inline double multiplier_of(const std::vector<double>& pts) {
    double m = 1.0;
    for (double x : pts) m *= 2.0 * x;
    return m;
}

inline std::vector<double> sorted_copy(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

inline bool same_point_set(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    if (a.size() != b.size()) return false;
    const auto sa = sorted_copy(a);
    const auto sb = sorted_copy(b);
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (std::abs(sa[i] - sb[i]) > tol) return false;
    return true;
}

/// All roots of H^n(x) - x on a uniform grid, including close pairs that do not
/// produce a sign change between grid samples.
inline std::vector<double> grid_roots(double b, int n, const CycleSearchOptions& opt) {
    const int m = opt.grid_points;
    const double lo = opt.interval.lo;
    const double hi = opt.interval.hi;
    const double h = (hi - lo) / (m - 1);
    std::vector<double> xs(static_cast<std::size_t>(m));
    std::vector<double> gs(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        xs[i] = (i == m - 1) ? hi : lo + h * i;
        gs[i] = cycle_residual(xs[i], b, n).g;
    }
    std::vector<double> roots;
    for (int i = 0; i < m; ++i) {
        if (gs[i] == 0.0) {
            roots.push_back(xs[i]);
            continue;
        }
        if (i + 1 < m && gs[i + 1] != 0.0 && sign_of(gs[i]) != sign_of(gs[i + 1]))
            roots.push_back(refine_root(xs[i], xs[i + 1], b, n));
        // A grid-local extremum that does not cross zero may hide two roots.
        if (i > 0 && i + 1 < m && sign_of(gs[i - 1]) == sign_of(gs[i]) &&
            sign_of(gs[i + 1]) == sign_of(gs[i]) && (gs[i] - gs[i - 1]) * (gs[i + 1] - gs[i]) < 0.0) {
            const auto xe = refine_extremum(xs[i - 1], xs[i + 1], b, n);
            if (!xe) continue;
            const double ge = cycle_residual(*xe, b, n).g;
            if (ge == 0.0) {
                roots.push_back(*xe);
            } else if (sign_of(ge) != sign_of(gs[i])) {
                roots.push_back(refine_root(xs[i - 1], *xe, b, n));
                roots.push_back(refine_root(*xe, xs[i + 1], b, n));
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double c) { return std::abs(a - c) <= 1e-14 * std::max(1.0, std::abs(a)); }),
                roots.end());
    return roots;
}

inline std::vector<double> rotate_to_min(std::vector<double> pts) {
    auto it = std::min_element(pts.begin(), pts.end());
    std::rotate(pts.begin(), it, pts.end());
    return pts;
}

inline bool same_orbit(const std::vector<Point3>& a, const std::vector<Point3>& b, double tol) {
    if (a.size() != b.size()) return false;
    auto sa = a;
    auto sb = b;
    std::sort(sa.begin(), sa.end(), lex_less);
    std::sort(sb.begin(), sb.end(), lex_less);
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (sup_distance(sa[i], sb[i]) > tol) return false;
    return true;
}

inline double snap(double v, const std::vector<double>& candidates, double tol) {
    double best = v;
    double best_d = tol;
    for (double c : candidates) {
        const double d = std::abs(c - v);
        if (d <= best_d) {
            best = c;
            best_d = d;
        }
    }
    return best;
}

/// Iterates `seed` for `period` steps, snapping each new coordinate onto the
/// known periodic points of H, and validates closure, per-step residuals and
/// minimal period. Returns the orbit or a reason for rejection.
inline std::pair<std::optional<std::vector<Point3>>, std::string>
trace_cycle(const Point3& seed, const Params& params, int period, const std::vector<double>& source_points) {
    std::vector<Point3> pts;
    pts.reserve(static_cast<std::size_t>(period));
    Point3 p = seed;
    for (int k = 0; k < period; ++k) {
        pts.push_back(p);
        const Point3 q = apply_T(p, params);
        p = Point3{q.x, q.y, snap(q.z, source_points, 1e-9)};
    }
    for (int k = 0; k < period; ++k) {
        const Point3 img = apply_T(pts[static_cast<std::size_t>(k)], params);
        const Point3& next = pts[static_cast<std::size_t>((k + 1) % period)];
        if (sup_distance(img, next) > kOrbitResidualTol)
            return {std::nullopt, "orbit does not close with period " + std::to_string(period)};
    }
    for (int d : proper_divisors(period)) {
        if (sup_distance(pts[static_cast<std::size_t>(d)], pts[0]) < kMinimalPeriodTol)
            return {std::nullopt, "minimal period " + std::to_string(d) + " instead of " + std::to_string(period)};
    }
    return {std::move(pts), {}};
}

inline std::string describe(const Point3& p) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "(%.10g, %.10g, %.10g)", p.x, p.y, p.z);
    return buf;
}

inline std::array<std::complex<double>, 3> cubic_roots(double a2, double a1, double a0) {
    // Roots of t^3 + a2 t^2 + a1 t + a0.
    const double q = (3.0 * a1 - a2 * a2) / 9.0;
    const double r = (9.0 * a2 * a1 - 27.0 * a0 - 2.0 * a2 * a2 * a2) / 54.0;
    const double disc = q * q * q + r * r;
    const double shift = -a2 / 3.0;
    if (disc <= 0.0) {
        const double rho = std::sqrt(std::max(0.0, -q * q * q));
        const double theta = rho > 0.0 ? std::acos(std::clamp(r / rho, -1.0, 1.0)) : 0.0;
        const double m = 2.0 * std::cbrt(rho);
        const double pi = std::acos(-1.0);
        return {std::complex<double>(m * std::cos(theta / 3.0) + shift, 0.0),
                std::complex<double>(m * std::cos((theta + 2.0 * pi) / 3.0) + shift, 0.0),
                std::complex<double>(m * std::cos((theta + 4.0 * pi) / 3.0) + shift, 0.0)};
    }
    const double sd = std::sqrt(disc);
    const double s = std::cbrt(r + sd);
    const double t = std::cbrt(r - sd);
    const double re = -(s + t) / 2.0 + shift;
    const double im = std::sqrt(3.0) / 2.0 * (s - t);
    return {std::complex<double>(s + t + shift, 0.0), std::complex<double>(re, im),
            std::complex<double>(re, -im)};
}

} // namespace detail

/// Eigenvalues of a 3x3 matrix. Triangular matrices (the Jacobian products this
/// library produces over multiples of three steps) return their diagonal
/// exactly; anything else goes through the characteristic cubic.
inline std::array<std::complex<double>, 3> eigenvalues(const Mat3& m) {
    if (m.is_upper_triangular() || m.is_lower_triangular())
        return {std::complex<double>(m(0, 0)), std::complex<double>(m(1, 1)), std::complex<double>(m(2, 2))};
    const double c2 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0) +
                      m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    return detail::cubic_roots(-m.trace(), c2, -m.det());
}

inline Stability stability_from_moduli(const std::array<double, 3>& moduli) {
    bool any_unit = false;
    bool any_outside = false;
    for (double r : moduli) {
        if (std::abs(r - 1.0) <= kUnitModulusTol) any_unit = true;
        else if (r > 1.0) any_outside = true;
    }
    if (any_unit) return Stability::nonhyperbolic;
    return any_outside ? Stability::unstable : Stability::stable;
}

/// Stability of a cycle from the Jacobian product over lcm(period, 3) steps.
inline StabilityReport classify_stability(const Cycle3D& c) {
    const int period = static_cast<int>(c.points.size());
    if (period == 0) throw Error(Errc::invalid_argument, "empty cycle");
    const int steps = std::lcm(period, 3);
    Mat3 m = Mat3::identity();
    for (int k = 0; k < steps; ++k) m = jacobian_T(c.points[static_cast<std::size_t>(k % period)]) * m;
    const auto ev = eigenvalues(m);
    StabilityReport rep;
    std::array<double, 3> moduli{};
    for (std::size_t i = 0; i < 3; ++i) {
        rep.eigenvalues[i] = ev[i].real();
        moduli[i] = std::abs(ev[i]);
    }
    rep.stability = stability_from_moduli(moduli);
    return rep;
}

inline Cycle3D make_cycle3d(std::vector<Point3> pts, Provenance prov, bool degenerate) {
    Cycle3D c;
    c.period = static_cast<int>(pts.size());
    c.points = std::move(pts);
    c.provenance = std::move(prov);
    c.degenerate = degenerate;
    const auto rep = classify_stability(c);
    c.eigenvalues = rep.eigenvalues;
    c.stability = rep.stability;
    return c;
}

/// Fixed points X1 = (x1, x1, x1) and X2 = (x2, x2, x2), x_{1,2} = 1/2 +- sqrt(1 - 4b)/2.
inline std::array<Cycle3D, 2> fixed_points_T(const Params& params) {
    const double disc = 1.0 - 4.0 * params.b;
    if (disc < 0.0) throw Error(Errc::no_real_fixed_points, "b > 1/4");
    const double root = std::sqrt(disc);
    std::array<Cycle3D, 2> out;
    const double xs[2] = {0.5 + 0.5 * root, 0.5 - 0.5 * root};
    for (int i = 0; i < 2; ++i) {
        const Point3 p{xs[i], xs[i], xs[i]};
        Provenance prov{CycleKind::homogeneous, {CycleRef{1, xs[i]}}, p};
        out[static_cast<std::size_t>(i)] = make_cycle3d({p}, std::move(prov), disc == 0.0);
    }
    return out;
}

/// All cycles of H of minimal period n inside the search interval.
inline std::vector<Cycle1D> find_cycles_1d(const Params& params, int n, const CycleSearchOptions& opt = {}) {
    if (n < 1) throw Error(Errc::invalid_argument, "period must be positive");
    if (!(opt.interval.lo < opt.interval.hi)) throw Error(Errc::invalid_argument, "empty search interval");
    if (opt.grid_points < 3) throw Error(Errc::invalid_argument, "grid needs at least 3 points");
    const double b = params.b;

    std::vector<double> roots;
    for (double r : detail::grid_roots(b, n, opt)) {
        bool lower = false;
        for (int d : detail::proper_divisors(n))
            if (std::abs(h1d_n(r, params, d) - r) < 1e-8) lower = true;
        if (!lower) roots.push_back(r);
    }

    std::vector<Cycle1D> cycles;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        std::vector<double> pts{roots[i]};
        for (int k = 1; k < n; ++k) {
            double u = h1d(pts.back(), params);
            auto it = std::lower_bound(roots.begin(), roots.end(), u);
            std::size_t best = roots.size();
            // Near a fold the refined roots of a tangent pair are only good to
            // about 1e-9, so snap to the nearest root within the collision scale.
            double best_d = kDegenerateTol;
            for (auto cand : {it, it == roots.begin() ? it : std::prev(it)}) {
                if (cand == roots.end()) continue;
                const double d = std::abs(*cand - u);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<std::size_t>(cand - roots.begin());
                }
            }
            if (best < roots.size()) {
                used[best] = true;
                u = roots[best];
            }
            pts.push_back(u);
        }
        pts = detail::rotate_to_min(std::move(pts));
        const bool dup = std::any_of(cycles.begin(), cycles.end(), [&](const Cycle1D& c) {
            return detail::same_point_set(c.points, pts, kDedupTol);
        });
        if (dup) continue;
        Cycle1D c;
        c.period = n;
        c.multiplier = detail::multiplier_of(pts);
        c.points = std::move(pts);
        c.b = b;
        cycles.push_back(std::move(c));
    }

    for (std::size_t i = 0; i < cycles.size(); ++i)
        for (std::size_t j = i + 1; j < cycles.size(); ++j)
            for (double p : cycles[i].points)
                for (double q : cycles[j].points)
                    if (std::abs(p - q) < kDegenerateTol) cycles[i].degenerate = cycles[j].degenerate = true;

    std::sort(cycles.begin(), cycles.end(),
              [](const Cycle1D& a, const Cycle1D& c) { return a.points.front() < c.points.front(); });
    return cycles;
}

/// Conjugate cycles of F and G. With identity outer factors both are the
/// orbit of X shifted by one step: Y_i = Z_i = H(X_i).
inline ConjugateTriple conjugate_of(const Cycle1D& X) {
    if (X.period < 1 || static_cast<int>(X.points.size()) != X.period)
        throw Error(Errc::invalid_argument, "malformed 1D cycle");
    ConjugateTriple t{X, X, X};
    // The stored successor equals H(X_i) up to the refinement tolerance.
    for (std::size_t i = 0; i < X.points.size(); ++i) {
        const std::size_t next = (i + 1) % X.points.size();
        t.Y.points[i] = X.points[next];
        t.Z.points[i] = X.points[next];
    }
    t.Y.multiplier = detail::multiplier_of(t.Y.points);
    t.Z.multiplier = detail::multiplier_of(t.Z.points);
    return t;
}

namespace detail {

inline std::vector<double> all_points(std::initializer_list<const Cycle1D*> cycles) {
    std::vector<double> out;
    for (const auto* c : cycles) out.insert(out.end(), c->points.begin(), c->points.end());
    return out;
}

inline void require_valid(const Cycle1D& c) {
    if (c.period < 1 || static_cast<int>(c.points.size()) != c.period)
        throw Error(Errc::invalid_argument, "malformed 1D cycle");
}

inline void add_unique(std::vector<Cycle3D>& out, Cycle3D c) {
    for (const auto& e : out)
        if (same_orbit(e.points, c.points, kDedupTol)) return;
    out.push_back(std::move(c));
}

struct SeedRun {
    const Params& params;
    int period;
    std::vector<double> source_points;
    Provenance base;
    bool degenerate;
    Diagnostics* diag;
    std::vector<Cycle3D> cycles;
    int rejected = 0;

    void try_seed(const Point3& seed) {
        auto [pts, why] = trace_cycle(seed, params, period, source_points);
        if (!pts) {
            ++rejected;
            if (diag) diag->push_back("seed " + describe(seed) + " dropped: " + why);
            return;
        }
        Provenance prov = base;
        prov.seed = seed;
        add_unique(cycles, make_cycle3d(std::move(*pts), std::move(prov), degenerate));
    }
};

inline bool same_cycle(const Cycle1D& a, const Cycle1D& b) {
    return a.period == b.period && same_point_set(a.points, b.points, kDedupTol);
}

} // namespace detail

/// The single homogeneous cycle of period n (3 does not divide n). Seed is
/// (x_1, y_{2s+1}, z_{s+1}) for n = 3s+1 and (x_1, y_{s+1}, z_{2s+2}) for n = 3s+2,
/// indices 1-based into the conjugate cycles.
inline Cycle3D lift_homogeneous(const Cycle1D& X) {
    detail::require_valid(X);
    const int n = X.period;
    if (n % 3 == 0) throw Error(Errc::period_divisible_by_3, "period " + std::to_string(n));
    const auto conj = conjugate_of(X);
    const int s = n / 3;
    const auto y = [&](int i) { return conj.Y.points[static_cast<std::size_t>((i - 1) % n)]; };
    const auto z = [&](int i) { return conj.Z.points[static_cast<std::size_t>((i - 1) % n)]; };
    const Point3 seed = (n % 3 == 1) ? Point3{X.points[0], y(2 * s + 1), z(s + 1)}
                                     : Point3{X.points[0], y(s + 1), z(2 * s + 2)};
    const Params params(X.b);
    auto [pts, why] = detail::trace_cycle(seed, params, n, X.points);
    if (!pts) throw Error(Errc::lift_validation_failed, "seed " + detail::describe(seed) + ": " + why);
    return make_cycle3d(std::move(*pts), Provenance{CycleKind::homogeneous, {ref_of(X)}, seed}, X.degenerate);
}

/// Homogeneous cycles of period 3n from an n-cycle (n >= 2), seeded by
/// (x_1, y_j, z_{j+h}), h <= j <= n-2h, 1 <= h <= floor(n/3), and
/// (x_1, y_j, z_{j+1-h}), 2h-1 <= j <= n-h, 1 <= h <= floor((n+1)/3).
inline std::vector<Cycle3D> lift_homogeneous_3n(const Cycle1D& X, Diagnostics* diag = nullptr) {
    detail::require_valid(X);
    const int n = X.period;
    if (n < 2) throw Error(Errc::invalid_argument, "period-3n lift needs n >= 2");
    const auto conj = conjugate_of(X);
    const auto y = [&](int i) { return conj.Y.points[static_cast<std::size_t>(((i - 1) % n + n) % n)]; };
    const auto z = [&](int i) { return conj.Z.points[static_cast<std::size_t>(((i - 1) % n + n) % n)]; };
    const Params params(X.b);
    detail::SeedRun run{params, 3 * n, X.points, Provenance{CycleKind::homogeneous, {ref_of(X)}, {}},
                        X.degenerate, diag, {}, 0};
    const double x1 = X.points[0];
    for (int h = 1; h <= n / 3; ++h)
        for (int j = h; j <= n - 2 * h; ++j) run.try_seed({x1, y(j), z(j + h)});
    for (int h = 1; h <= (n + 1) / 3; ++h)
        for (int j = 2 * h - 1; j <= n - h; ++j) run.try_seed({x1, y(j), z(j + 1 - h)});
    if (run.cycles.empty())
        throw Error(Errc::lift_validation_failed, "no seed produced a cycle of period " + std::to_string(3 * n));
    return std::move(run.cycles);
}

/// Mixed cycles of period 3s, s = lcm(n, m), from two distinct coexisting
/// cycles A (n) and B (m). Seeds (x_1, b_j, z_l), 1 <= j <= d, 1 <= l <= n and
/// (x_1, b_j, c_l), 1 <= j <= d, 1 <= l <= m with d = gcd(n, m). The
/// deduplicated count must be (n + m) n m / s.
inline std::vector<Cycle3D> lift_mixed_pair(const Cycle1D& A, const Cycle1D& B, Diagnostics* diag = nullptr) {
    detail::require_valid(A);
    detail::require_valid(B);
    if (A.b != B.b) throw Error(Errc::invalid_argument, "cycles come from different parameters");
    if (detail::same_cycle(A, B)) throw Error(Errc::invalid_argument, "mixed lift needs distinct cycles");
    const int n = A.period;
    const int m = B.period;
    const int s = std::lcm(n, m);
    const int d = std::gcd(n, m);
    const auto ca = conjugate_of(A);
    const auto cb = conjugate_of(B);
    const auto at = [](const std::vector<double>& v, int i) { return v[static_cast<std::size_t>((i - 1) % v.size())]; };
    const Params params(A.b);
    detail::SeedRun run{params, 3 * s, detail::all_points({&A, &B}),
                        Provenance{CycleKind::mixed, {ref_of(A), ref_of(B)}, {}},
                        A.degenerate || B.degenerate, diag, {}, 0};
    const double x1 = A.points[0];
    for (int j = 1; j <= d; ++j)
        for (int l = 1; l <= n; ++l) run.try_seed({x1, at(cb.Y.points, j), at(ca.Z.points, l)});
    for (int j = 1; j <= d; ++j)
        for (int l = 1; l <= m; ++l) run.try_seed({x1, at(cb.Y.points, j), at(cb.Z.points, l)});
    const std::size_t expected = static_cast<std::size_t>((n + m) * n * m / s);
    if (run.cycles.size() != expected)
        throw Error(Errc::count_mismatch, "pair lift produced " + std::to_string(run.cycles.size()) +
                                              " cycles, expected " + std::to_string(expected));
    return std::move(run.cycles);
}

/// Mixed cycles of period 3S, S = lcm(n, m, p), using all three cycles.
/// Seeds (x_1, b_j, gamma_l) and (x_1, beta_l, c_j), 1 <= j <= d = gcd(n, m),
/// 1 <= l <= p lcm(m, n) / S. The deduplicated count must be 2 n m p / S.
inline std::vector<Cycle3D> lift_mixed_triple(const Cycle1D& A, const Cycle1D& B, const Cycle1D& C,
                                              Diagnostics* diag = nullptr) {
    detail::require_valid(A);
    detail::require_valid(B);
    detail::require_valid(C);
    if (A.b != B.b || A.b != C.b) throw Error(Errc::invalid_argument, "cycles come from different parameters");
    if (detail::same_cycle(A, B) || detail::same_cycle(A, C) || detail::same_cycle(B, C))
        throw Error(Errc::invalid_argument, "mixed lift needs pairwise distinct cycles");
    const int n = A.period;
    const int m = B.period;
    const int p = C.period;
    const int S = std::lcm(std::lcm(n, m), p);
    const int d = std::gcd(n, m);
    const int lmax = p * std::lcm(m, n) / S;
    const auto cb = conjugate_of(B);
    const auto cc = conjugate_of(C);
    const auto at = [](const std::vector<double>& v, int i) { return v[static_cast<std::size_t>((i - 1) % v.size())]; };
    const Params params(A.b);
    detail::SeedRun run{params, 3 * S, detail::all_points({&A, &B, &C}),
                        Provenance{CycleKind::mixed, {ref_of(A), ref_of(B), ref_of(C)}, {}},
                        A.degenerate || B.degenerate || C.degenerate, diag, {}, 0};
    const double x1 = A.points[0];
    for (int j = 1; j <= d; ++j)
        for (int l = 1; l <= lmax; ++l) run.try_seed({x1, at(cb.Y.points, j), at(cc.Z.points, l)});
    for (int j = 1; j <= d; ++j)
        for (int l = 1; l <= lmax; ++l) run.try_seed({x1, at(cc.Y.points, l), at(cb.Z.points, j)});
    const std::size_t expected = static_cast<std::size_t>(2 * n * m * p / S);
    if (run.cycles.size() != expected)
        throw Error(Errc::count_mismatch, "triple lift produced " + std::to_string(run.cycles.size()) +
                                              " cycles, expected " + std::to_string(expected));
    return std::move(run.cycles);
}

struct Census {
    int period = 0;
    double b = 0.0;
    std::vector<Cycle3D> homogeneous;
    std::vector<Cycle3D> mixed;

    std::size_t total() const { return homogeneous.size() + mixed.size(); }
};

/// Every cycle of T with the given period that the lifts produce.
inline Census census(const Params& params, int period, const CycleSearchOptions& opt = {},
                     Diagnostics* diag = nullptr) {
    if (period < 1) throw Error(Errc::invalid_argument, "period must be positive");
    Census out;
    out.period = period;
    out.b = params.b;
    const auto keep = [&](std::vector<Cycle3D>& into, std::vector<Cycle3D> found) {
        for (auto& c : found)
            if (c.period == period) detail::add_unique(into, std::move(c));
    };

    if (period % 3 != 0) {
        for (const auto& c : find_cycles_1d(params, period, opt)) keep(out.homogeneous, {lift_homogeneous(c)});
        return out;
    }

    const int s = period / 3;
    std::vector<Cycle1D> pool;
    for (int d = 1; d <= s; ++d)
        if (s % d == 0)
            for (auto& c : find_cycles_1d(params, d, opt)) pool.push_back(std::move(c));

    if (s >= 2)
        for (const auto& c : pool)
            if (c.period == s) keep(out.homogeneous, lift_homogeneous_3n(c, diag));

    for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            if (std::lcm(pool[i].period, pool[j].period) != s) continue;
            keep(out.mixed, lift_mixed_pair(pool[i], pool[j], diag));
        }
    for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = i + 1; j < pool.size(); ++j)
            for (std::size_t k = j + 1; k < pool.size(); ++k) {
                const int S = std::lcm(std::lcm(pool[i].period, pool[j].period), pool[k].period);
                if (S != s) continue;
                keep(out.mixed, lift_mixed_triple(pool[i], pool[j], pool[k], diag));
            }
    return out;
}

/// True if `p` lies on the cycle within `tol` (sup norm).
inline bool contains_point(const Cycle3D& c, const Point3& p, double tol = 1e-9) {
    return std::any_of(c.points.begin(), c.points.end(),
                       [&](const Point3& q) { return sup_distance(p, q) <= tol; });
}

} // namespace sdmap
