#pragma once

// Fold, flip and transcritical bifurcations of cycles of H (and hence of the
// cycles of T built from them), multiplier continuation, and bifurcation
// diagram sweeps of T.

#include <sdmap/cycles.hpp>
#include <sdmap/error.hpp>
#include <sdmap/map_core.hpp>
#include <sdmap/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sdmap {

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
};

enum class BifurcationKind { fold, flip, transcritical };

inline const char* to_string(BifurcationKind k) {
    switch (k) {
    case BifurcationKind::fold: return "fold";
    case BifurcationKind::flip: return "flip";
    case BifurcationKind::transcritical: return "transcritical";
    }
    return "unknown";
}

struct BifurcationEvent {
    BifurcationKind kind = BifurcationKind::fold;
    int period = 0;
    double b_star = 0.0;
    double x_star = 0.0;
};

struct MultiplierSample {
    double b = 0.0;
    double multiplier = 0.0;
    double x1 = 0.0;
};

/// One continued cycle branch: consecutive grid samples of the same cycle.
struct MultiplierBranch {
    std::vector<MultiplierSample> samples;
};

namespace detail {

/// Newton continuation of a cycle to a nearby parameter. Returns nullopt when
/// Newton fails, the cycle collapses onto a lower period, or the point jumps.
inline std::optional<Cycle1D> continue_cycle(const Cycle1D& c, double b_new, double max_jump = 0.05) {
    const int n = c.period;
    double x = c.points.front();
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        const auto r = cycle_residual(x, b_new, n);
        if (!std::isfinite(r.g) || r.dg == 0.0) return std::nullopt;
        const double step = r.g / r.dg;
        x -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        if (std::abs(cycle_residual(x, b_new, n).g) > 1e-12) return std::nullopt;
    }
    if (std::abs(x - c.points.front()) > max_jump) return std::nullopt;
    const Params params(b_new);
    for (int d : proper_divisors(n))
        if (std::abs(h1d_n(x, params, d) - x) < 1e-8) return std::nullopt;
    // Points start at the continued point so the next step follows the same one.
    std::vector<double> pts{x};
    for (int k = 1; k < n; ++k) pts.push_back(h1d(pts.back(), params));
    Cycle1D out;
    out.period = n;
    out.multiplier = multiplier_of(pts);
    out.points = std::move(pts);
    out.b = b_new;
    return out;
}

inline double point_set_distance(const Cycle1D& a, const Cycle1D& b) {
    if (a.period != b.period) return std::numeric_limits<double>::infinity();
    const auto sa = sorted_copy(a.points);
    const auto sb = sorted_copy(b.points);
    double m = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) m = std::max(m, std::abs(sa[i] - sb[i]));
    return m;
}

inline Cycle1D canonical(Cycle1D c) {
    c.points = rotate_to_min(std::move(c.points));
    return c;
}

/// Value and derivatives of H^n at (x, b) for the fold system.
struct FoldJet {
    double value, dx, db, dxx, dxb;
};

inline FoldJet fold_jet(double x, double b, int n) {
    double u = x, ux = 1.0, ub = 0.0, uxx = 0.0, uxb = 0.0;
    for (int k = 0; k < n; ++k) {
        const double nuxx = 2.0 * (ux * ux + u * uxx);
        const double nuxb = 2.0 * (ub * ux + u * uxb);
        const double nux = 2.0 * u * ux;
        const double nub = 2.0 * u * ub + 1.0;
        u = u * u + b;
        ux = nux;
        ub = nub;
        uxx = nuxx;
        uxb = nuxb;
    }
    return {u, ux, ub, uxx, uxb};
}

/// 2D Newton on H^n(x) = x, (H^n)'(x) = 1 in (x, b).
inline std::optional<std::pair<double, double>> newton_fold(double x, double b, int n) {
    for (int it = 0; it < 80; ++it) {
        const auto j = fold_jet(x, b, n);
        const double f1 = j.value - x;
        const double f2 = j.dx - 1.0;
        const double a11 = j.dx - 1.0, a12 = j.db, a21 = j.dxx, a22 = j.dxb;
        const double det = a11 * a22 - a12 * a21;
        if (!std::isfinite(det) || det == 0.0) return std::nullopt;
        const double dx = (f1 * a22 - f2 * a12) / det;
        const double db = (a11 * f2 - a21 * f1) / det;
        x -= dx;
        b -= db;
        if (std::abs(dx) < 1e-15 && std::abs(db) < 1e-15) break;
    }
    const auto j = fold_jet(x, b, n);
    if (std::abs(j.value - x) > 1e-12 || std::abs(j.dx - 1.0) > 1e-9) return std::nullopt;
    return std::make_pair(x, b);
}

} // namespace detail

/// Period-n cycle branches of H over a parameter grid, matched between
/// consecutive grid values by nearest point set. Branches end at folds. A
/// branch that cannot be matched while the cycle count is unchanged raises
/// branch_lost.
inline std::vector<MultiplierBranch> multiplier_curve(int n, Bracket b_range, int steps,
                                                      const CycleSearchOptions& opt = {},
                                                      double match_tol = 0.1) {
    if (steps < 2) throw Error(Errc::invalid_argument, "multiplier curve needs at least 2 steps");
    std::vector<MultiplierBranch> done;
    struct Active {
        MultiplierBranch branch;
        Cycle1D last;
    };
    std::vector<Active> active;
    std::size_t prev_count = 0;
    for (int k = 0; k < steps; ++k) {
        const double b = k + 1 == steps ? b_range.hi : b_range.lo + (b_range.hi - b_range.lo) * k / (steps - 1);
        auto cycles = find_cycles_1d(Params(b), n, opt);
        std::vector<bool> taken(cycles.size(), false);
        std::vector<Active> next;
        for (auto& a : active) {
            std::size_t best = cycles.size();
            double best_d = match_tol;
            for (std::size_t i = 0; i < cycles.size(); ++i) {
                if (taken[i]) continue;
                const double d = detail::point_set_distance(a.last, cycles[i]);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            if (best == cycles.size()) {
                if (k > 0 && cycles.size() == prev_count)
                    throw Error(Errc::branch_lost, "no continuation at b = " + std::to_string(b));
                done.push_back(std::move(a.branch));
                continue;
            }
            taken[best] = true;
            a.branch.samples.push_back({b, cycles[best].multiplier, cycles[best].points.front()});
            a.last = cycles[best];
            next.push_back(std::move(a));
        }
        for (std::size_t i = 0; i < cycles.size(); ++i) {
            if (taken[i]) continue;
            Active a;
            a.branch.samples.push_back({b, cycles[i].multiplier, cycles[i].points.front()});
            a.last = cycles[i];
            next.push_back(std::move(a));
        }
        active = std::move(next);
        prev_count = cycles.size();
    }
    for (auto& a : active) done.push_back(std::move(a.branch));
    return done;
}

/// Flip of a period-n cycle: each cycle present at one end of the bracket is
/// continued across it, and the sign of multiplier + 1 is bisected.
inline BifurcationEvent find_flip(int n, Bracket bracket, const CycleSearchOptions& opt = {},
                                  int scan_steps = 64) {
    if (n < 1 || !(bracket.lo < bracket.hi)) throw Error(Errc::invalid_argument, "bad flip query");
    bool lost = false;
    for (const double start : {bracket.lo, bracket.hi}) {
        const double end = (start == bracket.lo) ? bracket.hi : bracket.lo;
        for (const auto& c0 : find_cycles_1d(Params(start), n, opt)) {
            Cycle1D prev = c0;
            for (int k = 1; k <= scan_steps; ++k) {
                const double b = start + (end - start) * k / scan_steps;
                auto cur = detail::continue_cycle(prev, b);
                if (!cur) {
                    lost = true;
                    break;
                }
                const double f_prev = prev.multiplier + 1.0;
                const double f_cur = cur->multiplier + 1.0;
                if (detail::sign_of(f_prev) != detail::sign_of(f_cur) || f_cur == 0.0) {
                    // Bisect on sign(multiplier + 1) between prev.b and cur->b.
                    Cycle1D left = prev;
                    Cycle1D right = *cur;
                    for (int it = 0; it < 200 && std::abs(right.b - left.b) > 1e-15; ++it) {
                        const double mid = 0.5 * (left.b + right.b);
                        auto m = detail::continue_cycle(left, mid);
                        if (!m) throw Error(Errc::branch_lost, "flip bisection lost the branch");
                        if (detail::sign_of(m->multiplier + 1.0) == detail::sign_of(left.multiplier + 1.0))
                            left = *m;
                        else
                            right = *m;
                    }
                    const Cycle1D& at = std::abs(left.multiplier + 1.0) <= std::abs(right.multiplier + 1.0) ? left
                                                                                                             : right;
                    const auto canon = detail::canonical(at);
                    return {BifurcationKind::flip, n, at.b, canon.points.front()};
                }
                prev = std::move(*cur);
            }
        }
    }
    if (lost) throw Error(Errc::branch_lost, "no flip found and a branch could not be continued");
    throw Error(Errc::no_event_in_bracket, "no period-" + std::to_string(n) + " flip in bracket");
}

/// Fold of a period-n cycle: bisection on the number of period-n cycles,
/// then refinement. Saddle-node folds are polished with Newton on
/// H^n(x) = x, (H^n)'(x) = 1; a cycle born from the flip of a half-period
/// cycle is located as that flip.
inline BifurcationEvent find_fold(int n, Bracket bracket, const CycleSearchOptions& opt = {}) {
    if (n < 1 || !(bracket.lo < bracket.hi)) throw Error(Errc::invalid_argument, "bad fold query");
    const auto count = [&](double b) { return find_cycles_1d(Params(b), n, opt).size(); };
    const std::size_t c_lo = count(bracket.lo);
    const std::size_t c_hi = count(bracket.hi);
    if (c_lo == c_hi) throw Error(Errc::no_event_in_bracket, "cycle count does not change across bracket");
    double exist = c_lo > c_hi ? bracket.lo : bracket.hi;
    double other = c_lo > c_hi ? bracket.hi : bracket.lo;
    const std::size_t c_exist = std::max(c_lo, c_hi);
    const std::size_t c_other = std::min(c_lo, c_hi);
    for (int it = 0; it < 200 && std::abs(exist - other) > 1e-14; ++it) {
        const double mid = 0.5 * (exist + other);
        const std::size_t c = count(mid);
        if (c == c_exist) exist = mid;
        else if (c == c_other) other = mid;
        else exist = mid;  // an intermediate count still has the vanishing cycles nearby
    }

    // The cycles that vanish are those at `exist` not continued to `other`.
    const auto at_exist = find_cycles_1d(Params(exist), n, opt);
    const auto at_other = find_cycles_1d(Params(other), n, opt);
    const Cycle1D* vanishing = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : at_exist) {
        bool matched = false;
        for (const auto& o : at_other)
            if (detail::point_set_distance(c, o) < 1e-6) matched = true;
        if (matched) continue;
        const double dist = std::abs(c.multiplier - 1.0);
        if (dist < best) {
            best = dist;
            vanishing = &c;
        }
    }
    if (!vanishing) throw Error(Errc::no_event_in_bracket, "could not isolate the vanishing cycle");

    // Birth by period doubling: the new cycle sits on a half-period cycle.
    if (n % 2 == 0) {
        for (const auto& half : find_cycles_1d(Params(exist), n / 2, opt)) {
            double dmin = std::numeric_limits<double>::infinity();
            for (double p : vanishing->points)
                for (double q : half.points) dmin = std::min(dmin, std::abs(p - q));
            if (dmin < 1e-3 && std::abs(half.multiplier + 1.0) < 1e-2) {
                const double pad = std::max(1e-6, std::abs(exist - other) * 10.0);
                const auto flip = find_flip(n / 2, {std::min(exist, other) - pad, std::max(exist, other) + pad}, opt);
                return {BifurcationKind::fold, n, flip.b_star, flip.x_star};
            }
        }
    }

    double x_star = vanishing->points.front();
    double b_star = 0.5 * (exist + other);
    double best_res = std::numeric_limits<double>::infinity();
    for (double x0 : vanishing->points) {
        if (auto r = detail::newton_fold(x0, exist, n)) {
            const double res = std::abs(r->second - b_star);
            if (res < best_res && r->second >= bracket.lo - 1e-9 && r->second <= bracket.hi + 1e-9) {
                best_res = res;
                x_star = r->first;
                b_star = r->second;
            }
        }
    }
    if (!std::isfinite(best_res)) x_star = vanishing->points.front();
    // Report the smallest point of the collided cycle.
    {
        const Params p(b_star);
        std::vector<double> pts{x_star};
        for (int k = 1; k < n; ++k) pts.push_back(h1d(pts.back(), p));
        x_star = *std::min_element(pts.begin(), pts.end());
    }
    return {BifurcationKind::fold, n, b_star, x_star};
}

/// Stability exchange of the two fixed-point branches at common multiplier 1.
/// For this family it coincides with the period-1 fold.
inline BifurcationEvent find_transcritical(Bracket bracket, const CycleSearchOptions& opt = {}) {
    auto ev = find_fold(1, bracket, opt);
    ev.kind = BifurcationKind::transcritical;
    return ev;
}

/// Multipliers of the two fixed-point branches (x1 first), 1 -+ sqrt(1 - 4b).
inline std::pair<double, double> fixed_point_multipliers(double b) {
    if (1.0 - 4.0 * b < 0.0) throw Error(Errc::no_real_fixed_points, "b > 1/4");
    const double r = std::sqrt(1.0 - 4.0 * b);
    return {1.0 + r, 1.0 - r};
}

struct DiagramRow {
    double b = 0.0;
    bool diverged = false;
    std::vector<double> xs;
};

struct DiagramDataset {
    std::vector<DiagramRow> rows;
};

struct DiagramOptions {
    Point3 p0{0.0, -0.5, 0.0};
    std::size_t transient = 1000;
    std::size_t samples = 200;
    double escape_radius = kDefaultEscapeRadius;
    unsigned threads = 0;
};

inline DiagramRow diagram_row(double b, const DiagramOptions& opt) {
    DiagramRow row;
    row.b = b;
    try {
        const auto pts = orbit(opt.p0, Params(b), opt.samples, opt.transient, opt.escape_radius);
        row.xs.reserve(pts.size());
        for (const auto& p : pts) row.xs.push_back(p.x);
    } catch (const DivergedError&) {
        row.diverged = true;
    }
    return row;
}

/// x-coordinates of the post-transient orbit of p0 for each b on the grid.
inline DiagramDataset bifurcation_diagram(Bracket b_range, int steps, const DiagramOptions& opt = {}) {
    if (steps < 2) throw Error(Errc::invalid_argument, "diagram needs at least 2 steps");
    if (opt.samples < 1) throw Error(Errc::invalid_argument, "diagram needs at least 1 sample");
    DiagramDataset out;
    out.rows.resize(static_cast<std::size_t>(steps));
    parallel_for(static_cast<std::size_t>(steps), opt.threads, [&](std::size_t k) {
        const double b = k + 1 == static_cast<std::size_t>(steps)
                             ? b_range.hi
                             : b_range.lo + (b_range.hi - b_range.lo) * static_cast<double>(k) / (steps - 1);
        out.rows[k] = diagram_row(b, opt);
    });
    return out;
}

/// Number of clusters after sorting, splitting wherever consecutive values
/// differ by more than `gap`.
inline std::size_t distinct_count(std::vector<double> values, double gap = 1e-6) {
    if (values.empty()) return 0;
    std::sort(values.begin(), values.end());
    std::size_t count = 1;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] - values[i - 1] > gap) ++count;
    return count;
}

} // namespace sdmap
