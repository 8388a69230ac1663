#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <sdmap/cycles.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

namespace oracle {

using namespace sdmap;

// Independent oracle: roots of H^n(x) - x from sign changes on a fine grid,
// refined by plain bisection.
inline std::vector<double> grid_oracle_roots(double b, int n, int samples = 400001) {
    const auto g = [&](double x) {
        double u = x;
        for (int k = 0; k < n; ++k) u = u * u + b;
        return u - x;
    };
    std::vector<double> roots;
    const double lo = -2.5, hi = 2.5;
    double x0 = lo, g0 = g(lo);
    for (int i = 1; i < samples; ++i) {
        const double x1 = lo + (hi - lo) * i / (samples - 1);
        const double g1 = g(x1);
        if ((g0 < 0) != (g1 < 0)) {
            double a = x0, c = x1, ga = g0;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + c);
                const double gm = g(m);
                if ((gm < 0) == (ga < 0)) {
                    a = m;
                    ga = gm;
                } else {
                    c = m;
                }
            }
            roots.push_back(0.5 * (a + c));
        }
        x0 = x1;
        g0 = g1;
    }
    return roots;
}

struct Labeled {
    double value;
    int cycle;
};

// Independent oracle: every orbit of T whose coordinates are periodic points
// of H drawn from the given cycles and which uses each of them. Coordinates
// are tracked as indices, so no floating-point recurrence test is involved.
inline std::vector<std::vector<Point3>> brute_force_orbits(const std::vector<Cycle1D>& cycles, double b) {
    std::vector<Labeled> vals;
    for (int c = 0; c < static_cast<int>(cycles.size()); ++c)
        for (double v : cycles[static_cast<std::size_t>(c)].points) vals.push_back({v, c});
    const int m = static_cast<int>(vals.size());
    const auto next_index = [&](int i) {
        const double target = vals[static_cast<std::size_t>(i)].value * vals[static_cast<std::size_t>(i)].value + b;
        int best = 0;
        for (int k = 1; k < m; ++k)
            if (std::abs(vals[static_cast<std::size_t>(k)].value - target) <
                std::abs(vals[static_cast<std::size_t>(best)].value - target))
                best = k;
        return best;
    };
    std::set<std::array<int, 3>> seen;
    std::vector<std::vector<Point3>> orbits;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                std::array<int, 3> s{i, j, k};
                if (seen.count(s)) continue;
                std::set<int> used;
                for (int t : s) used.insert(vals[static_cast<std::size_t>(t)].cycle);
                std::vector<std::array<int, 3>> orb;
                auto cur = s;
                do {
                    orb.push_back(cur);
                    seen.insert(cur);
                    cur = {cur[1], cur[2], next_index(cur[0])};
                } while (cur != s);
                if (used.size() != cycles.size()) continue;
                std::vector<Point3> pts;
                for (const auto& t : orb)
                    pts.push_back({vals[static_cast<std::size_t>(t[0])].value, vals[static_cast<std::size_t>(t[1])].value,
                                   vals[static_cast<std::size_t>(t[2])].value});
                orbits.push_back(pts);
            }
    return orbits;
}

inline bool same_points(std::vector<Point3> a, std::vector<Point3> b, double tol = 1e-9) {
    if (a.size() != b.size()) return false;
    std::sort(a.begin(), a.end(), lex_less);
    std::sort(b.begin(), b.end(), lex_less);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sup_distance(a[i], b[i]) > tol) return false;
    return true;
}

} // namespace oracle
