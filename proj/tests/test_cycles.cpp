#include <sdmap/cycles.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

using namespace sdmap;

namespace {

using oracle::brute_force_orbits;
using oracle::grid_oracle_roots;
using oracle::same_points;

void expect_same_orbit_sets(const std::vector<Cycle3D>& lifted, const std::vector<std::vector<Point3>>& oracle) {
    ASSERT_EQ(lifted.size(), oracle.size());
    for (const auto& c : lifted) {
        const auto hits = std::count_if(oracle.begin(), oracle.end(),
                                        [&](const std::vector<Point3>& o) { return same_points(c.points, o); });
        EXPECT_EQ(hits, 1) << "lifted cycle of period " << c.period << " not matched by the oracle";
    }
}

void expect_valid_cycle(const Cycle3D& c, const Params& params) {
    ASSERT_EQ(static_cast<int>(c.points.size()), c.period);
    for (int k = 0; k < c.period; ++k) {
        const Point3 img = apply_T(c.points[static_cast<std::size_t>(k)], params);
        EXPECT_LE(sup_distance(img, c.points[static_cast<std::size_t>((k + 1) % c.period)]), 1e-10);
    }
    for (int d = 1; d < c.period; ++d)
        if (c.period % d == 0) {
            EXPECT_GT(sup_distance(c.points[static_cast<std::size_t>(d)], c.points[0]), 1e-9);
        }
}

void expect_pairwise_distinct(const std::vector<Cycle3D>& cs) {
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j) EXPECT_FALSE(same_points(cs[i].points, cs[j].points));
}

bool on_some_cycle(const std::vector<Cycle3D>& cs, const Point3& p) {
    return std::any_of(cs.begin(), cs.end(), [&](const Cycle3D& c) { return contains_point(c, p, 1e-9); });
}

const Cycle1D& only(const std::vector<Cycle1D>& v) {
    EXPECT_EQ(v.size(), 1u);
    return v.front();
}

// Fixed points of H at b as Cycle1D values (x1 the larger).
std::pair<Cycle1D, Cycle1D> fixed_cycles(double b) {
    const auto f = find_cycles_1d(Params(b), 1);
    EXPECT_EQ(f.size(), 2u);
    return {f[1], f[0]};
}

} // namespace

TEST(FixedPoints, ClosedFormAndStability) {
    const auto at0 = fixed_points_T(Params(0));
    EXPECT_EQ(at0[0].points[0], (Point3{1, 1, 1}));
    EXPECT_EQ(at0[1].points[0], (Point3{0, 0, 0}));
    EXPECT_EQ(at0[0].stability, Stability::unstable);
    EXPECT_EQ(at0[1].stability, Stability::stable);

    const auto quarter = fixed_points_T(Params(0.25));
    EXPECT_EQ(quarter[0].points[0], (Point3{0.5, 0.5, 0.5}));
    EXPECT_EQ(quarter[1].points[0], (Point3{0.5, 0.5, 0.5}));
    EXPECT_EQ(quarter[0].stability, Stability::nonhyperbolic);

    const auto f = fixed_points_T(Params(-0.4));
    const double x2 = 0.5 - 0.5 * std::sqrt(1.0 + 1.6);
    EXPECT_EQ(f[1].stability, Stability::stable);
    for (double e : f[1].eigenvalues) EXPECT_NEAR(e, 2.0 * x2, 1e-12);
}

TEST(FixedPoints, NoRealFixedPointsAboveQuarter) {
    try {
        fixed_points_T(Params(0.3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::no_real_fixed_points);
    }
}

TEST(Cycles1D, PeriodTwoExamples) {
    const auto c = only(find_cycles_1d(Params(-1), 2));
    EXPECT_EQ(c.points, (std::vector<double>{-1.0, 0.0}));
    EXPECT_EQ(c.multiplier, 0.0);
    EXPECT_TRUE(find_cycles_1d(Params(-0.5), 2).empty());
}

TEST(Cycles1D, PeriodTwoMatchesClosedForm) {
    for (double b : {-0.8, -1.0, -1.2, -1.5, -1.9}) {
        const auto c = only(find_cycles_1d(Params(b), 2));
        const double r = std::sqrt(-3.0 - 4.0 * b);
        EXPECT_NEAR(c.points[0], -0.5 - 0.5 * r, 1e-12);
        EXPECT_NEAR(c.points[1], -0.5 + 0.5 * r, 1e-12);
        EXPECT_NEAR(c.multiplier, 4.0 * (b + 1.0), 1e-12);
    }
}

TEST(Cycles1D, PeriodFourAtMinusOnePointThree) {
    const auto c = only(find_cycles_1d(Params(-1.3), 4));
    // Frozen from a 40-digit evaluation.
    const std::vector<double> expected{-1.2996224637398613, 0.38901854825726710, -1.1486645691118084,
                                       0.019430292332816347};
    ASSERT_EQ(c.points.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(c.points[i], expected[i], 1e-12);
    EXPECT_NEAR(c.multiplier, 0.18054275318673077, 1e-11);
    EXPECT_LT(std::abs(c.multiplier), 1.0);

    // Grid oracle: H^4(x) = x has 8 real roots; the four outside H^2(x) = x form the cycle.
    const auto roots = grid_oracle_roots(-1.3, 4);
    ASSERT_EQ(roots.size(), 8u);
    std::vector<double> period4;
    for (double r : roots) {
        const double h2 = std::pow(r * r - 1.3, 2) - 1.3;
        if (std::abs(h2 - r) > 1e-6) period4.push_back(r);
    }
    ASSERT_EQ(period4.size(), 4u);
    auto sorted = c.points;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(sorted[i], period4[i], 1e-10);
}

TEST(Cycles1D, CountsAgreeWithGridOracle) {
    // Number of period-n cycles: (#roots of H^n - x minus roots of lower periods) / n.
    for (double b : {-1.0, -1.3, -1.8, -1.95}) {
        for (int n = 1; n <= 6; ++n) {
            const auto roots = grid_oracle_roots(b, n);
            std::size_t lower = 0;
            for (int d = 1; d < n; ++d)
                if (n % d == 0) lower += static_cast<std::size_t>(d) * find_cycles_1d(Params(b), d).size();
            const auto found = find_cycles_1d(Params(b), n);
            EXPECT_EQ(found.size() * static_cast<std::size_t>(n), roots.size() - lower) << "b=" << b << " n=" << n;
        }
    }
}

TEST(Cycles1D, OrbitInvariants) {
    for (double b : {-1.3, -1.8, -1.95}) {
        const Params params(b);
        for (int n = 1; n <= 7; ++n) {
            for (const auto& c : find_cycles_1d(params, n)) {
                ASSERT_EQ(static_cast<int>(c.points.size()), n);
                EXPECT_EQ(c.points.front(), *std::min_element(c.points.begin(), c.points.end()));
                for (int i = 0; i < n; ++i)
                    EXPECT_LT(std::abs(h1d(c.points[static_cast<std::size_t>(i)], params) -
                                       c.points[static_cast<std::size_t>((i + 1) % n)]),
                              1e-10);
                for (int d = 1; d < n; ++d)
                    if (n % d == 0) {
                        EXPECT_GT(std::abs(h1d_n(c.points[0], params, d) - c.points[0]), 1e-8);
                    }
            }
        }
    }
}

TEST(Cycles1D, Errors) {
    EXPECT_THROW(find_cycles_1d(Params(-1), 0), Error);
    CycleSearchOptions bad;
    bad.interval = {1.0, -1.0};
    EXPECT_THROW(find_cycles_1d(Params(-1), 2, bad), Error);
}

TEST(Cycles1D, DegenerateNearFold) {
    const auto cs = find_cycles_1d(Params(-1.75 - 1e-15), 3);
    ASSERT_EQ(cs.size(), 2u);
    EXPECT_TRUE(cs[0].degenerate);
    EXPECT_TRUE(cs[1].degenerate);
    for (const auto& c : find_cycles_1d(Params(-1.8), 3)) EXPECT_FALSE(c.degenerate);
}

TEST(Conjugates, Examples) {
    const auto [x1, x2] = fixed_cycles(-1.0);
    const auto t = conjugate_of(x1);
    EXPECT_EQ(t.Y.points, x1.points);
    EXPECT_EQ(t.Z.points, x1.points);

    const auto c2 = only(find_cycles_1d(Params(-1), 2));
    const auto t2 = conjugate_of(c2);
    EXPECT_EQ(t2.Y.points, (std::vector<double>{0.0, -1.0}));
    EXPECT_EQ(t2.Z.points, (std::vector<double>{0.0, -1.0}));
}

TEST(Conjugates, MultipliersAreEqual) {
    for (double b : {-1.3, -1.8, -1.95})
        for (int n = 1; n <= 6; ++n)
            for (const auto& c : find_cycles_1d(Params(b), n)) {
                const auto t = conjugate_of(c);
                // Same factors in a rotated order.
                const double tol = 1e-12 * std::max(1.0, std::abs(c.multiplier));
                EXPECT_EQ(t.X.multiplier, c.multiplier);
                EXPECT_NEAR(t.Y.multiplier, c.multiplier, tol);
                EXPECT_NEAR(t.Z.multiplier, c.multiplier, tol);
            }
}

TEST(LiftHomogeneous, PeriodTwo) {
    const double b = -1.1;
    const Params params(b);
    const auto c2 = only(find_cycles_1d(params, 2));
    const auto cyc = lift_homogeneous(c2);
    const double r = std::sqrt(-3.0 - 4.0 * b);
    const double v1 = -0.5 + 0.5 * r;
    const double v2 = -0.5 - 0.5 * r;
    EXPECT_EQ(cyc.period, 2);
    EXPECT_TRUE(contains_point(cyc, {v1, v2, v1}, 1e-12));
    EXPECT_TRUE(contains_point(cyc, {v2, v1, v2}, 1e-12));
    EXPECT_EQ(cyc.provenance.kind, CycleKind::homogeneous);
    for (double e : cyc.eigenvalues) EXPECT_NEAR(e, 4.0 * (b + 1.0), 1e-12);
    EXPECT_EQ(cyc.stability, Stability::stable);
}

TEST(LiftHomogeneous, PeriodFourAndFiveUseDocumentedSeeds) {
    const auto c4 = only(find_cycles_1d(Params(-1.3), 4));
    const auto& a = c4.points;
    const auto l4 = lift_homogeneous(c4);
    EXPECT_EQ(l4.period, 4);
    EXPECT_TRUE(contains_point(l4, {a[0], a[3], a[2]}));
    expect_valid_cycle(l4, Params(-1.3));

    const Params p5(-1.9);
    const auto c5s = find_cycles_1d(p5, 5);
    ASSERT_FALSE(c5s.empty());
    for (const auto& c5 : c5s) {
        const auto& q = c5.points;
        const auto l5 = lift_homogeneous(c5);
        EXPECT_EQ(l5.period, 5);
        EXPECT_TRUE(contains_point(l5, {q[0], q[2], q[4]}));
        expect_valid_cycle(l5, p5);
    }
}

TEST(LiftHomogeneous, EigenvaluesEqualOneDimensionalMultiplier) {
    for (double b : {-1.3, -1.8, -1.95})
        for (int n : {1, 2, 4, 5, 7})
            for (const auto& c : find_cycles_1d(Params(b), n)) {
                const auto lifted = lift_homogeneous(c);
                for (double e : lifted.eigenvalues)
                    EXPECT_NEAR(e, c.multiplier, 1e-9 * std::max(1.0, std::abs(c.multiplier)));
            }
}

TEST(LiftHomogeneous, Errors) {
    const auto c3 = find_cycles_1d(Params(-1.8), 3).front();
    try {
        lift_homogeneous(c3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::period_divisible_by_3);
    }
    Cycle1D bogus;
    bogus.period = 2;
    bogus.points = {0.3, 0.7};
    bogus.b = -1.0;
    try {
        lift_homogeneous(bogus);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::lift_validation_failed);
    }
}

TEST(LiftHomogeneous3n, PeriodTwoGivesOneStableSixCycle) {
    const Params params(-1.0);
    const auto c2 = only(find_cycles_1d(params, 2));
    const auto cs = lift_homogeneous_3n(c2);
    ASSERT_EQ(cs.size(), 1u);
    EXPECT_EQ(cs[0].period, 6);
    expect_valid_cycle(cs[0], params);
    EXPECT_EQ(cs[0].stability, Stability::stable);
    // Seed (a1, a1, a2) with a1, a2 the two points of the 2-cycle.
    EXPECT_TRUE(contains_point(cs[0], {c2.points[0], c2.points[0], c2.points[1]}) ||
                contains_point(cs[0], {c2.points[1], c2.points[1], c2.points[0]}));
}

TEST(LiftHomogeneous3n, PeriodFourMatchesEnumeration) {
    const Params params(-1.3);
    const auto c4 = only(find_cycles_1d(params, 4));
    const auto cs = lift_homogeneous_3n(c4);
    for (const auto& c : cs) {
        EXPECT_EQ(c.period, 12);
        expect_valid_cycle(c, params);
    }
    expect_pairwise_distinct(cs);
    auto oracle = brute_force_orbits({c4}, -1.3);
    std::erase_if(oracle, [](const std::vector<Point3>& o) { return o.size() != 12; });
    EXPECT_EQ(oracle.size(), 5u);
    expect_same_orbit_sets(cs, oracle);
}

TEST(LiftHomogeneous3n, CountIsNSquaredMinusOneOverThree) {
    for (double b : {-1.3, -1.8, -1.95})
        for (int n : {2, 4, 5})
            for (const auto& c : find_cycles_1d(Params(b), n)) {
                const auto cs = lift_homogeneous_3n(c);
                EXPECT_EQ(cs.size(), static_cast<std::size_t>((n * n - 1) / 3)) << "b=" << b << " n=" << n;
            }
}

TEST(LiftHomogeneous3n, RejectsFixedPoint) {
    const auto [x1, x2] = fixed_cycles(-1.0);
    EXPECT_THROW(lift_homogeneous_3n(x1), Error);
}

TEST(LiftMixedPair, FixedPointsGiveTwoThreeCycles) {
    const auto [x1, x2] = fixed_cycles(-1.0);
    const auto cs = lift_mixed_pair(x1, x2);
    ASSERT_EQ(cs.size(), 2u);
    const double a = x1.points[0], c = x2.points[0];
    EXPECT_TRUE(on_some_cycle(cs, {c, a, c}));
    EXPECT_TRUE(on_some_cycle(cs, {c, a, a}));
    for (const auto& cy : cs) {
        EXPECT_EQ(cy.period, 3);
        EXPECT_EQ(cy.provenance.kind, CycleKind::mixed);
        EXPECT_EQ(cy.provenance.sources.size(), 2u);
    }
    // (x2, x1, x2) and (x2, x2, x1) lie on one orbit.
    const auto with = std::find_if(cs.begin(), cs.end(), [&](const Cycle3D& cy) { return contains_point(cy, {c, a, c}); });
    ASSERT_NE(with, cs.end());
    EXPECT_TRUE(contains_point(*with, {c, c, a}));
}

TEST(LiftMixedPair, FixedPointWithTwoCycle) {
    const auto [x1, x2] = fixed_cycles(-1.0);
    const auto c2 = only(find_cycles_1d(Params(-1), 2));
    const double al1 = 0.0, al2 = -1.0;  // the 2-cycle {V1x, V2x} at b = -1
    const auto with_x1 = lift_mixed_pair(x1, c2);
    ASSERT_EQ(with_x1.size(), 3u);
    const double a = x1.points[0];
    EXPECT_TRUE(on_some_cycle(with_x1, {al1, a, al1}));
    EXPECT_TRUE(on_some_cycle(with_x1, {al1, a, al2}));
    EXPECT_TRUE(on_some_cycle(with_x1, {al1, a, a}));
    EXPECT_EQ(lift_mixed_pair(x2, c2).size(), 3u);
}

TEST(LiftMixedPair, Errors) {
    const auto [x1, x2] = fixed_cycles(-1.0);
    EXPECT_THROW(lift_mixed_pair(x1, x1), Error);
    Cycle1D bogus;
    bogus.period = 2;
    bogus.points = {0.3, 0.7};
    bogus.b = -1.0;
    try {
        lift_mixed_pair(x1, bogus);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::count_mismatch);
    }
}

TEST(LiftMixedTriple, TwoSixCycles) {
    const auto [x1, x2] = fixed_cycles(-1.0);
    const auto c2 = only(find_cycles_1d(Params(-1), 2));
    const auto cs = lift_mixed_triple(x1, x2, c2);
    ASSERT_EQ(cs.size(), 2u);
    const double al1 = 0.0;
    EXPECT_TRUE(on_some_cycle(cs, {al1, x2.points[0], x1.points[0]}));
    EXPECT_TRUE(on_some_cycle(cs, {al1, x1.points[0], x2.points[0]}));
    for (const auto& c : cs) {
        // Re-iterating 3S steps returns to the seed.
        const Point3 back = apply_T_n(c.provenance.seed, Params(-1), 6);
        EXPECT_LE(sup_distance(back, c.provenance.seed), 1e-9);
    }
}

TEST(LiftMixedTriple, Errors) {
    const auto [x1, x2] = fixed_cycles(-1.0);
    const auto c2 = only(find_cycles_1d(Params(-1), 2));
    EXPECT_THROW(lift_mixed_triple(x1, x1, c2), Error);
}

TEST(CountFormulas, PairsAndTriplesMatchEnumeration) {
    struct Family {
        double b;
        std::vector<int> periods;
    };
    for (const Family& fam : {Family{-1.0, {1, 2}}, Family{-1.3, {1, 2, 4}}, Family{-1.8, {1, 2, 3}}}) {
        const Params params(fam.b);
        std::vector<Cycle1D> pool;
        for (int n : fam.periods)
            for (auto& c : find_cycles_1d(params, n)) pool.push_back(c);
        for (std::size_t i = 0; i < pool.size(); ++i)
            for (std::size_t j = i + 1; j < pool.size(); ++j) {
                const int n = pool[i].period, m = pool[j].period;
                const int s = std::lcm(n, m);
                const auto cs = lift_mixed_pair(pool[i], pool[j]);
                EXPECT_EQ(cs.size(), static_cast<std::size_t>((n + m) * n * m / s));
                for (const auto& c : cs) {
                    EXPECT_EQ(c.period, 3 * s);
                    expect_valid_cycle(c, params);
                }
                expect_same_orbit_sets(cs, brute_force_orbits({pool[i], pool[j]}, fam.b));
            }
        for (std::size_t i = 0; i < pool.size(); ++i)
            for (std::size_t j = i + 1; j < pool.size(); ++j)
                for (std::size_t k = j + 1; k < pool.size(); ++k) {
                    const int n = pool[i].period, m = pool[j].period, p = pool[k].period;
                    const int S = std::lcm(std::lcm(n, m), p);
                    const auto cs = lift_mixed_triple(pool[i], pool[j], pool[k]);
                    EXPECT_EQ(cs.size(), static_cast<std::size_t>(2 * n * m * p / S));
                    for (const auto& c : cs) {
                        EXPECT_EQ(c.period, 3 * S);
                        expect_valid_cycle(c, params);
                    }
                    expect_same_orbit_sets(cs, brute_force_orbits({pool[i], pool[j], pool[k]}, fam.b));
                }
    }
}

TEST(Census, NinePeriodSixCyclesAtMinusOne) {
    const auto c = census(Params(-1.0), 6);
    EXPECT_EQ(c.homogeneous.size(), 1u);
    EXPECT_EQ(c.mixed.size(), 8u);
    EXPECT_EQ(c.total(), 9u);

    // Period-6 points have coordinates among the points of period 1 or 2.
    const auto [x1, x2] = fixed_cycles(-1.0);
    const auto c2 = only(find_cycles_1d(Params(-1), 2));
    std::vector<double> vals{x1.points[0], x2.points[0], c2.points[0], c2.points[1]};
    std::map<int, int> by_period;
    std::vector<std::vector<Point3>> six;
    std::set<std::array<int, 3>> seen;
    const auto idx_of = [&](double v) {
        int best = 0;
        for (int i = 1; i < 4; ++i)
            if (std::abs(vals[static_cast<std::size_t>(i)] - v) < std::abs(vals[static_cast<std::size_t>(best)] - v))
                best = i;
        return best;
    };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                std::array<int, 3> s{i, j, k};
                if (seen.count(s)) continue;
                std::vector<Point3> orb;
                auto cur = s;
                do {
                    seen.insert(cur);
                    orb.push_back({vals[static_cast<std::size_t>(cur[0])], vals[static_cast<std::size_t>(cur[1])],
                                   vals[static_cast<std::size_t>(cur[2])]});
                    const double v = vals[static_cast<std::size_t>(cur[0])];
                    cur = {cur[1], cur[2], idx_of(v * v - 1.0)};
                } while (cur != s);
                by_period[static_cast<int>(orb.size())] += static_cast<int>(orb.size());
                if (orb.size() == 6) six.push_back(orb);
            }
    EXPECT_EQ(by_period[1], 2);
    EXPECT_EQ(by_period[2], 2);
    EXPECT_EQ(by_period[3], 6);
    EXPECT_EQ(by_period[6], 54);
    std::vector<Cycle3D> all = c.homogeneous;
    all.insert(all.end(), c.mixed.begin(), c.mixed.end());
    expect_same_orbit_sets(all, six);
}

TEST(Stability, ModulusRule) {
    EXPECT_EQ(stability_from_moduli({0.5, 0.2, 0.9}), Stability::stable);
    EXPECT_EQ(stability_from_moduli({0.5, 1.2, 0.9}), Stability::unstable);
    EXPECT_EQ(stability_from_moduli({0.5, 1.0 + 1e-12, 3.0}), Stability::nonhyperbolic);
}

TEST(Stability, TwoCycleMultiplierFromJacobianProduct) {
    for (double b : {-0.8, -1.0, -1.2, -1.3}) {
        const auto c2 = only(find_cycles_1d(Params(b), 2));
        const auto lifted = lift_homogeneous(c2);
        const auto rep = classify_stability(lifted);
        for (double e : rep.eigenvalues) EXPECT_NEAR(e, 4.0 * (b + 1.0), 1e-12);
        EXPECT_EQ(rep.stability, std::abs(4.0 * (b + 1.0)) < 1.0 ? Stability::stable : Stability::unstable);
    }
}

TEST(Eigenvalues, GeneralMatrixUsesCubic) {
    // Companion matrix of (t - 1)(t - 2)(t - 3).
    const Mat3 m{{0, 1, 0, 0, 0, 1, 6, -11, 6}};
    auto ev = eigenvalues(m);
    std::vector<double> re;
    for (const auto& e : ev) {
        EXPECT_NEAR(e.imag(), 0.0, 1e-9);
        re.push_back(e.real());
    }
    std::sort(re.begin(), re.end());
    EXPECT_NEAR(re[0], 1.0, 1e-9);
    EXPECT_NEAR(re[1], 2.0, 1e-9);
    EXPECT_NEAR(re[2], 3.0, 1e-9);
    // One step of T at x: eigenvalues are the cube roots of 2x.
    const auto j = eigenvalues(jacobian_T({4.0, 0, 0}));
    for (const auto& e : j) EXPECT_NEAR(std::abs(e), 2.0, 1e-12);
}
