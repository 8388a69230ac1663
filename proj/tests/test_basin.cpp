#include <sdmap/basin.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

using namespace sdmap;

namespace {

SliceSpec small_slice(int res, double half = 2.5) {
    SliceSpec s;
    s.u = {Axis::x, -half, half, res};
    s.v = {Axis::y, -half, half, res};
    return s;
}

} // namespace

TEST(Catalog, FixedPointAtMinusPointFour) {
    const Params params(-0.4);
    const auto cat = build_catalog(params, {{0.0, -0.5, 0.0}});
    ASSERT_EQ(cat.size(), 1u);
    EXPECT_EQ(cat[0].kind, AttractorKind::fixed_point);
    EXPECT_EQ(cat[0].period, 1);
    const double x2 = 0.5 - 0.5 * std::sqrt(1.0 + 1.6);
    ASSERT_EQ(cat[0].signature.size(), 1u);
    EXPECT_NEAR(cat[0].signature[0].x, x2, 1e-9);
    EXPECT_NEAR(cat[0].signature[0].y, x2, 1e-9);
    EXPECT_NEAR(cat[0].signature[0].z, x2, 1e-9);
}

TEST(Catalog, PeriodSixAtMinusPointEight) {
    const Params params(-0.8);
    const auto cat = build_catalog(params, {{0.0, -0.5, 0.0}});
    ASSERT_EQ(cat.size(), 1u);
    EXPECT_EQ(cat[0].kind, AttractorKind::cycle);
    EXPECT_EQ(cat[0].period, 6);
    // Closed under T.
    const auto& sig = cat[0].signature;
    for (std::size_t k = 0; k < sig.size(); ++k)
        EXPECT_LT(sup_distance(apply_T(sig[k], params), sig[(k + 1) % sig.size()]), 1e-9);
}

TEST(Catalog, ChaoticAtMinusTwo) {
    const Params params(-2);
    const auto cat = build_catalog(params, {{-0.5, 0, 0}, {-0.5, -0.01, 0}, {-0.5, -0.5, 0}});
    ASSERT_GE(cat.size(), 1u);
    for (const auto& a : cat) {
        EXPECT_EQ(a.kind, AttractorKind::chaotic);
        for (const auto& p : a.signature) EXPECT_LE(p.sup_norm(), 2.0 + 1e-12);
    }
}

TEST(Catalog, DivergentSeedsAndErrors) {
    EXPECT_TRUE(build_catalog(Params(-2), {{10, 0, 0}}).empty());
    EXPECT_THROW(build_catalog(Params(-2), {}), Error);
    CatalogOptions bad;
    bad.max_iter = bad.transient;
    EXPECT_THROW(build_catalog(Params(-2), {{0, 0, 0}}, bad), Error);
}

TEST(Classify, Examples) {
    const Params m2(-2);
    const auto cat = build_catalog(m2, default_seeds());
    EXPECT_EQ(classify_point({10, 0, 0}, m2, cat), kDivergent);
    const int label = classify_point({0, -0.5, 0.5}, m2, cat);
    ASSERT_GE(label, 0);
    EXPECT_EQ(cat[static_cast<std::size_t>(label)].kind, AttractorKind::chaotic);

    const Params p4(-0.4);
    const auto cat4 = build_catalog(p4, {{0.0, -0.5, 0.0}});
    const double x2 = 0.5 - 0.5 * std::sqrt(1.0 + 1.6);
    EXPECT_EQ(classify_point({x2, x2, x2}, p4, cat4), cat4[0].id);
}

TEST(Classify, EmptyCatalogIsUndecided) {
    CatalogOptions opt;
    opt.max_iter = 200;
    opt.transient = 100;
    EXPECT_EQ(classify_point({0.1, 0.2, 0.3}, Params(-1.9), {}, opt), kUndecided);
}

TEST(Slice, TwoByTwoAndRender) {
    const Params params(-1.3);
    const auto g = basin_slice(params, small_slice(2, 3.0));
    EXPECT_EQ(g.labels.size(), 4u);
    EXPECT_EQ(g.nu(), 2);
    EXPECT_EQ(g.nv(), 2);

    BasinGrid hand = g;
    hand.labels = {0, 0, 1, kDivergent};
    const Palette pal = default_palette(hand);
    const auto img = render_grid(hand, pal);
    const std::string header = "P6\n2 2\n255\n";
    ASSERT_EQ(img.size(), header.size() + 12);
    EXPECT_TRUE(std::equal(header.begin(), header.end(), img.begin()));
    std::set<std::tuple<int, int, int>> colors;
    for (std::size_t k = header.size(); k < img.size(); k += 3) colors.insert({img[k], img[k + 1], img[k + 2]});
    EXPECT_EQ(colors.size(), 3u);
    EXPECT_EQ(img, render_grid(hand, pal));

    Palette missing = pal;
    missing.erase(1);
    try {
        render_grid(hand, missing);
        FAIL() << "expected palette_missing_label";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::palette_missing_label);
    }
}

TEST(Slice, RenderSizeArithmetic) {
    BasinGrid g;
    g.slice = small_slice(400);
    g.labels.assign(400 * 400, kDivergent);
    const auto img = render_grid(g, default_palette(g));
    EXPECT_EQ(img.size(), std::string("P6\n400 400\n255\n").size() + 3u * 400 * 400);
}

TEST(Slice, TopRowIsHighestV) {
    BasinGrid g;
    g.slice = small_slice(2);
    g.labels = {0, 0, kDivergent, kDivergent};  // j = 1 is divergent
    const auto img = render_grid(g, default_palette(g));
    const std::size_t off = std::string("P6\n2 2\n255\n").size();
    EXPECT_EQ(img[off], 0);
    EXPECT_EQ(img[off + 1], 0);
    EXPECT_EQ(img[off + 2], 0);
}

TEST(Slice, Errors) {
    EXPECT_THROW(basin_slice(Params(-1), small_slice(1)), Error);
    SliceSpec same = small_slice(4);
    same.v.axis = Axis::x;
    EXPECT_THROW(basin_slice(Params(-1), same), Error);
}

TEST(Invariants, DeterministicAcrossThreads) {
    const Params params(-1.864);
    CatalogOptions one;
    one.threads = 1;
    CatalogOptions many;
    many.threads = 4;
    const auto cat = build_catalog(params, default_seeds(), one);
    const auto a = basin_slice(params, small_slice(24), cat, one);
    const auto b = basin_slice(params, small_slice(24), cat, many);
    EXPECT_EQ(a.labels, b.labels);
}

TEST(Invariants, BoundedAndDivergentRegionsAtMinusTwo) {
    const Params params(-2);
    const auto g = basin_slice(params, small_slice(40));
    const auto h = g.histogram();
    EXPECT_TRUE(h.count(kDivergent));
    std::size_t bounded = 0;
    for (const auto& [label, n] : h)
        if (label >= 0) ++bounded;
    EXPECT_GE(bounded, 1u);
}

TEST(Invariants, OpennessProbe) {
    const Params params(-1.864);
    const auto cat = build_catalog(params, default_seeds());
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> coord(-1.8, 1.8);
    std::map<int, int> tally;
    std::vector<Point3> pts;
    std::vector<int> labels;
    while (pts.size() < 400) {
        const Point3 p{coord(rng), coord(rng), 0.5};
        const int l = classify_point(p, params, cat);
        if (l < 0) continue;
        pts.push_back(p);
        labels.push_back(l);
        ++tally[l];
    }
    const int dominant = std::max_element(tally.begin(), tally.end(), [](auto& a, auto& b) {
                             return a.second < b.second;
                         })->first;
    int probed = 0;
    int same = 0;
    for (std::size_t k = 0; k < pts.size() && probed < 100; ++k) {
        if (labels[k] != dominant) continue;
        ++probed;
        const Point3 q{pts[k].x + 1e-9, pts[k].y + 1e-9, pts[k].z};
        if (classify_point(q, params, cat) == dominant) ++same;
    }
    ASSERT_EQ(probed, 100);
    EXPECT_GE(same, 95);
}

TEST(Invariants, CatalogStability) {
    for (double b : {-1.864, -1.3}) {
        const Params params(b);
        const auto seeds = default_seeds();
        const auto cat = build_catalog(params, seeds);
        auto extended = seeds;
        const auto g = basin_slice(params, small_slice(8, 2.0), cat);
        for (int j = 0; j < g.nv(); ++j)
            for (int i = 0; i < g.nu(); ++i)
                if (g.at(i, j) >= 0) extended.push_back(g.slice.point(i, j));
        ASSERT_GT(extended.size(), seeds.size());
        EXPECT_EQ(build_catalog(params, extended).size(), cat.size()) << "b=" << b;
    }
}

TEST(Histogram, ExpectedCoverage) {
    VoxelHistogram h;
    h.half_width = 1.0;
    h.voxel = 1.0;
    h.per_axis = 2;
    h.mass.assign(8, 0.0f);
    h.mass[0] = 0.5f;
    h.mass[7] = 0.5f;
    EXPECT_EQ(h.occupied(), 2u);
    EXPECT_NEAR(h.expected_coverage(1), 0.5, 1e-7);
    EXPECT_NEAR(h.expected_coverage(1000), 1.0, 1e-7);
}

TEST(Slice, DocumentedSliceAtMinusTwo) {
    const auto g = basin_slice(Params(-2), small_slice(400, 2.0));
    EXPECT_EQ(g.labels.size(), 400u * 400u);
    EXPECT_GE(g.histogram().size(), 2u);
    for (int l : g.labels) EXPECT_GE(l, kUndecided);
}

TEST(Slice, CoexistenceAtMinusOnePointEightSixFour) {
    const auto g = basin_slice(Params(-1.864), small_slice(400, 2.0));
    std::size_t bounded = 0;
    for (const auto& [label, n] : g.histogram())
        if (label >= 0) ++bounded;
    EXPECT_GE(bounded, 2u);
}
