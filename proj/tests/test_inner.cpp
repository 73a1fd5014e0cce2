#include "isac/channel.hpp"
#include "isac/errors.hpp"
#include "isac/inner.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace isac {
namespace {

void expect_same_polygon(const RatePolygon& a, const RatePolygon& b, double tol) {
    EXPECT_NEAR(a.r1, b.r1, tol);
    EXPECT_NEAR(a.r2, b.r2, tol);
    EXPECT_NEAR(a.sum_bound(), b.sum_bound(), tol);
    EXPECT_EQ(a.feasible, b.feasible);
}

FamilyParams random_params(testing::Rng& g, double pe_max) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {u(g), u(g), u(g), u(g), u(g), pe_max * u(g)};
}

TEST(InnerKind, ParsesAndPrints) {
    for (auto k : {InnerKind::Our, InnerKind::OurCom, InnerKind::Awk, InnerKind::Kobayashi})
        EXPECT_EQ(parse_inner_kind(to_string(k)), k);
    EXPECT_THROW(parse_inner_kind("outer"), UsageError);
}

TEST(EvalOur, Example1CertifiesFullRateForUser2) {
    const IsacChannel ch = build_example(1);
    const InnerResult r = eval_inner_our(ch, family_scheme(ch, 1, InnerKind::Our, {0.0, 0.0, 0.0, 0.5, 0.5, 0.0}));
    EXPECT_TRUE(r.polygon.feasible);
    EXPECT_TRUE(r.polygon.contains(0.0, 1.0));
    EXPECT_NEAR(r.d1, 0.0, 1e-12);
    EXPECT_NEAR(r.d2, 0.0, 1e-12);
}

TEST(EvalOur, Example2CommonCompressionReachesOrigin) {
    const IsacChannel ch = build_example(2);
    const InnerResult r =
        eval_inner_our(ch, family_scheme(ch, 2, InnerKind::OurCom, {0.0, 0.5, 0.0, 0.0, 0.5, 0.0}));
    EXPECT_TRUE(r.polygon.feasible);
    EXPECT_TRUE(r.polygon.contains(0.0, 0.0));
    EXPECT_NEAR(r.d1, 0.0, 1e-12);
    EXPECT_NEAR(r.d2, 0.0, 1e-12);
}

TEST(EvalOur, DeterministicInputsGiveZeroRatesAndConstantEstimates) {
    const IsacChannel ch = build_example(3);
    const InnerResult r = eval_inner_our(ch, xor_input_scheme(0.0, 0.0, 0.0, 0.0, 0.0));
    EXPECT_TRUE(r.polygon.feasible);
    EXPECT_NEAR(r.polygon.r1, 0.0, 1e-12);
    EXPECT_NEAR(r.polygon.r2, 0.0, 1e-12);
    EXPECT_NEAR(r.d1, 0.11, 1e-12);
    EXPECT_NEAR(r.d2, 0.11, 1e-12);
}

TEST(EvalOur, ResultsAreReproducible) {
    const IsacChannel ch = build_example(4);
    const AuxScheme s = family_scheme(ch, 4, InnerKind::Our, {0.2, 0.1, 0.3, 0.4, 0.6, 0.05});
    const InnerResult a = eval_inner_our(ch, s);
    const InnerResult b = eval_inner_our(ch, s);
    EXPECT_EQ(a.polygon.r1, b.polygon.r1);
    EXPECT_EQ(a.polygon.r2, b.polygon.r2);
    EXPECT_EQ(a.polygon.sum12, b.polygon.sum12);
    EXPECT_EQ(a.d2, b.d2);
}

TEST(EvalOur, AlphabetMismatchThrows) {
    const IsacChannel ch = build_example(3);
    AuxScheme s = xor_input_scheme(0.5, 0.5, 0.5, 0.5, 0.5);
    s.p_x1 = CondKernel({{"U", 2}, {"U1", 2}}, {{"X1", 3}}, Eigen::ArrayXd::Constant(12, 1.0 / 3.0));
    EXPECT_THROW(eval_inner_our(ch, s), SchemaError);
}

TEST(Family, Example3IsUnsupported) {
    const IsacChannel ch = build_example(3);
    EXPECT_THROW(family_scheme(ch, 3, InnerKind::Our, {}), UsageError);
}

TEST(Kobayashi, SingletonCompressionsCollapseBothRegions) {
    testing::Rng g(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int n : {1, 2, 4}) {
        const IsacChannel ch = build_example(n);
        for (int trial = 0; trial < 15; ++trial) {
            const AuxScheme s = xor_input_scheme(u(g), u(g), u(g), u(g), u(g));
            const InnerResult our = eval_inner_our(ch, s);
            const InnerResult kob = eval_inner_kobayashi(ch, s);
            expect_same_polygon(our.polygon, kob.polygon, 1e-12);
            EXPECT_NEAR(our.d1, kob.d1, 1e-12);
            EXPECT_NEAR(our.d2, kob.d2, 1e-12);
            EXPECT_EQ(eval_inner(InnerKind::Kobayashi, ch, s).polygon.r1, kob.polygon.r1);
        }
    }
}

TEST(Inclusion, AwkSchemesMapIntoCommonOnlyRegion) {
    const IsacChannel ch = build_example(4);
    testing::Rng g(42);
    int feasible = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const AuxScheme awk = family_scheme(ch, 4, InnerKind::Awk, random_params(g, 0.3));
        const InnerResult a = eval_inner_awk(ch, awk);
        if (!a.polygon.feasible) continue;
        ++feasible;
        const InnerResult o = eval_inner_our(ch, awk_to_our_com(awk));
        EXPECT_TRUE(o.polygon.feasible);
        EXPECT_TRUE(polygon_contains(o.polygon, a.polygon, 1e-9));
        EXPECT_NEAR(o.d1, a.d1, 1e-12);
        EXPECT_NEAR(o.d2, a.d2, 1e-12);
    }
    EXPECT_GT(feasible, 5);
}

TEST(Inclusion, MappingRequiresAwkOutputs) {
    EXPECT_THROW(awk_to_our_com(xor_input_scheme(0.5, 0.5, 0.5, 0.5, 0.5)), Error);
}

TEST(Polygon, ContainmentAndEffectiveBounds) {
    RatePolygon p;
    p.r1 = 1.0;
    p.r2 = 0.8;
    p.sum12 = {1.5, 1.2};
    EXPECT_DOUBLE_EQ(p.sum_bound(), 1.2);
    EXPECT_DOUBLE_EQ(p.r1_eff(), 1.0);
    EXPECT_TRUE(p.contains(0.6, 0.6));
    EXPECT_FALSE(p.contains(0.6, 0.7));
    EXPECT_FALSE(p.contains(-0.1, 0.0));
    RatePolygon q = p;
    q.r2 = 0.5;
    EXPECT_TRUE(polygon_contains(p, q));
    EXPECT_FALSE(polygon_contains(q, p));
}

bool dominates(const RegionPoint& a, const RegionPoint& b) {
    const bool ge = a.R1 >= b.R1 && a.R2 >= b.R2 && a.D1 <= b.D1 && a.D2 <= b.D2;
    const bool gt = a.R1 > b.R1 || a.R2 > b.R2 || a.D1 < b.D1 || a.D2 < b.D2;
    return ge && gt;
}

TEST(Pareto, TrivialCases) {
    const RegionPoint a{0.5, 0.1, 0.2, 0.2, "a", {}};
    EXPECT_EQ(pareto_frontier({a}).size(), 1u);
    RegionPoint b = a;
    b.R1 = 0.4;
    b.scheme_id = "b";
    const auto f = pareto_frontier({b, a});
    ASSERT_EQ(f.size(), 1u);
    EXPECT_EQ(f[0].scheme_id, "a");
}

TEST(Pareto, MatchesQuadraticOracle) {
    testing::Rng g(43);
    std::uniform_int_distribution<int> v(0, 6);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<RegionPoint> pts;
        for (int i = 0; i < 150; ++i) pts.push_back({0.1 * v(g), 0.1 * v(g), 0.1 * v(g), 0.1 * v(g), "", {}});
        const auto f = pareto_frontier(pts);
        std::vector<RegionPoint> oracle;
        for (const auto& p : pts) {
            bool dom = false;
            for (const auto& q : pts) dom = dom || dominates(q, p);
            const bool dup = std::any_of(oracle.begin(), oracle.end(), [&](const RegionPoint& o) {
                return o.R1 == p.R1 && o.R2 == p.R2 && o.D1 == p.D1 && o.D2 == p.D2;
            });
            if (!dom && !dup) oracle.push_back(p);
        }
        ASSERT_EQ(f.size(), oracle.size());
        for (const auto& p : f)
            for (const auto& q : pts) EXPECT_FALSE(dominates(q, p));
    }
}

TEST(Pareto, ProjectionIgnoresUnselectedAxes) {
    const RegionPoint a{0.6, 0.0, 0.9, 0.2, "a", {}};
    const RegionPoint b{0.5, 0.9, 0.0, 0.2, "b", {}};
    EXPECT_EQ(pareto_frontier({a, b}, Objective::all()).size(), 2u);
    EXPECT_EQ(pareto_frontier({a, b}, Objective::r1_d2()).size(), 1u);
}

TEST(SortPoints, CanonicalOrder) {
    std::vector<RegionPoint> pts = {{0.1, 0.0, 0.0, 0.2, "", {}}, {0.3, 0.0, 0.0, 0.1, "", {}},
                                    {0.5, 0.0, 0.0, 0.1, "", {}}};
    sort_points(pts);
    EXPECT_EQ(pts[0].R1, 0.5);
    EXPECT_EQ(pts[1].R1, 0.3);
    EXPECT_EQ(pts[2].D2, 0.2);
}

TEST(Sweep, CoarseExample4GridIsFeasibleAndParallelSafe) {
    SweepGrid grid;
    grid.axis_points = 3;
    grid.pe_points = 4;
    grid.zoom = false;
    grid.threads = 1;
    SweepStats one;
    auto a = sweep_example4(InnerKind::OurCom, grid, {}, &one);
    grid.threads = 3;
    SweepStats three;
    auto b = sweep_example4(InnerKind::OurCom, grid, {}, &three);
    EXPECT_EQ(one.evaluations, three.evaluations);
    EXPECT_EQ(one.feasible, three.feasible);
    ASSERT_EQ(a.size(), b.size());
    sort_points(a);
    sort_points(b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].R1, b[i].R1);
        EXPECT_EQ(a[i].D2, b[i].D2);
    }
    EXPECT_GT(one.feasible, 0);
    for (const auto& p : a) {
        EXPECT_GE(p.R1, 0.0);
        EXPECT_GE(p.D2, 0.0);
    }
}

}  // namespace
}  // namespace isac
