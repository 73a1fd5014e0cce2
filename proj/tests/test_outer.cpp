#include "isac/channel.hpp"
#include "isac/errors.hpp"
#include "isac/estimator.hpp"
#include "isac/outer.hpp"
#include "isac/rd.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

namespace isac {
namespace {

using testing::h2;

TEST(Omega, EndpointsAndIdentity) {
    EXPECT_EQ(composite_omega(0.0), 0.0);
    EXPECT_NEAR(composite_omega(0.5), 0.5, 1e-15);
    EXPECT_NEAR(h2(composite_omega(2 * 0.3 * 0.7)), h2(0.3), 1e-12);
    for (int i = 0; i <= 1000; ++i) {
        const double t = i / 1000.0;
        EXPECT_NEAR(composite_omega(2 * t * (1 - t)), std::min(t, 1 - t), 1e-7);
        EXPECT_NEAR(h2(composite_omega(2 * t * (1 - t))), h2(t), 1e-12);
    }
}

TEST(Omega, DomainViolationsThrow) {
    EXPECT_THROW(composite_omega(-0.01), ArgumentError);
    EXPECT_THROW(composite_omega(1.01), ArgumentError);
}

TEST(ClosedForm, HalfAlphasGiveUnitRates) {
    const ClosedFormBounds b = example4_outer_closed_form({0.25, 0.25, 0.5}, 0.3);
    EXPECT_NEAR(b.r1_max, 1.0, 1e-12);
    EXPECT_NEAR(b.r2_max, 1.0, 1e-12);
    EXPECT_NEAR(b.rsum_max, h2(0.24 + 0.52 * 0.5) + 1 - h2(0.24) - h2(0.05), 1e-12);
    EXPECT_NEAR(b.f, 0.0, 1e-12);
    EXPECT_TRUE(b.feasible());
}

TEST(ClosedForm, FullAlphaLeavesOnlyCooperativeBound) {
    const ClosedFormBounds b = example4_outer_closed_form({0.25, 0.25, 1.0}, 0.1);
    EXPECT_NEAR(b.link_bound, 0.0, 1e-12);
    EXPECT_NEAR(b.cooperative_bound, h2(0.3), 1e-12);
    EXPECT_NEAR(b.sensing_slack, -(h2(0.3) - h2(0.1)), 1e-6);
}

TEST(ClosedForm, ZeroDistortionInfeasibleForEveryAlpha) {
    for (int i = 0; i <= 20; ++i) {
        const double a = i / 20.0;
        const ClosedFormBounds b = example4_outer_closed_form({0.1, 0.1, std::max(a, 0.1)}, 0.0);
        EXPECT_NEAR(b.f, h2(0.3), 1e-12);
        EXPECT_LT(b.link_bound, b.f);
        EXPECT_FALSE(b.feasible());
    }
}

TEST(ClosedForm, SymmetricRateIsMinOfBounds) {
    const ClosedFormBounds b = example4_outer_closed_form({0.1, 0.2, 0.3}, 0.2);
    EXPECT_DOUBLE_EQ(b.symmetric_rate(), std::min({b.r1_max, b.r2_max, b.rsum_max / 2}));
}

TEST(ClosedForm, DomainViolationsThrow) {
    EXPECT_THROW(example4_outer_closed_form({0.3, 0.1, 0.5}, 0.1), ArgumentError);
    EXPECT_THROW(example4_outer_closed_form({0.1, 0.1, 1.5}, 0.1), ArgumentError);
    EXPECT_THROW(example4_outer_closed_form({0.1, 0.1, 0.5}, -0.1), ArgumentError);
}

TEST(ClosedForm, UpperBoundsTheGenericEvaluation) {
    const IsacChannel ch = build_example(4);
    OuterOptions opt;
    opt.parallel_x2 = true;
    testing::Rng g(51);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t nt = 1 + trial % 3;
        std::vector<double> kappa, pi1, pi2;
        for (std::size_t t = 0; t < nt; ++t) {
            kappa.push_back(u(g) + 0.05);
            pi1.push_back(u(g));
            pi2.push_back(u(g));
        }
        double total = 0.0;
        for (double k : kappa) total += k;
        for (double& k : kappa) k /= total;
        const OuterScheme s = binary_product_scheme(kappa, pi1, pi2);
        const AlphaParams a = alpha_of(kappa, pi1, pi2);
        const ClosedFormBounds cf = example4_outer_closed_form(a, 0.1);
        const OuterResult r = eval_outer_our(ch, s, 0.0, 0.1, opt);
        EXPECT_LE(r.polygon.r1, cf.r1_max + 1e-9);
        EXPECT_LE(r.polygon.r2, cf.r2_max + 1e-9);
        EXPECT_LE(r.polygon.sum_bound(), cf.rsum_max + 1e-9);
        EXPECT_LE(r.link[1], cf.link_bound + 1e-9);
        EXPECT_LE(r.cooperative[1], cf.cooperative_bound + 1e-9);
        EXPECT_NEAR(r.f[1], cf.f, 1e-6);
    }
}

TEST(OuterScheme, ValidatesStructure) {
    const IsacChannel ch = build_example(4);
    EXPECT_NO_THROW(binary_product_scheme({0.5, 0.5}, {0.2, 0.7}, {0.5, 0.5}, {0, 0}).validate(ch));
    EXPECT_THROW(binary_product_scheme({0.5, 0.5}, {0.2, 0.7}, {0.5, 0.5}, {0, 0, 0}), SchemaError);
    EXPECT_THROW(binary_product_scheme({1.0}, {1.2}, {0.5}), ArgumentError);
    const JointDist big = JointDist::uniform({{"T", outer_cardinality_cap(ch) + 1}, {"X1", 2}, {"X2", 2}});
    EXPECT_THROW(make_outer_scheme(big, {}).validate(ch), SchemaError);
    EXPECT_EQ(outer_cardinality_cap(ch), 7);
}

TEST(EvalOuter, ProductInputsSatisfyDependenceBalance) {
    const IsacChannel ch = build_example(4);
    testing::Rng g(52);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const OuterScheme s = binary_product_scheme({0.4, 0.6}, {u(g), u(g)}, {u(g), u(g)});
        EXPECT_TRUE(eval_outer_our(ch, s, 0.3, 0.3).dependence_balance);
    }
}

TEST(EvalOuter, Example3ZeroDistortionInfeasibleAndFloorsAtCrossover) {
    const IsacChannel ch = build_example(3);
    const OuterScheme s = binary_product_scheme({1.0}, {0.5}, {0.5});
    EXPECT_FALSE(eval_outer_our(ch, s, 0.0, 0.0).feasible);
    EXPECT_NEAR(outer_min_distortion(ch, s, 1), 0.11, 1e-6);
    EXPECT_NEAR(outer_min_distortion(ch, s, 2), 0.11, 1e-6);
    const KhkcResult k = eval_outer_khkc(ch, s);
    EXPECT_NEAR(k.d1_min, 0.0, 1e-12);
    EXPECT_NEAR(k.d2_min, 0.0, 1e-12);
}

TEST(EvalOuter, Example1GenieDistortionsVanish) {
    const IsacChannel ch = build_example(1);
    const KhkcResult k = eval_outer_khkc(ch, binary_product_scheme({1.0}, {0.3}, {0.6}));
    EXPECT_NEAR(k.d1_min, 0.0, 1e-12);
    EXPECT_NEAR(k.d2_min, 0.0, 1e-12);
}

TEST(EvalOuter, Example4OriginSeparatesTheBounds) {
    const IsacChannel ch = build_example(4);
    OuterOptions opt;
    opt.parallel_x2 = true;
    const OuterScheme s = binary_product_scheme({1.0}, {0.5}, {0.5});
    const OuterResult our = eval_outer_our(ch, s, 0.3, 0.0, opt);
    EXPECT_FALSE(our.feasible);
    EXPECT_NEAR(our.f[1], h2(0.3), 1e-6);
    const KhkcResult khkc = eval_outer_khkc(ch, s, opt);
    EXPECT_TRUE(khkc.admits(0.0, 0.0, 0.3, 0.0));
}

TEST(EvalOuter, GenieDistortionNeverExceedsRestricted) {
    testing::Rng g(53);
    for (int n : {1, 2, 3, 4}) {
        const IsacChannel ch = build_example(n);
        for (int trial = 0; trial < 5; ++trial) {
            const JointDist txx = testing::random_joint(g, {{"T", 2}, {"X1", 2}, {"X2", 2}});
            const OuterScheme s = make_outer_scheme(txx, {});
            const KhkcResult k = eval_outer_khkc(ch, s);
            const JointDist j = assemble_joint(ch, marginalize(txx, {"X1", "X2"}));
            EXPECT_LE(k.d1_min, optimal_distortion(j, {"X1", "Z1"}, "ST1", ch.d1) + 1e-12);
            EXPECT_LE(k.d2_min, optimal_distortion(j, {"X2", "Z2"}, "ST2", ch.d2) + 1e-12);
        }
    }
}

TEST(EvalOuter, OurFeasibleImpliesKhkcFeasibleOnExample4) {
    const IsacChannel ch = build_example(4);
    OuterOptions opt;
    opt.parallel_x2 = true;
    bool gap = false;
    for (double p1 : {0.1, 0.5, 0.9})
        for (double p2 : {0.2, 0.5})
            for (double D2 : {0.0, 0.1, 0.2, 0.3}) {
                const OuterScheme s = binary_product_scheme({0.5, 0.5}, {p1, 1 - p1}, {p2, p2});
                const OuterResult our = eval_outer_our(ch, s, 0.3, D2, opt);
                const KhkcResult khkc = eval_outer_khkc(ch, s, opt);
                const bool k = khkc.admits(0.0, 0.0, 0.3, D2);
                if (our.feasible) EXPECT_TRUE(k);
                gap = gap || (k && !our.feasible);
            }
    EXPECT_TRUE(gap);
}

TEST(SensingProblem, UsesTheSensingMarginal) {
    const RdProblem p = sensing_rd_problem(build_example(4), 2);
    EXPECT_NEAR(rd_function(p, 0.138), 0.3023, 5e-4);
    EXPECT_NEAR(rd_max_distortion(p), 0.3, 1e-15);
}

TEST(Sweep, SymmetricCurvesOrderedAndMonotone) {
    OuterSweepGrid grid;
    grid.alpha_points = 21;
    grid.threads = 1;
    const auto pts = sweep_example4_outer(grid);
    ASSERT_EQ(pts.size(), 31u);
    EXPECT_EQ(pts.front().D2, 0.0);
    EXPECT_FALSE(pts.front().our_feasible);
    EXPECT_TRUE(pts.front().khkc_feasible);
    EXPECT_NEAR(pts.back().D2, 0.3, 1e-15);
    EXPECT_TRUE(pts.back().our_feasible);
    EXPECT_NEAR(pts.back().our_rate, pts.back().khkc_rate, 1e-12);
    double prev_our = -1.0;
    double prev_khkc = -1.0;
    for (const auto& p : pts) {
        if (p.our_feasible) {
            EXPECT_TRUE(p.khkc_feasible);
            EXPECT_LE(p.our_rate, p.khkc_rate + 1e-12);
            EXPECT_GE(p.our_rate, prev_our - 1e-12);
            prev_our = p.our_rate;
        }
        EXPECT_GE(p.khkc_rate, prev_khkc - 1e-12);
        prev_khkc = p.khkc_rate;
    }
}

}  // namespace
}  // namespace isac
