#include "isac/channel.hpp"
#include "isac/csv.hpp"
#include "isac/errors.hpp"
#include "isac/expr.hpp"
#include "isac/sim.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace isac {
namespace {

JointDist example4_joint(double px1) {
    const IsacChannel ch = build_example(4);
    VarList comps;
    for (const auto& c : ch.components) comps.push_back(c.name);
    return with_components(assemble_joint(ch, product_input(ch, px1, 0.5)), ch, comps);
}

TEST(Expr, ParsesMutualInformationForms) {
    const VarList known = {"X1", "X2", "Y", "Z1", "Z2", "SR"};
    const InfoExpr e = parse_info_expr("I(X1 ; Y Z1 Z2 | SR, X2)", known);
    EXPECT_EQ(e.kind, InfoExpr::Kind::Mutual);
    EXPECT_EQ(e.a, VarList{"X1"});
    EXPECT_EQ(e.b, (VarList{"Y", "Z1", "Z2"}));
    EXPECT_EQ(e.given, (VarList{"SR", "X2"}));
    const InfoExpr f = parse_info_expr("I(X1X2;YZ1|SR)", known);
    EXPECT_EQ(f.a, (VarList{"X1", "X2"}));
    EXPECT_EQ(f.b, (VarList{"Y", "Z1"}));
}

TEST(Expr, ParsesEntropy) {
    const InfoExpr e = parse_info_expr("H(Y|X1,X2)", {"X1", "X2", "Y"});
    EXPECT_EQ(e.kind, InfoExpr::Kind::Entropy);
    EXPECT_TRUE(e.b.empty());
    EXPECT_EQ(parse_info_expr(e.str(), {"X1", "X2", "Y"}).given, e.given);
}

TEST(Expr, LongestNameWinsWhenSplitting) {
    const InfoExpr e = parse_info_expr("I(X1;BX1)", {"X1", "B", "BX1"});
    EXPECT_EQ(e.b, VarList{"BX1"});
}

TEST(Expr, ErrorsCarryColumns) {
    const VarList known = {"X1", "X2", "Y"};
    try {
        parse_info_expr("I(X1;Q)", known);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 6);
    }
    EXPECT_THROW(parse_info_expr("I(X1;Y", known), ParseError);
    EXPECT_THROW(parse_info_expr("K(X1)", known), ParseError);
    EXPECT_THROW(parse_info_expr("I(X1)", known), ParseError);
    EXPECT_THROW(parse_info_expr("H()", known), ParseError);
    EXPECT_THROW(parse_info_expr("I(X1;Y) trailing", known), ParseError);
    EXPECT_THROW(parse_info_expr("I(X1;X1)", known), ArgumentError);
}

TEST(Expr, EvaluatesAnchors) {
    EXPECT_NEAR(evaluate(parse_info_expr("I(X1;BX1)", {"X1", "BX1"}), example4_joint(0.4)), 0.321928094887362, 1e-12);
    const JointDist j = example4_joint(0.5);
    EXPECT_NEAR(evaluate(parse_info_expr("I(X1;X2)", {"X1", "X2"}), j), 0.0, 1e-15);
    EXPECT_NEAR(evaluate(parse_info_expr("H(S1)", {"S1"}), j), testing::h2(0.24), 1e-12);
}

TEST(Csv, RoundTripsAtTwelveDigits) {
    CsvTable t;
    t.comments = {"scheme: our", "grid: 11"};
    t.header = {"R1", "D2"};
    t.add_row({0.918563123456789, 0.3});
    t.add_row({1e-17, -2.5});
    std::stringstream ss;
    t.write(ss);
    const CsvTable back = CsvTable::read(ss);
    EXPECT_EQ(back.comments, t.comments);
    EXPECT_EQ(back.header, t.header);
    ASSERT_EQ(back.rows.size(), 2u);
    EXPECT_EQ(format_number(back.rows[0][0]), format_number(t.rows[0][0]));
    EXPECT_NEAR(back.rows[0][0], 0.918563123457, 1e-13);
    EXPECT_EQ(back.rows[1][1], -2.5);
}

TEST(Csv, FormatAndValidation) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    CsvTable t;
    t.header = {"a", "b"};
    EXPECT_THROW(t.add_row({1.0}), ArgumentError);
    std::stringstream bad("a,b\n1,x\n");
    EXPECT_THROW(CsvTable::read(bad), ParseError);
    std::stringstream ragged("a,b\n1\n");
    EXPECT_THROW(CsvTable::read(ragged), ParseError);
    std::stringstream empty("# only a comment\n");
    EXPECT_THROW(CsvTable::read(empty), ParseError);
}

TEST(SplitMix, CounterBasedAndInRange) {
    EXPECT_EQ(splitmix64(7, 3), splitmix64(7, 3));
    EXPECT_NE(splitmix64(7, 3), splitmix64(7, 4));
    EXPECT_NE(splitmix64(7, 3), splitmix64(8, 3));
    // Reference value of the standard generator seeded with 0: first output.
    EXPECT_EQ(splitmix64(0, 0), 0xE220A8397B1DCDAFULL);
    double mean = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = uniform01(5, i);
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        mean += u / 10000.0;
    }
    EXPECT_NEAR(mean, 0.5, 0.02);
}

SimConfig example4_config(long n, std::uint64_t seed, unsigned threads) {
    const IsacChannel ch = build_example(4);
    return SimConfig{ch, product_input(ch, 0.5, 0.5), 2, {"X2", "Z2"}, std::nullopt, n, seed, threads};
}

TEST(Simulate, SingleSampleIsDeterministic) {
    const SimResult a = simulate(example4_config(1, 9, 1));
    const SimResult b = simulate(example4_config(1, 9, 1));
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, 0.0);
    EXPECT_EQ(a.n, 1);
}

TEST(Simulate, ThreadCountDoesNotChangeResult) {
    const SimResult a = simulate(example4_config(20'000, 4, 1));
    const SimResult b = simulate(example4_config(20'000, 4, 4));
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Simulate, Example4ConstantEstimate) {
    const SimResult r = simulate(example4_config(100'000, SimConfig{}.seed, 0));
    EXPECT_NEAR(r.analytic, 0.3, 1e-12);
    EXPECT_LE(std::abs(r.mean - 0.3), 3.0 * r.std_error);
}

TEST(Simulate, Example1XorEstimatorNeverErrs) {
    const IsacChannel ch = build_example(1);
    const SimResult r = simulate({ch, product_input(ch, 0.5, 0.5), 1, {"X1", "Z1"}, std::nullopt, 100'000, 1, 0});
    EXPECT_EQ(r.mean, 0.0);
    EXPECT_EQ(r.std_error, 0.0);
}

TEST(Simulate, ComponentObservationsAreAppended) {
    const IsacChannel ch = build_example(4);
    const SimResult r = simulate({ch, product_input(ch, 0.5, 0.5), 2, {"X2", "BX1"}, std::nullopt, 50'000, 3, 0});
    EXPECT_NEAR(r.analytic, 0.3, 1e-12);
    EXPECT_LE(std::abs(r.mean - r.analytic), 4.0 * r.std_error);
}

TEST(Simulate, RejectsBadConfig) {
    EXPECT_THROW(simulate(example4_config(0, 1, 1)), ArgumentError);
    SimConfig c = example4_config(10, 1, 1);
    c.user = 3;
    EXPECT_THROW(simulate(c), ArgumentError);
}

}  // namespace
}  // namespace isac
