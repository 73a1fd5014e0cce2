#include "isac/csv.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace isac {
namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args) {
    const std::string cmd = std::string(ISAC_CLI_PATH) + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

CsvTable table(const CliRun& r) {
    std::istringstream is(r.out);
    return CsvTable::read(is);
}

double single_value(const CliRun& r) {
    const CsvTable t = table(r);
    EXPECT_EQ(t.rows.size(), 1u);
    return t.rows.empty() ? std::nan("") : t.rows[0][0];
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("isac_cli_test_" + name)).string();
}

TEST(Cli, InfoAnchors) {
    const CliRun a = run("info --example 4 --expr \"I(X1;BX1)\" --px1 0.4");
    ASSERT_EQ(a.code, 0);
    EXPECT_NEAR(single_value(a), 0.321928094887362, 1e-12);
    EXPECT_NE(a.out.find("# expr: I(X1;BX1)"), std::string::npos);
    const CliRun h = run("info --example 1 --expr \"H(S1)\"");
    ASSERT_EQ(h.code, 0);
    EXPECT_NEAR(single_value(h), 0.5, 1e-3);
    const CliRun i = run("info --example 2 --expr \"I(X1;X2)\" --px1 0.3 --px2 0.9");
    ASSERT_EQ(i.code, 0);
    EXPECT_NEAR(single_value(i), 0.0, 1e-15);
}

TEST(Cli, InfoErrors) {
    EXPECT_EQ(run("info --example 4 --expr \"I(X1;Q9)\"").code, 3);
    EXPECT_EQ(run("info --example 4 --expr \"I(X1;X1)\"").code, 2);
    EXPECT_EQ(run("info --expr \"H(Y)\"").code, 2);
    EXPECT_EQ(run("info --example 7 --expr \"H(Y)\"").code, 2);
}

TEST(Cli, RdCurve) {
    const CliRun a = run("rd --p 0.3 --grid 0.138");
    ASSERT_EQ(a.code, 0);
    const CsvTable t = table(a);
    ASSERT_EQ(t.header[0], "D");
    ASSERT_EQ(t.header[1], "R");
    EXPECT_NEAR(t.rows.at(0)[1], 0.3023, 5e-4);
    EXPECT_EQ(table(run("rd --p 0.3 --grid 0.3")).rows.at(0)[1], 0.0);
    const CsvTable c = table(run("rd --p 0.3 --grid 0:0.3:16"));
    ASSERT_EQ(c.rows.size(), 16u);
    for (std::size_t i = 1; i + 1 < c.rows.size(); ++i)
        EXPECT_LE(c.rows[i][1], 0.5 * (c.rows[i - 1][1] + c.rows[i + 1][1]) + 1e-6);
    const CsvTable u = table(run("rd --p 0.3 --grid 0.2,0.1"));
    ASSERT_EQ(u.rows.size(), 2u);
    EXPECT_LT(u.rows[0][0], u.rows[1][0]);
    EXPECT_EQ(run("rd --p 0.3 --grid 0:x:3").code, 2);
}

TEST(Cli, RegionUsageErrors) {
    EXPECT_EQ(run("region --scheme our --example 3").code, 2);
    EXPECT_EQ(run("region --scheme outer-our --example 1 --symmetric").code, 2);
    EXPECT_EQ(run("region --scheme outer-our --example 4").code, 2);
    EXPECT_EQ(run("region --scheme our --example 4 --symmetric").code, 2);
    EXPECT_EQ(run("region --scheme bogus --example 4").code, 2);
}

TEST(Cli, OuterSymmetricCurve) {
    const CliRun a = run("region --scheme outer-our --example 4 --symmetric --alpha-points 11 --d2-grid 0:0.3:7");
    ASSERT_EQ(a.code, 0);
    const CsvTable t = table(a);
    ASSERT_EQ(t.rows.size(), 7u);
    EXPECT_EQ(t.rows.front()[0], 0.0);
    EXPECT_EQ(t.rows.front()[2], 0.0);
    EXPECT_TRUE(std::isnan(t.rows.front()[1]));
    EXPECT_EQ(t.rows.back()[2], 1.0);
    const CsvTable k =
        table(run("region --scheme outer-khkc --example 4 --symmetric --alpha-points 11 --d2-grid 0:0.3:7"));
    EXPECT_EQ(k.rows.front()[2], 1.0);
    EXPECT_EQ(k.rows.back()[1], t.rows.back()[1]);
}

TEST(Cli, KobayashiRegionIsDeterministic) {
    const std::string args = "region --scheme kobayashi --example 1 --axis-points 3 --pe-points 2 --no-zoom";
    const CliRun a = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(run(args + " --threads 2").out, a.out);
    const CsvTable t = table(a);
    ASSERT_GE(t.header.size(), 4u);
    EXPECT_EQ(t.header[0], "R1");
    EXPECT_EQ(t.header[3], "D2");
    EXPECT_FALSE(t.rows.empty());
}

TEST(Cli, SimulateIsSeeded) {
    const std::string args = "simulate --example 4 --user 2 --obs X2,Z2 --n 5000 --seed 11";
    const CliRun a = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(run(args).out, a.out);
    EXPECT_NE(run("simulate --example 4 --user 2 --obs X2,Z2 --n 5000 --seed 12").out, a.out);
    EXPECT_EQ(run("simulate --example 4 --obs X2,Q --n 10").code, 3);
}

TEST(Cli, SpecCheck) {
    const std::string golden = std::string(ISAC_TEST_DATA_DIR) + "/golden/example1.yaml";
    const CliRun ok = run("spec-check --spec " + golden + " --print");
    ASSERT_EQ(ok.code, 0);
    std::ifstream in(golden);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ok.out, ss.str());
    const std::string bad = temp_path("bad.yaml");
    {
        std::ofstream o(bad);
        o << "alphabets: {X1: 2}\nwhat: 1\n";
    }
    EXPECT_EQ(run("spec-check --spec " + bad).code, 3);
    EXPECT_EQ(run("spec-check --spec /nonexistent.yaml").code, 3);
    EXPECT_EQ(run("spec-check --spec " + golden + " --example 1").code, 2);
    std::filesystem::remove(bad);
}

TEST(Cli, WritesCsvFiles) {
    const std::string path = temp_path("rd.csv");
    ASSERT_EQ(run("rd --p 0.3 --grid 0:0.3:4 --out " + path).code, 0);
    std::ifstream in(path);
    const CsvTable t = CsvTable::read(in);
    EXPECT_EQ(t.rows.size(), 4u);
    EXPECT_FALSE(t.comments.empty());
    std::filesystem::remove(path);
}

TEST(Cli, VerifySubsetAndSelectors) {
    const CliRun a = run("verify --only rd");
    EXPECT_EQ(a.code, 0);
    EXPECT_NE(a.out.find("PASS  [2] rd"), std::string::npos);
    EXPECT_EQ(a.out.find("[1]"), std::string::npos);
    EXPECT_EQ(run("verify --only nonsense").code, 2);
}

TEST(Cli, ParseErrorsAreUsageErrors) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("rd --no-such-flag").code, 2);
    EXPECT_EQ(run("--help").code, 0);
}

}  // namespace
}  // namespace isac
