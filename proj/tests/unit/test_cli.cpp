#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "freeplate/cli.hpp"
#include "freeplate/freeplate.hpp"

using freeplate::json;
using freeplate::cli::run_cli;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(CliSpectrum, CsvRowsAscending)
{
    const CliRun r = run({"spectrum", "--dim", "2", "--tau", "10", "--count", "6"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "index,omega,l,multiplicity,a,b,gamma,w_residual");
    EXPECT_EQ(rows[1][1], "0");
    EXPECT_EQ(rows[1][2], "0");
    double prev = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double w = std::stod(rows[i][1]);
        EXPECT_GE(w, prev);
        prev = w;
    }
    EXPECT_NEAR(std::stod(rows[2][1]), 37.235316680953867291, 1e-9);
}

TEST(CliSpectrum, UsageErrors)
{
    const CliRun neg = run({"spectrum", "--tau", "-1"});
    EXPECT_EQ(neg.code, 2);
    EXPECT_NE(neg.err.find("tau > 0"), std::string::npos);
    EXPECT_TRUE(neg.out.empty());
    EXPECT_EQ(run({"spectrum", "--tau", "0"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--radius", "-2"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--bogus"}).code, 2);
    EXPECT_EQ(run({"spectrum", "--dim", "2.5"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"fundamental", "--dim", "1"}).code, 2);
}

TEST(CliSpectrum, HelpExitsZero)
{
    const CliRun r = run({"spectrum", "--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("--count"), std::string::npos);
}

TEST(CliSpectrum, JsonEnvelopeRoundTrips)
{
    const CliRun r = run({"spectrum", "--dim", "3", "--tau", "10", "--count", "6", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["schema_version"], "1.0");
    EXPECT_EQ(j["command"]["name"], "spectrum");
    EXPECT_EQ(j["problem"]["dim"], 3);
    EXPECT_TRUE(j.contains("generated_at"));
    EXPECT_TRUE(j.contains("host"));
    EXPECT_EQ(j["payload"]["entries"].size(), 6u);
    EXPECT_EQ(freeplate::to_json_text(j), r.out);
    // Every double survives text -> double -> text unchanged.
    const json again = json::parse(freeplate::to_json_text(j));
    EXPECT_EQ(again, j);
}

TEST(CliSpectrum, ReproducibleIsByteIdentical)
{
    const std::vector<std::string> args{"spectrum", "--dim", "2", "--tau", "1", "--count", "5", "--format",
                                        "json",     "--reproducible"};
    const CliRun a = run(args);
    const CliRun b = run(args);
    EXPECT_EQ(a.out, b.out);
    const json j = json::parse(a.out);
    EXPECT_FALSE(j.contains("generated_at"));
    EXPECT_FALSE(j.contains("host"));
    std::vector<std::string> par = args;
    par.insert(par.end(), {"--jobs", "3"});
    const json jp = json::parse(run(par).out);
    EXPECT_EQ(jp["payload"], j["payload"]);
}

TEST(CliSpectrum, CountBeyondCeilingIsComputeError)
{
    const CliRun r = run({"spectrum", "--lmax", "1", "--count", "200"});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST(CliFundamental, AlwaysOrderOne)
{
    for (const char* tau : {"0.1", "2", "75"}) {
        for (const char* dim : {"2", "4"}) {
            const CliRun r = run({"fundamental", "--dim", dim, "--tau", tau, "--format", "json", "--reproducible"});
            ASSERT_EQ(r.code, 0) << r.err;
            const json j = json::parse(r.out);
            EXPECT_EQ(j["payload"]["l"], 1);
            EXPECT_TRUE(j["payload"]["passed"].get<bool>());
            EXPECT_TRUE(j["payload"]["checks"]["w1_sign_change"].get<bool>());
        }
    }
}

TEST(CliFundamental, RadiusMatchesRescaledUnitRun)
{
    const json big = json::parse(run({"fundamental", "--tau", "1.5", "--radius", "2", "--format", "json"}).out);
    const json unit = json::parse(run({"fundamental", "--tau", "6", "--radius", "1", "--format", "json"}).out);
    const double w_big = big["payload"]["omega"].get<double>();
    const double w_unit = unit["payload"]["omega"].get<double>();
    EXPECT_NEAR(w_big, w_unit / 16.0, 1e-10 * w_big);
}

TEST(CliModeGrid, ConstantAndAntisymmetric)
{
    const CliRun c = run({"mode-grid", "--index", "0", "--nr", "3", "--ntheta", "4"});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto rows = parse_csv(c.out);
    ASSERT_EQ(rows.size(), 13u);
    for (std::size_t i = 2; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][2], rows[1][2]);
    }

    const CliRun f = run({"mode-grid", "--dim", "2", "--tau", "1", "--index", "1", "--nr", "4", "--ntheta", "8",
                       "--format", "json"});
    ASSERT_EQ(f.code, 0) << f.err;
    const json j = json::parse(f.out);
    const auto& values = j["payload"]["values"];
    for (const auto& row : values) {
        for (int t = 0; t < 4; ++t) {
            EXPECT_NEAR(row[t + 4].get<double>(), -row[t].get<double>(), 1e-15);
        }
    }
}

TEST(CliModeGrid, RowCountAndRange)
{
    const CliRun r = run({"mode-grid", "--index", "1", "--nr", "64", "--ntheta", "128"});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(parse_csv(r.out).size(), 8193u);
    EXPECT_EQ(run({"mode-grid", "--index", "500", "--lmax", "1"}).code, 1);
    EXPECT_EQ(run({"mode-grid", "--nr", "1"}).code, 2);
}

TEST(CliVerify, LemmasPass)
{
    const CliRun r = run({"verify", "--lemmas", "--dim", "2", "--format", "json", "--reproducible"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["payload"]["passed"].get<bool>());
    EXPECT_EQ(j["payload"]["lemmas"].size(), 13u);
}

TEST(CliVerify, IndexOneGapWithinGate)
{
    const CliRun r = run({"verify", "--index", "1", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json j = json::parse(r.out);
    EXPECT_LE(j["payload"]["residuals"]["rayleigh_gap"].get<double>(), 1e-7);
}

TEST(CliVerify, GateFailureIsThree)
{
    const CliRun r = run({"verify", "--index", "1", "--perturb-a", "1e-3"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("false"), std::string::npos);
    EXPECT_EQ(run({"verify", "--index", "0", "--perturb-a", "1e-3"}).code, 1);
    EXPECT_EQ(run({"verify", "--index", "1", "--lemmas"}).code, 2);
}

TEST(Csv, QuotingAndNumbers)
{
    EXPECT_EQ(freeplate::csv_field(std::string_view("plain")), "plain");
    EXPECT_EQ(freeplate::csv_field(std::string_view("a,b")), "\"a,b\"");
    EXPECT_EQ(freeplate::csv_field(std::string_view("say \"hi\"")), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(freeplate::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(freeplate::format_double(-0.0), "0");
    EXPECT_EQ(freeplate::format_double(1e-300), "1e-300");
    EXPECT_EQ(std::stod(freeplate::format_double(M_PI)), M_PI);
}

TEST(Golden, CanonicalInvocationsMatchCommittedFiles)
{
    struct Case {
        const char* file;
        std::vector<std::string> args;
    };
    const std::vector<Case> cases = {
        {"spectrum_d2_tau1.csv", {"spectrum", "--dim", "2", "--tau", "1", "--count", "6", "--reproducible"}},
        {"spectrum_d3_tau10.json",
         {"spectrum", "--dim", "3", "--tau", "10", "--count", "6", "--format", "json", "--reproducible"}},
        {"fundamental_d2_tau1.json", {"fundamental", "--dim", "2", "--tau", "1", "--format", "json", "--reproducible"}},
        {"mode_grid_d2_tau1.csv",
         {"mode-grid", "--dim", "2", "--tau", "1", "--index", "1", "--nr", "5", "--ntheta", "8", "--reproducible"}},
    };
    for (const Case& c : cases) {
        const std::string expected = read_file(std::string(FREEPLATE_GOLDEN_DIR) + "/" + c.file);
        ASSERT_FALSE(expected.empty()) << c.file;
        const CliRun r = run(c.args);
        EXPECT_EQ(r.code, 0);
        EXPECT_EQ(r.out, expected) << c.file;
    }
}
