#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "caloric/caloric.hpp"

using namespace caloric;
using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(CALORIC_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& name) { return std::string(CALORIC_TEST_DATA) + "/" + name; }

/// TSV as header-keyed rows; the same split the CLI uses for writing.
std::vector<std::map<std::string, std::string>> parse_tsv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    std::vector<std::map<std::string, std::string>> rows;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, '\t')) cells.push_back(cell);
        return cells;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (header.empty()) {
            header = cells;
            continue;
        }
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST(CliDims, LineTable) {
    const auto r = run("dims --n 1 --k-max 2");
    ASSERT_EQ(r.code, 0);
    const auto rows = parse_tsv(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[2].at("caloric"), "3");
    EXPECT_EQ(rows[2].at("formula"), "3");
    EXPECT_EQ(rows[2].at("match"), "true");
    EXPECT_EQ(rows[2].at("bound"), "holds");
}

TEST(CliDims, PlaneJson) {
    const auto r = run("--output json dims --n 2 --k-max 2");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["rows"][2]["caloric"], 6);
    EXPECT_EQ(j["rows"][2]["harmonic"], 5);
    EXPECT_EQ(j["rows"][2]["dim_P_hat"], "7");
}

TEST(CliDims, SingleRowAndCustomGenerators) {
    auto r = run("dims --n 1 --k-max 0");
    ASSERT_EQ(r.code, 0);
    auto rows = parse_tsv(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].at("caloric"), "1");

    r = run("dims --n 2 --k-max 4 --generators " + data("diagonal2.gens"));
    ASSERT_EQ(r.code, 0);
    rows = parse_tsv(r.out);
    for (const auto& row : rows) EXPECT_EQ(row.at("match"), "true");

    EXPECT_EQ(run("dims --n 2 --k-max 2 --generators " + data("asymmetric.graph")).code, 2);
    EXPECT_EQ(run("dims --n 1 --k-max 2 --generators " + data("diagonal2.gens")).code, 2);
}

TEST(CliBasis, Examples) {
    auto r = run("basis --kind caloric --n 1 --k 2");
    ASSERT_EQ(r.code, 0);
    auto rows = parse_tsv(r.out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].at("polynomial"), "1");
    EXPECT_EQ(rows[1].at("polynomial"), "x1");
    EXPECT_EQ(rows[2].at("polynomial"), "x1^2 + t");

    r = run("basis --kind harmonic --n 1 --k 2");
    rows = parse_tsv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].at("polynomial"), "x1");

    r = run("--output json basis --kind harmonic --n 1 --k 0");
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["dimension"], 1);
    EXPECT_EQ(j["basis"][0]["polynomial"], "1");

    EXPECT_EQ(run("basis --kind thermal --n 1 --k 2").code, 1);
    EXPECT_EQ(run("basis --kind caloric --n 1 --k -1").code, 2);
}

TEST(CliPoisson, Examples) {
    auto solve = [](const std::string& g) {
        const auto r = run("poisson --n 1 --g \"" + g + "\"");
        EXPECT_EQ(r.code, 0);
        const auto rows = parse_tsv(r.out);
        return rows.empty() ? std::string() : rows[0].at("u");
    };
    EXPECT_EQ(parse_polynomial(solve("1"), 1), parse_polynomial("x1^2", 1));
    EXPECT_EQ(parse_polynomial(solve("t"), 1), parse_polynomial("x1^2 t + 1/6 x1^4 - 1/6 x1^2", 1));
    EXPECT_EQ(solve("0"), "0");
    EXPECT_EQ(run("poisson --n 1 --g \"x1 +\"").code, 2);
    EXPECT_EQ(run("poisson --n 1 --g \"x2\"").code, 2);
    EXPECT_EQ(run("poisson --n 1").code, 1);
}

TEST(CliCaccioppoli, LatticeSegment) {
    const auto r = run("caccioppoli --u \"x1^2 + t\" --n 1 --box 36 --radii 1");
    ASSERT_EQ(r.code, 0);
    const auto rows = parse_tsv(r.out);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].at("gradient_term"), "11");
    EXPECT_EQ(rows[0].at("time_term"), "6");
    EXPECT_EQ(rows[0].at("numerator"), "17");
    const auto denominator = parse_rational(rows[0].at("denominator"));
    const auto terms = caccioppoli_ratio(LatticeBox(GeneratingSet::standard(1), 36),
                                         PolynomialField(parse_polynomial("x1^2 + t", 1), GeneratingSet::standard(1)),
                                         {{0}, 1, 36});
    EXPECT_EQ(denominator, terms.denominator);
    EXPECT_EQ(parse_rational(rows[0].at("ratio")), Rational(17) / denominator);
}

TEST(CliCaccioppoli, ConstantAndRejections) {
    const auto r = run("--output json caccioppoli --u \"3\" --n 1 --box 72 --radii 1,2");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 2u);
    for (const auto& row : j["rows"]) EXPECT_EQ(row["ratio"], "0");
    EXPECT_EQ(j["max_ratio"], 0.0);

    EXPECT_EQ(run("caccioppoli --u \"x1\" --n 1 --box 36 --radii 0.5").code, 2);
    EXPECT_EQ(run("caccioppoli --u \"x1^2\" --n 1 --box 36 --radii 1").code, 2);
    EXPECT_EQ(run("caccioppoli --u \"x1\" --n 1 --box 36 --radii 1,2").code, 2);
    EXPECT_EQ(run("caccioppoli --u \"x1\" --n 1 --box 36").code, 1);
}

TEST(CliCaccioppoli, SpectralOnGraphFile) {
    const auto r = run("--output json caccioppoli --graph " + data("path4.graph") + " --spectral-index 1 --radii 1,2");
    ASSERT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 2u);
    EXPECT_LT(j["theta"].get<double>(), 0.0);
    EXPECT_GE(j["max_ratio"].get<double>(), 0.0);
}

TEST(CliChecks, Families) {
    auto r = run("checks --family grid --size 5 --seed 7");
    ASSERT_EQ(r.code, 0);
    for (const auto& row : parse_tsv(r.out)) {
        EXPECT_EQ(row.at("status"), "pass") << row.at("check");
        EXPECT_EQ(row.at("max_residual"), "0");
    }
    r = run("--output json checks --family tree --size 12 --seed 1");
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(json::parse(r.out)["all_pass"].get<bool>());
    EXPECT_EQ(run("checks --graph " + data("path4.graph")).code, 0);
    EXPECT_EQ(run("checks --graph " + data("asymmetric.graph")).code, 2);
    EXPECT_EQ(run("checks --graph " + data("missing.graph")).code, 2);
}

TEST(CliVolume, Families) {
    auto alpha = [](const std::string& args) {
        const auto r = run("--output json volume " + args);
        EXPECT_EQ(r.code, 0) << args;
        return r.code == 0 ? json::parse(r.out)["alpha_hat"].get<double>() : -1.0;
    };
    EXPECT_NEAR(alpha("--family path --size 101 --x0 50 --r-max 32"), 1.0, 0.15);
    EXPECT_NEAR(alpha("--family grid --size 65 --x0 32,32 --r-max 32"), 2.0, 0.2);
    EXPECT_NEAR(alpha("--family star --size 6 --x0 0 --r-max 5"), 0.0, 1e-9);

    const auto r = run("volume --family path --size 101 --x0 50 --r-max 4");
    const auto rows = parse_tsv(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[3].at("mu_ball"), "18");
    EXPECT_EQ(run("volume --family path --size 5 --x0 nowhere").code, 2);
}

TEST(Cli, DeterministicOutput) {
    for (const std::string args : {"dims --n 2 --k-max 4", "checks --family random --size 9 --seed 3",
                                   "caccioppoli --u \"x1^2 + t\" --n 1 --box 144 --radii 1,2,4"}) {
        const auto a = run(args), b = run(args);
        EXPECT_EQ(a.code, 0);
        EXPECT_EQ(a.out, b.out) << args;
    }
    // thread count changes nothing observable
    const std::string sweep = "caccioppoli --u \"x1^2 + t\" --n 1 --box 144 --radii 4,2,1";
    EXPECT_EQ(run(sweep, "CALORIC_THREADS=1").out, run(sweep, "CALORIC_THREADS=3").out);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("frobnicate").code, 1);
    EXPECT_EQ(run("dims --n 1").code, 1);
    EXPECT_EQ(run("--output xml dims --n 1 --k-max 1").code, 1);
}
