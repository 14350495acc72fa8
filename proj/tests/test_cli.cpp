#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ballcover/cli.hpp"

using namespace ballcover;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "ballcover");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string data(const char* name) { return std::string(BALLCOVER_DATA_DIR) + "/" + name; }

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("ballcover_test_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST(Cli, DecideCovered) {
    const CliRun r = cli({"decide", data("covered_2d.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("covered: true"), std::string::npos);
}

TEST(Cli, DecideJsonHasWitness) {
    const CliRun r = cli({"decide", "--json", data("not_covered_2d.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_FALSE(j["covered"].get<bool>());
    ASSERT_TRUE(j["witness"].is_array());
    EXPECT_EQ(j["witness"].size(), 2u);
    EXPECT_TRUE(j.contains("certificates"));
    EXPECT_TRUE(j.contains("timings_ms"));
    EXPECT_EQ(j["config"]["shortcuts"], true);
}

TEST(Cli, NegativeRadiusNamesTheField) {
    const CliRun r = cli({"decide", data("negative_radius.json")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("lambda[0].radius"), std::string::npos) << r.err;
}

TEST(Cli, MalformedJsonReportsLineAndColumn) {
    const std::string path = temp_path("broken.json");
    std::ofstream(path) << "{\n  \"dim\": 2,\n  \"lambda\": [ oops ]\n}\n";
    const CliRun r = cli({"decide", path});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST(Cli, MissingAndWrongFields) {
    const std::string path = temp_path("wrong.json");
    std::ofstream(path) << R"({"dim": 2, "lambda": [{"center": [0, 0, 1], "radius": 1}], "v": []})";
    CliRun r = cli({"decide", path});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("lambda[0].center"), std::string::npos) << r.err;

    std::ofstream(path) << R"({"dim": 2, "lambda": [{"center": [0, 0], "radius": 1}]})";
    r = cli({"decide", path});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("v: missing"), std::string::npos) << r.err;
}

TEST(Cli, GenIsByteIdenticalAndDecidable) {
    const std::string a = temp_path("gen_a.json"), b = temp_path("gen_b.json");
    ASSERT_EQ(cli({"gen", "--n", "2", "--p", "3", "--q", "3", "--seed", "1", "--out", a}).code, 0);
    ASSERT_EQ(cli({"gen", "--n", "2", "--p", "3", "--q", "3", "--seed", "1", "--out", b}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(cli({"decide", a}).code, 0);
}

TEST(Cli, GenHighDimensionSatisfiesConditions) {
    const CliRun r = cli({"gen", "--n", "10", "--p", "5", "--q", "5", "--seed", "3"});
    ASSERT_EQ(r.code, 0);
    const BallSystem s = parse_instance(r.out);
    EXPECT_EQ(s.dim, 10);
    for (std::size_t a = 0; a < s.p(); ++a)
        for (std::size_t b = a + 1; b < s.p(); ++b)
            EXPECT_EQ(classify_pair(s.lambda[a], s.lambda[b], Tolerances{}), PairRelation::CrossingSpheres);
}

TEST(Cli, RoundTripIsBitExact) {
    GenConfig g;
    g.dim = 4;
    g.seed = 77;
    const BallSystem s = generate(g);
    const BallSystem t = parse_instance(serialize_instance(s));
    ASSERT_EQ(s.p(), t.p());
    ASSERT_EQ(s.q(), t.q());
    for (std::size_t i = 0; i < s.p(); ++i) {
        EXPECT_EQ(s.lambda[i].center, t.lambda[i].center);
        EXPECT_EQ(s.lambda[i].radius, t.lambda[i].radius);
    }
    for (std::size_t i = 0; i < s.q(); ++i) {
        EXPECT_EQ(s.v[i].center, t.v[i].center);
        EXPECT_EQ(s.v[i].radius, t.v[i].radius);
    }
    EXPECT_EQ(serialize_instance(t), serialize_instance(s));
}

TEST(Cli, SequentialAgreesWithDefault) {
    for (int seed = 1; seed <= 5; ++seed) {
        const std::string path = temp_path("seq_" + std::to_string(seed) + ".json");
        ASSERT_EQ(cli({"gen", "--n", "2", "--p", "4", "--q", "2", "--seed", std::to_string(seed), "--out", path}).code,
                  0);
        const CliRun batch = cli({"decide", "--json", path});
        const CliRun seq = cli({"decide", "--json", "--sequential", path});
        ASSERT_EQ(batch.code, 0);
        ASSERT_EQ(seq.code, 0);
        EXPECT_EQ(nlohmann::json::parse(batch.out)["covered"], nlohmann::json::parse(seq.out)["covered"]);
    }
}

TEST(Cli, ToleranceFromEnvironmentAndFlag) {
    ::setenv("BALLCOVER_TOL", "1e-7", 1);
    CliRun r = cli({"decide", "--json", data("not_covered_2d.json")});
    EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["config"]["tol"].get<double>(), 1e-7);
    r = cli({"decide", "--json", "--tol", "1e-8", data("not_covered_2d.json")});
    EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["config"]["tol"].get<double>(), 1e-8);
    ::setenv("BALLCOVER_TOL", "abc", 1);
    EXPECT_EQ(cli({"decide", data("not_covered_2d.json")}).code, 2);
    ::unsetenv("BALLCOVER_TOL");
}

TEST(Cli, Oracle) {
    CliRun r = cli({"oracle", data("not_covered_2d.json"), "--step", "0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(nlohmann::json::parse(r.out)["witness"].is_array());

    r = cli({"oracle", data("covered_2d.json"), "--step", "0.01"});
    EXPECT_FALSE(nlohmann::json::parse(r.out)["conclusive"].get<bool>());

    r = cli({"oracle", data("not_covered_2d.json"), "--samples", "0"});
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_FALSE(j["conclusive"].get<bool>());
    EXPECT_EQ(j["samples_used"], 0);

    EXPECT_EQ(cli({"oracle", data("not_covered_2d.json"), "--step", "100"}).code, 2);
}

TEST(Cli, BenchAndFit) {
    const std::string csv = temp_path("bench.csv");
    const CliRun r = cli({"bench", "--dims", "2,4", "--reps", "1", "--seed", "5", "--csv", csv});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string text = slurp(csv);
    EXPECT_EQ(text.rfind("n,mean_ms,sd_ms\n", 0), 0u);
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
    }
    EXPECT_EQ(rows, 2);
    const CliRun f = cli({"fit", csv});
    EXPECT_EQ(f.code, 0);
    EXPECT_NE(f.out.find("b="), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"decide"}).code, 2);
    EXPECT_EQ(cli({"decide", "/nonexistent/file.json"}).code, 2);
}
