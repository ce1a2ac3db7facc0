#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

using json = nlohmann::json;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

CliRun run(const std::string& args) {
    const std::string cmd = std::string(BHK_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    CliRun r;
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

json last_line(const CliRun& r) {
    std::istringstream in(r.out);
    std::string line, last;
    while (std::getline(in, line))
        if (!line.empty()) last = line;
    return json::parse(last);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("bhk_cli_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST(Cli, EvalGauss) {
    const CliRun r = run("eval --t 0.25 --x 0,0 --y 1,0 --method gauss");
    ASSERT_EQ(r.code, 0) << r.out;
    const json j = last_line(r);
    EXPECT_NEAR(j["value"].get<double>(), 0.1170996, 1e-7);
    EXPECT_TRUE(j.contains("regime"));
    EXPECT_TRUE(j.contains("error_indicator"));
}

TEST(Cli, EvalThm1) {
    const CliRun r = run("eval --t 0.1 --x 0.5,0 --y 0.5,0 --method thm1");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(last_line(r)["value"].get<double>(), 0.785075, 2e-5);
    EXPECT_EQ(last_line(r)["regime"], "thm1-boundary");
}

TEST(Cli, EvalAutoAndOracles) {
    const CliRun a = run("eval --t 0.01 --x 0,0 --y 0,0");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(last_line(a)["regime"], "interior");
    const CliRun s = run("eval --t 0.3 --x 0.9,0 --y 0.9,0 --method series");
    ASSERT_EQ(s.code, 0);
    EXPECT_GT(last_line(s)["err"].get<double>(), 0.0);
    const CliRun m = run("eval --t 0.3 --x 0.9,0 --y 0.9,0 --method mc --paths 2000 --mc-seed 5");
    ASSERT_EQ(m.code, 0);
    const double sv = last_line(s)["value"], mv = last_line(m)["value"], me = last_line(m)["err"];
    EXPECT_NEAR(mv, sv, 4.0 * me);
}

TEST(Cli, EvalUsageErrors) {
    EXPECT_EQ(run("eval --t -1 --x 0,0 --y 0,0").code, 2);
    EXPECT_EQ(run("eval --t 0 --x 0,0 --y 0,0").code, 2);
    EXPECT_EQ(run("eval --t 0.1 --x 0,a --y 0,0").code, 2);
    EXPECT_EQ(run("eval --t 0.1 --x 0 --y 0,0").code, 2);
    EXPECT_EQ(run("eval --t 0.1 --x 2,0 --y 0,0").code, 2);
    EXPECT_EQ(run("eval --t 0.1 --x 0,0 --y 0,0 --method bogus").code, 2);
    EXPECT_EQ(run("eval --t 0.1 --x 0,0,0 --y 0,0").code, 2);
    EXPECT_EQ(run("eval --t 0.1 --x 0,0 --y 0.5,0 --method thm1").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, EvalAccuracyError) {
    EXPECT_EQ(run("eval --t 1e-7 --x 0.999,0 --y 0.999,0 --method series --max-radial-modes 20 "
                  "--max-angular-modes 20")
                  .code,
              3);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
    const auto cfg = temp_file("cfg.json");
    std::ofstream(cfg) << R"({"regime": {"M_thm1": 100.0}, "mc": {"n_paths": 1000, "seed": 9}})";
    // With M_thm1 = 100 the point (0.8,0) at t = 1e-4 is no longer in the Theorem 1 regime.
    const CliRun a = run("eval --t 1e-4 --x 0.8,0 --y 0.8,0 --config " + cfg.string());
    ASSERT_EQ(a.code, 0);
    EXPECT_NE(last_line(a)["regime"], "thm1-boundary");
    const CliRun b = run("eval --t 1e-4 --x 0.8,0 --y 0.8,0 --M-thm1 5 --config " + cfg.string());
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(last_line(b)["regime"], "thm1-boundary");

    const auto out = temp_file("eval.json");
    ASSERT_EQ(run("eval --t 0.1 --x 0,0 --y 0,0 --config " + cfg.string() + " --out " + out.string()).code, 0);
    const json rep = json::parse(slurp(out));
    EXPECT_EQ(rep["config"]["cli.mc_paths"], 1000);
    EXPECT_EQ(rep["config"]["cli.M_thm1"], 100.0);
    std::filesystem::remove(out);
    std::filesystem::remove(cfg);
}

TEST(Cli, ConfigRejectsUnknownKeys) {
    const auto cfg = temp_file("bad.json");
    std::ofstream(cfg) << R"({"regime": {"M_thm1": 5.0, "typo": 1}})";
    EXPECT_EQ(run("eval --t 0.1 --x 0,0 --y 0,0 --config " + cfg.string()).code, 2);
    std::ofstream(cfg) << R"({"colour": "blue"})";
    EXPECT_EQ(run("eval --t 0.1 --x 0,0 --y 0,0 --config " + cfg.string()).code, 2);
    std::ofstream(cfg) << R"({"regime": {"M_thm1": "five"}})";
    EXPECT_EQ(run("eval --t 0.1 --x 0,0 --y 0,0 --config " + cfg.string()).code, 2);
    std::ofstream(cfg) << "not json";
    EXPECT_EQ(run("eval --t 0.1 --x 0,0 --y 0,0 --config " + cfg.string()).code, 2);
    EXPECT_EQ(run("eval --t 0.1 --x 0,0 --y 0,0 --config /nonexistent/cfg.json").code, 2);
    std::filesystem::remove(cfg);
}

TEST(Cli, Integral) {
    const CliRun r = run("integral --t 1 --a 1 --b 1 --alpha 1.5 --beta 1.5");
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(last_line(r)["value"].get<double>(), 0.0649266, 1e-6);
    EXPECT_EQ(run("integral --t 1 --a -1 --b 1").code, 2);
    EXPECT_EQ(run("integral --t 1 --a 1 --b 1 --alpha 1").code, 2);
}

TEST(Cli, CheckParallel) {
    const auto out = temp_file("parallel.csv");
    const CliRun r = run("check --suite parallel --cases 10000 --seed 7 --format csv --out " + out.string());
    ASSERT_EQ(r.code, 0);
    const json j = last_line(r);
    EXPECT_LE(j["results"][0]["fitted"].get<double>(), 2.0);
    EXPECT_EQ(j["summary"]["failed"], 0);
    const std::string first = slurp(out);
    EXPECT_EQ(first.rfind("suite,statement,fitted,", 0), 0u);
    ASSERT_EQ(run("check --suite parallel --cases 10000 --seed 7 --format csv --out " + out.string()).code, 0);
    EXPECT_EQ(slurp(out), first);
    std::filesystem::remove(out);
    EXPECT_EQ(run("check --suite nope").code, 2);
    EXPECT_EQ(run("check --suite parallel --cases 0").code, 2);
}

TEST(Cli, SweepDiagonalTheorem1) {
    const auto out = temp_file("sweep.json");
    const CliRun r = run("sweep --family diagonal --theorem 1 --t-min 1e-4 --t-max 1e-2 --points 8 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.out;
    const json j = last_line(r);
    EXPECT_TRUE(std::isfinite(j["summary"]["envelope_C"].get<double>()));
    const json rep = json::parse(slurp(out));
    EXPECT_EQ(rep["schema_version"], 1);
    EXPECT_EQ(rep["kind"], "rate_sweep");
    EXPECT_EQ(rep["records"].size(), 8u);
    std::filesystem::remove(out);
    EXPECT_EQ(run("sweep --theorem 1 --points 1").code, 2);
    EXPECT_EQ(run("sweep --theorem 1 --M-thm1 5").code, 2);
    EXPECT_EQ(run("sweep --theorem 1 --family chord --t-min 2e-4 --ceiling 1e-9").code, 1);
}

TEST(Cli, Calibrate) {
    const CliRun ok = run("calibrate --target 0.2");
    ASSERT_EQ(ok.code, 0);
    const json j = last_line(ok);
    EXPECT_TRUE(j["summary"]["ok"].get<bool>());
    EXPECT_EQ(run("calibrate --target 0.2").out, ok.out);
    EXPECT_EQ(run("calibrate --target 1e-9").code, 1);
    EXPECT_EQ(run("calibrate --target 2").code, 2);
}
