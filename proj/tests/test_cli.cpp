#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using evalkit::Json;
namespace fs = std::filesystem;

namespace {
const std::string data_dir = EVALKIT_EXAMPLE_DATA;

struct Run {
    int code;
    std::string out, err;
    Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = evalkit::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("evalkit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }
    static std::string slurp(const std::string& p) {
        std::ifstream f(p);
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    }
    fs::path dir_;
};
}  // namespace

TEST_F(Cli, MetricsFromCountTable) {
    const auto r = run({"metrics", "--input", data_dir + "/screening_counts.csv", "--count-col", "count", "--positive",
                        "disease"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    EXPECT_EQ(j["total"], 156);
    EXPECT_NEAR(j["binary"]["sensitivity"].get<double>(), 23.0 / 35.0, 1e-12);
    EXPECT_NEAR(j["binary"]["specificity"].get<double>(), 116.0 / 121.0, 1e-12);
    EXPECT_NEAR(j["binary"]["accuracy"].get<double>(), 139.0 / 156.0, 1e-12);
    EXPECT_EQ(j["intervals"]["sensitivity"]["method"], "wilson");
    EXPECT_EQ(j["manifest"]["subcommand"], "metrics");
    EXPECT_EQ(j["manifest"]["inputs"][0]["sha256"].get<std::string>().size(), 64u);
}

TEST_F(Cli, MetricsMulticlass) {
    const auto r = run({"metrics", "--input", data_dir + "/three_class_counts.csv", "--count-col", "count"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rec = r.json()["multiclass"]["recall"];
    EXPECT_NEAR(rec["healthy"].get<double>(), 0.95, 1e-12);
    EXPECT_NEAR(rec["disease A"].get<double>(), 11.0 / 39.0, 1e-12);
    EXPECT_NEAR(rec["disease B"].get<double>(), 15.0 / 41.0, 1e-12);
}

TEST_F(Cli, EmptyInputFails) {
    const auto r = run({"metrics", "--input", write("empty.csv", "")});
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
    EXPECT_NE(run({"metrics", "--input", path("missing.csv")}).code, 0);
    EXPECT_NE(run({"bogus"}).code, 0);
}

TEST_F(Cli, RocAucAndInversion) {
    auto r = run({"roc", "--input", data_dir + "/scores_demo.csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_DOUBLE_EQ(r.json()["auc"].get<double>(), 0.75);
    EXPECT_TRUE(r.json().contains("points"));

    r = run({"roc", "--input", data_dir + "/scores_demo.csv", "--invert-scores", "--out", path("roc.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(slurp(path("roc.json")));
    EXPECT_DOUBLE_EQ(j["auc"].get<double>(), 0.25);
    EXPECT_TRUE(fs::exists(path("roc.points.csv")));
    EXPECT_EQ(slurp(path("roc.points.csv")).substr(0, 17), "threshold,fpr,tpr");

    const auto perfect = write("perfect.csv", "label,score\n1,0.9\n1,0.8\n0,0.2\n0,0.1\n");
    r = run({"roc", "--input", perfect});
    EXPECT_DOUBLE_EQ(r.json()["auc"].get<double>(), 1.0);

    const auto single = write("single.csv", "label,score\n1,0.9\n1,0.8\n");
    EXPECT_EQ(run({"roc", "--input", single}).code, 1);
}

TEST_F(Cli, CrossValidationOnTwoGaussians) {
    const auto r = run({"cv", "--input", data_dir + "/two_gaussians.csv", "--seed", "3", "--k", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = r.json();
    const double acc = j["aggregates"]["accuracy"]["mean"].get<double>();
    EXPECT_NEAR(acc, 0.90, 3 * std::sqrt(0.9 * 0.1 / 1000.0));
    EXPECT_EQ(j["folds"].size(), 5u);
    EXPECT_TRUE(j["valid"].get<bool>());
    EXPECT_EQ(j["manifest"]["seed"], 3);
}

TEST_F(Cli, GroupColumnGivesSubjectDisjointFolds) {
    const auto r = run({"cv", "--input", data_dir + "/subjects.csv", "--group-col", "subject", "--seed", "1", "--k",
                        "4", "--plan-out", path("plan.json"), "--out", path("rep.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto plan = Json::parse(slurp(path("plan.json")));
    EXPECT_TRUE(plan["scheme"]["grouped"].get<bool>());
    // Subjects occupy consecutive triples of rows.
    for (const auto& f : plan["folds"]) {
        std::set<std::size_t> tr, te;
        for (auto i : f["train"]) tr.insert(i.get<std::size_t>() / 3);
        for (auto i : f["test"]) te.insert(i.get<std::size_t>() / 3);
        for (auto s : te) EXPECT_FALSE(tr.count(s));
    }

    // The saved plan replays identically through --plan-in.
    const auto again = run({"cv", "--input", data_dir + "/subjects.csv", "--group-col", "subject", "--seed", "1",
                            "--plan-in", path("plan.json")});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(again.json()["aggregates"], Json::parse(slurp(path("rep.json")))["aggregates"]);
}

TEST_F(Cli, ManyRepeatsWarn) {
    const auto r = run({"cv", "--input", data_dir + "/two_gaussians.csv", "--seed", "3", "--repeats", "11",
                        "--omit-scores"});
    ASSERT_EQ(r.code, 0) << r.err;
    bool found = false;
    const auto j = r.json();
    for (const auto& w : j["warnings"]) found |= w.get<std::string>().find("repeats = 11") != std::string::npos;
    EXPECT_TRUE(found);
}

TEST_F(Cli, UnsafePeekingExitsWithInvalidReport) {
    const auto r = run({"cv", "--input", data_dir + "/two_gaussians.csv", "--seed", "3", "--standardize",
                        "--unsafe-peeking", "--omit-scores"});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(r.json()["valid"].get<bool>());
}

TEST_F(Cli, NestedCvAndBootstrap) {
    const auto grid = write("grid.json", R"({"standardize": [0, 1]})");
    auto r = run({"nested-cv", "--input", data_dir + "/two_gaussians.csv", "--seed", "2", "--grid", grid, "--k", "3",
                  "--inner-k", "3", "--omit-scores"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["folds"].size(), 3u);
    EXPECT_TRUE(r.json()["folds"][0].contains("selected"));

    r = run({"bootstrap", "--input", data_dir + "/two_gaussians.csv", "--seed", "2", "--m", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(r.json()["mean_distinct_fraction"].get<double>(), 0.632, 0.01);
}

TEST_F(Cli, CompareTests) {
    const auto preds = write("a.csv", "truth,prediction\n1,1\n0,0\n1,0\n0,0\n");
    auto r = run({"compare", "--test", "mcnemar", "--a", preds, "--b", preds});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["p_value"], 1.0);

    r = run({"compare", "--test", "delong", "--a", data_dir + "/scores_demo.csv", "--b", data_dir + "/scores_demo.csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["p_value"], 1.0);

    const auto zeros = write("d.csv", "difference\n0\n0\n0\n0\n0\n");
    r = run({"compare", "--test", "corrected-t", "--diffs", zeros, "--n-train", "80", "--n-test", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.json()["p_value"], 1.0);
    EXPECT_EQ(r.json()["manifest"]["config"]["diff-col"], "difference");

    const auto shorter = write("b.csv", "truth,prediction\n1,1\n0,0\n");
    r = run({"compare", "--test", "mcnemar", "--a", preds, "--b", shorter});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("mismatch"), std::string::npos);
}

TEST_F(Cli, SimulateIsReproducible) {
    const std::vector<std::string> base{"simulate", "fig4", "--seed", "7", "--dims", "1,3", "--sizes", "20,40",
                                        "--reps", "3", "--test-size", "500"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", path("a.csv")});
    b.insert(b.end(), {"--out", path("b.csv")});
    ASSERT_EQ(run(a).code, 0);
    ASSERT_EQ(run(b).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    const auto m = Json::parse(slurp(path("a.csv.manifest.json")));
    EXPECT_EQ(m["effective"]["repetitions"], 3);
    EXPECT_EQ(m["seed"], 7);
}

TEST_F(Cli, PaperScaleSetsDefaults) {
    // Only the effective configuration is checked; the cell list is empty so
    // nothing heavy runs.
    const auto r = run({"simulate", "fig4", "--seed", "1", "--paper-scale", "--sizes", "2", "--out", path("p.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = Json::parse(slurp(path("p.csv.manifest.json")));
    EXPECT_EQ(m["effective"]["repetitions"], 1000);
    EXPECT_EQ(m["effective"]["test_size"], 1000000);
    EXPECT_EQ(m["skipped_cells"].size(), 4u);
}

TEST_F(Cli, ReplayReproducesAndDetectsChangedInputs) {
    const auto input = write("in.csv", slurp(data_dir + "/two_gaussians.csv"));
    ASSERT_EQ(run({"cv", "--input", input, "--seed", "5", "--out", path("r1.json")}).code, 0);
    const auto r = run({"replay", "--report", path("r1.json"), "--out", path("r2.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    auto a = Json::parse(slurp(path("r1.json"))), b = Json::parse(slurp(path("r2.json")));
    EXPECT_EQ(a["aggregates"], b["aggregates"]);
    EXPECT_EQ(a["folds"], b["folds"]);

    std::ofstream(input, std::ios::app) << "0,0.1,0.2\n";
    const auto bad = run({"replay", "--report", path("r1.json"), "--out", path("r3.json")});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("changed"), std::string::npos);
}
