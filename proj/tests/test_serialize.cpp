#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "evalkit/serialize.hpp"

using namespace evalkit;

TEST(Serialize, NonFiniteAndUndefined) {
    EXPECT_TRUE(real_json(std::numeric_limits<double>::quiet_NaN()).is_null());
    EXPECT_EQ(real_json(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(real_json(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(measure_json(std::nullopt), "undefined");
    EXPECT_EQ(measure_json(0.25), 0.25);
    EXPECT_EQ(real_from_json(Json("inf")), std::numeric_limits<double>::infinity());
    EXPECT_TRUE(std::isnan(real_from_json(Json(nullptr))));
    EXPECT_THROW(real_from_json(Json("nope")), std::invalid_argument);
}

TEST(Serialize, BinaryBundleMarksUndefinedMeasures) {
    const auto j = to_json(binary_metrics(BinaryCounts{0, 0, 10, 0}));
    EXPECT_EQ(j["sensitivity"], "undefined");
    EXPECT_EQ(j["specificity"], 1.0);
    EXPECT_EQ(j["counts"]["tn"], 10);
}

TEST(Serialize, PlanRoundTrip) {
    Matrix x(12, 1);
    std::vector<int> y(12);
    for (std::size_t i = 0; i < 12; ++i) y[i] = int(i % 2);
    const Dataset d(x, y, 2);
    const auto plan = kfold_split(d, 3, true, false, 2, 42);
    const auto back = plan_from_json(Json::parse(to_json(plan).dump()), d.size());
    EXPECT_EQ(back.scheme.kind, SplitKind::kfold);
    EXPECT_EQ(back.scheme.k, 3u);
    EXPECT_EQ(back.scheme.repeats, 2u);
    EXPECT_EQ(back.scheme.seed, 42u);
    ASSERT_EQ(back.folds.size(), plan.folds.size());
    for (std::size_t i = 0; i < plan.folds.size(); ++i) {
        EXPECT_EQ(back.folds[i].train, plan.folds[i].train);
        EXPECT_EQ(back.folds[i].test, plan.folds[i].test);
        EXPECT_EQ(back.folds[i].repeat, plan.folds[i].repeat);
    }
}

TEST(Serialize, HandWrittenPlanFillsTrainingSets) {
    const auto j = Json::parse(R"({"folds": [{"test": [0, 1]}, {"test": [2, 3]}]})");
    const auto p = plan_from_json(j, 4);
    EXPECT_EQ(p.scheme.kind, SplitKind::custom);
    EXPECT_EQ(p.scheme.k, 2u);
    EXPECT_EQ(p.folds[0].train, (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(p.folds[1].train, (std::vector<std::size_t>{0, 1}));
    EXPECT_THROW(plan_from_json(Json::parse("{}"), 4), std::invalid_argument);
}

TEST(Serialize, GnbRoundTrip) {
    const GnbModel m({{1.0, 2.0}, {3.0, 4.5}}, {{0.5, 1.0}, {2.0, 0.25}}, PriorVector({0.3, 0.7}));
    const auto back = gnb_from_json(Json::parse(to_json(m).dump()));
    EXPECT_EQ(back.means(), m.means());
    EXPECT_EQ(back.variances(), m.variances());
    EXPECT_EQ(back.priors().values(), m.priors().values());
    EXPECT_THROW(gnb_from_json(Json::parse(R"({"model": "tree"})")), std::invalid_argument);
}

TEST(Serialize, RocCsv) {
    const auto curve = roc_curve(ScoreSet::from_groups(std::vector<double>{0.9}, std::vector<double>{0.1}));
    std::ostringstream out;
    write_roc_csv(out, curve);
    EXPECT_EQ(out.str(), "threshold,fpr,tpr\ninf,0,0\n0.9,0,1\n0.1,1,1\n");
}

TEST(Serialize, ReportContainsFoldsAndPlan) {
    Matrix x(20, 1);
    std::vector<int> y(20);
    for (std::size_t i = 0; i < 20; ++i) {
        y[i] = int(i % 2);
        x(i, 0) = double(i % 2) * 5.0 + double(i) * 0.01;
    }
    const Dataset d(x, y, 2);
    const auto rep = cross_validate(d, Pipeline(std::make_shared<GnbLearner>()), kfold_split(d, 4, true, false, 1, 1));
    const auto j = to_json(rep);
    EXPECT_EQ(j["folds"].size(), 4u);
    EXPECT_TRUE(j["valid"].get<bool>());
    EXPECT_TRUE(j["folds"][0].contains("scores"));
    EXPECT_FALSE(to_json(rep, false)["folds"][0].contains("scores"));
    EXPECT_EQ(j["aggregates"]["accuracy"]["mean"], 1.0);
}
