#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "evalkit/metrics.hpp"

using namespace evalkit;

namespace {
// Screening table as per-case sequences: 0 = healthy, 1 = disease.
void screening_cases(std::vector<int>& truth, std::vector<int>& pred) {
    auto add = [&](int t, int p, int n) {
        for (int i = 0; i < n; ++i) {
            truth.push_back(t);
            pred.push_back(p);
        }
    };
    add(0, 0, 116);
    add(0, 1, 5);
    add(1, 0, 12);
    add(1, 1, 23);
}

ConfusionMatrix three_class() { return ConfusionMatrix::from_counts({{95, 2, 3}, {9, 11, 19}, {11, 15, 15}}); }
}  // namespace

TEST(ConfusionMatrix, ScreeningFromCases) {
    std::vector<int> t, p;
    screening_cases(t, p);
    const auto cm = confusion_matrix(t, p, 2);
    EXPECT_EQ(cm.table(), (std::vector<std::vector<std::int64_t>>{{116, 5}, {12, 23}}));
    EXPECT_EQ(cm.total(), 156);
}

TEST(ConfusionMatrix, PerfectIsDiagonal) {
    const std::vector<int> y{0, 1, 2, 2, 1, 0, 2};
    const auto cm = confusion_matrix(y, y, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) {
                EXPECT_EQ(cm.at(i, j), 0);
            }
    EXPECT_EQ(cm.trace(), 7);
}

TEST(ConfusionMatrix, ThreeClassFromCases) {
    const std::vector<std::vector<std::int64_t>> want{{95, 2, 3}, {9, 11, 19}, {11, 15, 15}};
    std::vector<int> t, p;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (std::int64_t n = 0; n < want[std::size_t(i)][std::size_t(j)]; ++n) {
                t.push_back(i);
                p.push_back(j);
            }
    EXPECT_EQ(confusion_matrix(t, p, 3).table(), want);
}

TEST(ConfusionMatrix, Errors) {
    const std::vector<int> a{0, 1}, b{0}, c{0, 3};
    EXPECT_THROW(confusion_matrix(a, b, 2), std::invalid_argument);
    EXPECT_THROW(confusion_matrix(a, c, 2), std::invalid_argument);
    EXPECT_THROW(confusion_matrix(b, b, 1), std::invalid_argument);
    EXPECT_THROW(ConfusionMatrix::from_counts({{1, -1}, {0, 0}}), std::invalid_argument);
}

TEST(BinaryMetrics, ScreeningSummaryValues) {
    const auto m = binary_metrics(ConfusionMatrix::from_counts({{116, 5}, {12, 23}}), 1);
    EXPECT_NEAR(*m.accuracy, 0.891, 5e-4);
    EXPECT_NEAR(*m.sensitivity, 0.657, 5e-4);
    EXPECT_NEAR(*m.specificity, 0.959, 5e-4);
    EXPECT_NEAR(*m.ppv, 0.821, 5e-4);
    EXPECT_NEAR(*m.npv, 0.906, 5e-4);
    EXPECT_EQ(m.counts.tp, 23);
    EXPECT_EQ(m.counts.fn, 12);
    EXPECT_EQ(m.counts.fp, 5);
    EXPECT_EQ(m.counts.tn, 116);
}

TEST(BinaryMetrics, F1MccYoudenFromHandArithmetic) {
    const double tp = 23, fp = 5, fn = 12, tn = 116;
    const double f1 = 2 * tp / (2 * tp + fp + fn);
    const double mcc = (tp * tn - fp * fn) / std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    const double j = tp / (tp + fn) + tn / (tn + fp) - 1;
    const auto m = binary_metrics(ConfusionMatrix::from_counts({{116, 5}, {12, 23}}), 1);
    EXPECT_NEAR(*m.f1, f1, 1e-12);
    EXPECT_NEAR(*m.mcc, mcc, 1e-12);
    EXPECT_NEAR(*m.youden_j, j, 1e-12);
    EXPECT_NEAR(*m.f1, 0.730, 5e-4);
    EXPECT_NEAR(*m.mcc, 0.669, 5e-4);
    EXPECT_NEAR(*m.youden_j, 0.616, 5e-4);
}

TEST(BinaryMetrics, PrevalenceTables) {
    const auto low = binary_metrics(ConfusionMatrix::from_counts({{95, 5}, {5, 15}}), 1);
    const auto high = binary_metrics(ConfusionMatrix::from_counts({{95, 5}, {20, 60}}), 1);
    EXPECT_DOUBLE_EQ(*low.sensitivity, 0.75);
    EXPECT_DOUBLE_EQ(*low.specificity, 0.95);
    EXPECT_DOUBLE_EQ(*low.ppv, 0.75);
    EXPECT_DOUBLE_EQ(*low.npv, 0.95);
    EXPECT_NEAR(*low.accuracy, 0.92, 5e-3);
    EXPECT_DOUBLE_EQ(*high.sensitivity, 0.75);
    EXPECT_DOUBLE_EQ(*high.specificity, 0.95);
    EXPECT_NEAR(*high.ppv, 0.92, 5e-3);
    EXPECT_NEAR(*high.npv, 0.83, 5e-3);
}

TEST(BinaryMetrics, PerfectClassifierAllOne) {
    const auto m = binary_metrics(ConfusionMatrix::from_counts({{7, 0}, {0, 4}}), 1);
    for (const auto& [name, v] : m.named()) {
        ASSERT_TRUE(v) << name;
        EXPECT_DOUBLE_EQ(*v, 1.0) << name;
    }
}

TEST(BinaryMetrics, ZeroDenominatorsAreUndefined) {
    const auto m = binary_metrics(BinaryCounts{0, 0, 10, 0});  // no positives at all
    EXPECT_FALSE(m.sensitivity);
    EXPECT_FALSE(m.ppv);
    EXPECT_FALSE(m.f1);
    EXPECT_FALSE(m.mcc);
    EXPECT_FALSE(m.youden_j);
    EXPECT_FALSE(m.dice);
    EXPECT_FALSE(m.jaccard);
    EXPECT_DOUBLE_EQ(*m.specificity, 1.0);
    EXPECT_DOUBLE_EQ(*m.accuracy, 1.0);
}

TEST(BinaryMetrics, OneVsRestCollapse) {
    const auto m = binary_metrics(three_class(), 1);  // disease A vs rest
    EXPECT_EQ(m.counts.tp, 11);
    EXPECT_EQ(m.counts.fn, 28);
    EXPECT_EQ(m.counts.fp, 17);
    EXPECT_EQ(m.counts.tn, 95 + 3 + 11 + 15);
    EXPECT_NEAR(*binary_metrics(three_class(), 0).sensitivity, 95.0 / 100.0, 1e-15);
}

TEST(BinaryMetrics, RandomisedIdentities) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        BinaryCounts c{std::int64_t(rng() % 40), std::int64_t(rng() % 40), std::int64_t(rng() % 40), std::int64_t(rng() % 40)};
        const auto m = binary_metrics(c);
        if (c.tp + c.fp + c.fn + c.tn == 0) continue;
        EXPECT_NEAR(*m.accuracy, double(c.tp + c.tn) / double(c.tp + c.fp + c.tn + c.fn), 1e-15);
        if (m.dice && m.jaccard) {
            EXPECT_NEAR(*m.dice, 2 * *m.jaccard / (1 + *m.jaccard), 1e-12);
        }
        if (c.tp + c.fp + c.fn > 0) {
            EXPECT_TRUE(m.dice && m.jaccard);
        }
        if (m.sensitivity && m.specificity) {
            EXPECT_NEAR(*m.youden_j, *m.sensitivity + *m.specificity - 1, 1e-12);
            EXPECT_NEAR(*m.balanced_accuracy, (*m.sensitivity + *m.specificity) / 2, 1e-12);
            EXPECT_NEAR(*m.balanced_accuracy, (*m.youden_j + 1) / 2, 1e-12);
        }
        EXPECT_EQ(m.precision, m.ppv);
        EXPECT_EQ(m.recall, m.sensitivity);
        // MCC symmetric under swapping both classes.
        const auto s = binary_metrics(BinaryCounts{c.tn, c.fn, c.tp, c.fp});
        ASSERT_EQ(bool(m.mcc), bool(s.mcc));
        if (m.mcc) {
            EXPECT_NEAR(*m.mcc, *s.mcc, 1e-12);
            EXPECT_GE(*m.mcc, -1 - 1e-12);
            EXPECT_LE(*m.mcc, 1 + 1e-12);
            EXPECT_EQ(std::fabs(*m.mcc - 1.0) < 1e-12, c.fp == 0 && c.fn == 0);
        }
    }
}

TEST(BinaryMetrics, RowScalingChangesOnlyPredictiveValues) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::int64_t tn = 1 + std::int64_t(rng() % 50), fp = 1 + std::int64_t(rng() % 50),
                           fn = 1 + std::int64_t(rng() % 50), tp = 1 + std::int64_t(rng() % 50);
        const auto a = binary_metrics(BinaryCounts{tp, fp, tn, fn});
        const auto b = binary_metrics(BinaryCounts{4 * tp, fp, tn, 4 * fn});
        EXPECT_NEAR(*a.sensitivity, *b.sensitivity, 1e-15);
        EXPECT_NEAR(*a.specificity, *b.specificity, 1e-15);
        EXPECT_GT(*b.ppv, *a.ppv);
        EXPECT_LT(*b.npv, *a.npv);
    }
}

TEST(MulticlassMetrics, ThreeClass) {
    const auto m = multiclass_metrics(three_class());
    EXPECT_DOUBLE_EQ(*m.recall[0], 0.95);
    EXPECT_DOUBLE_EQ(*m.recall[1], 11.0 / 39.0);
    EXPECT_DOUBLE_EQ(*m.recall[2], 15.0 / 41.0);
    EXPECT_NEAR(*m.recall[1], 0.282, 5e-4);
    EXPECT_NEAR(*m.recall[2], 0.366, 5e-4);
    EXPECT_NEAR(*m.balanced_accuracy, (0.95 + 11.0 / 39.0 + 15.0 / 41.0) / 3.0, 1e-15);
    EXPECT_NEAR(*m.balanced_accuracy, 0.533, 5e-4);
    EXPECT_DOUBLE_EQ(*m.precision[0], 95.0 / 115.0);
    EXPECT_DOUBLE_EQ(*m.accuracy, 121.0 / 180.0);
}

TEST(MulticlassMetrics, IdentityAndEmptyRows) {
    for (int c = 2; c <= 6; ++c) {
        std::vector<std::vector<std::int64_t>> t(std::size_t(c), std::vector<std::int64_t>(std::size_t(c), 0));
        for (int i = 0; i < c; ++i) t[std::size_t(i)][std::size_t(i)] = 3 + i;
        const auto m = multiclass_metrics(ConfusionMatrix::from_counts(t));
        for (const auto& r : m.recall) EXPECT_DOUBLE_EQ(*r, 1.0);
        EXPECT_DOUBLE_EQ(*m.balanced_accuracy, 1.0);
    }
    const auto m = multiclass_metrics(ConfusionMatrix::from_counts({{4, 1, 0}, {0, 0, 0}, {1, 0, 2}}));
    EXPECT_FALSE(m.recall[1]);
    EXPECT_DOUBLE_EQ(*m.precision[1], 0.0);  // one case predicted as class 1
    EXPECT_EQ(m.skipped_classes, (std::vector<int>{1}));
    EXPECT_DOUBLE_EQ(*m.balanced_accuracy, (0.8 + 2.0 / 3.0) / 2.0);
}

TEST(RegressionMetrics, Examples) {
    const std::vector<double> t{1, 2, 3};
    auto id = regression_metrics(t, t);
    EXPECT_EQ(id.mse, 0.0);
    EXPECT_EQ(id.mae, 0.0);
    EXPECT_DOUBLE_EQ(*id.pearson_r, 1.0);
    EXPECT_DOUBLE_EQ(*id.q2, 1.0);

    const std::vector<double> mean{2, 2, 2};
    EXPECT_NEAR(*regression_metrics(t, mean).q2, 0.0, 1e-15);
    EXPECT_FALSE(regression_metrics(t, mean).pearson_r);  // constant prediction

    const std::vector<double> p{1, 2, 4};
    const auto r = regression_metrics(t, p);
    EXPECT_NEAR(r.mse, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(r.mae, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(*r.q2, 0.5, 1e-15);
}

TEST(RegressionMetrics, DegenerateInputs) {
    const std::vector<double> c{5, 5, 5}, p{1, 2, 3}, one{1};
    const auto r = regression_metrics(c, p);
    EXPECT_FALSE(r.pearson_r);
    EXPECT_FALSE(r.q2);
    EXPECT_THROW(regression_metrics(one, one), std::invalid_argument);
    EXPECT_THROW(regression_metrics(c, one), std::invalid_argument);
}

TEST(RegressionMetrics, PowerMeanInequalityAndNegativeQ2) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0, 1);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> t(2 + rng() % 20), p;
        for (auto& v : t) v = g(rng);
        for (double v : t) p.push_back(3 * g(rng) - v);
        const auto r = regression_metrics(t, p);
        EXPECT_GE(r.mse + 1e-12, r.mae * r.mae);
        if (r.q2) {
            EXPECT_LE(*r.q2, 1.0);
        }
        if (r.pearson_r) {
            EXPECT_LE(std::fabs(*r.pearson_r), 1.0 + 1e-12);
        }
    }
    const std::vector<double> t{1, 2, 3}, bad{3, 2, 1};
    EXPECT_LT(*regression_metrics(t, bad).q2, 0.0);
}

TEST(BayesPosterior, ScreeningExample) {
    const double lik[] = {0.80, 0.096};
    const auto post = bayes_posterior(PriorVector({0.01, 0.99}), lik);
    EXPECT_NEAR(post.evidence, 0.10304, 1e-15);
    EXPECT_NEAR(post.posterior.values()[0], 0.008 / 0.10304, 1e-15);
    EXPECT_NEAR(post.posterior.values()[0], 0.078, 5e-4);
}

TEST(BayesPosterior, TrivialCasesAndScaling) {
    const double eq[] = {0.3, 0.3, 0.3};
    const auto u = bayes_posterior(PriorVector({1.0 / 3, 1.0 / 3, 1.0 / 3}), eq);
    for (double v : u.posterior.values()) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
    const double onezero[] = {1, 0};
    EXPECT_EQ(bayes_posterior(PriorVector({0.5, 0.5}), onezero).posterior.values(), (std::vector<double>{1, 0}));
    const double zero[] = {0, 0};
    EXPECT_THROW(bayes_posterior(PriorVector({0.5, 0.5}), zero), std::invalid_argument);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0.01, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = U(rng), b = U(rng), c = U(rng), s = 1 + 100 * U(rng);
        double p0 = U(rng);
        const PriorVector pr({p0, 1 - p0 - 0.0, 0.0});
        const double l1[] = {a, b, c}, l2[] = {a * s, b * s, c * s};
        const auto x = bayes_posterior(pr, l1).posterior.values();
        const auto y = bayes_posterior(pr, l2).posterior.values();
        EXPECT_NEAR(x[0] + x[1] + x[2], 1.0, 1e-12);
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(x[std::size_t(j)], y[std::size_t(j)], 1e-12);
    }
}
