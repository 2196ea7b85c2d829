#include <gtest/gtest.h>

#include <sstream>

#include "evalkit/sim.hpp"

using namespace evalkit;

namespace {
SimConfig small_config() {
    SimConfig c;
    c.dimensions = {1, 5};
    c.train_sizes = {50, 200};
    c.repetitions = 30;
    c.test_size = 20000;
    c.seed = 7;
    return c;
}
}  // namespace

TEST(TuneSeparation, HitsTargetBayesError) {
    for (std::size_t d : {1u, 2u, 3u, 5u, 9u, 50u})
        for (double e : {0.01, 0.05, 0.1, 0.3}) {
            const auto p = tune_separation(d, e);
            EXPECT_NEAR(bayes_error(p), e, 1e-12);
            EXPECT_EQ(p.dimension(), d);
            EXPECT_EQ(p.priors, (std::vector<double>{0.5, 0.5}));
        }
    EXPECT_THROW(tune_separation(0, 0.1), std::invalid_argument);
    EXPECT_THROW(tune_separation(2, 0.6), std::invalid_argument);
}

TEST(TuneSeparation, EmpiricalErrorOfBayesRule) {
    const auto p = tune_separation(3, 0.05);
    Rng rng(1);
    const auto d = sample_problem_mixture(p, 200000, rng);
    std::size_t err = 0;
    for (std::size_t i = 0; i < d.size(); ++i) err += bayes_optimal_predict(p, d.features().row(i)) != d.labels()[i];
    const double se = std::sqrt(0.05 * 0.95 / 200000.0);
    EXPECT_NEAR(double(err) / 200000.0, 0.05, 3 * se);
}

TEST(EstimatorStudy, DeterministicAndThreadIndependent) {
    auto c = small_config();
    c.dimensions = {3};
    c.train_sizes = {50};
    c.repetitions = 8;
    c.test_size = 2000;
    std::ostringstream a, b;
    write_sim_csv(a, run_estimator_study(c));
    c.threads = 3;
    write_sim_csv(b, run_estimator_study(c));
    EXPECT_EQ(a.str(), b.str());
    c.seed = 8;
    std::ostringstream other;
    write_sim_csv(other, run_estimator_study(c));
    EXPECT_NE(a.str(), other.str());
}

TEST(EstimatorStudy, DirectionsAtSmallScale) {
    const auto res = run_estimator_study(small_config());
    EXPECT_TRUE(res.skipped.empty());
    EXPECT_EQ(res.rows.size(), 8u);
    for (std::size_t d : {1u, 5u}) {
        const auto* cv50 = res.find(d, 50, "cv5");
        const auto* ho50 = res.find(d, 50, "holdout20");
        const auto* cv200 = res.find(d, 200, "cv5");
        ASSERT_TRUE(cv50 && ho50 && cv200);
        EXPECT_LT(cv50->mae, ho50->mae) << d;
        EXPECT_LT(cv200->mae, cv50->mae) << d;
        EXPECT_LT(cv50->mean_true_accuracy, 0.951);
    }
    EXPECT_GT(res.find(1, 50, "holdout20")->zero_error_fraction, 0.10);
}

TEST(EstimatorStudy, LargerTestSetChangesLittle) {
    auto c = small_config();
    c.dimensions = {1};
    c.train_sizes = {100};
    const auto a = run_estimator_study(c);
    c.test_size *= 2;
    const auto b = run_estimator_study(c);
    EXPECT_NEAR(a.rows[0].mae, b.rows[0].mae, 0.005);
    EXPECT_NEAR(a.rows[0].mean_true_accuracy, b.rows[0].mean_true_accuracy, 0.005);
}

TEST(EstimatorStudy, SkipsInfeasibleCells) {
    auto c = small_config();
    c.dimensions = {1};
    c.train_sizes = {6, 50};
    c.repetitions = 2;
    c.test_size = 100;
    const auto res = run_estimator_study(c);
    ASSERT_EQ(res.skipped.size(), 1u);
    EXPECT_NE(res.skipped[0].find("n=6"), std::string::npos);
    EXPECT_EQ(res.rows.size(), 2u);
}

TEST(EstimatorStudy, PaperScalePreset) {
    const auto c = SimConfig::paper_scale();
    EXPECT_EQ(c.repetitions, 1000u);
    EXPECT_EQ(c.test_size, 1000000u);
}
