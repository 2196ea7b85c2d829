#include <gtest/gtest.h>

#include <memory>
#include <mutex>
#include <random>
#include <set>

#include "evalkit/models.hpp"
#include "evalkit/resampling.hpp"
#include "evalkit/stages.hpp"

using namespace evalkit;

namespace {
Dataset noisy_data(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0, 1);
    Matrix x(n, d);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = int(i % 2);
        for (std::size_t k = 0; k < d; ++k) x(i, k) = g(rng) + (k == 0 ? 2.0 * y[i] : 0.0);
    }
    return Dataset(std::move(x), std::move(y), 2);
}

// Records the first-column values of every matrix it is fitted on, and
// checks at transform time that the fitted state is the only input used.
struct Canary : Transformer {
    mutable std::mutex mu;
    mutable std::vector<std::set<double>> seen;
    std::string name() const override { return "canary"; }
    struct Fitted : FittedTransform {
        Matrix transform(const Matrix& x) const override { return x; }
    };
    std::shared_ptr<const FittedTransform> fit(const Matrix& x, std::span<const int>, int) const override {
        std::set<double> s;
        for (std::size_t i = 0; i < x.rows(); ++i) s.insert(x(i, 0));
        std::lock_guard lock(mu);
        seen.push_back(std::move(s));
        return std::make_shared<Fitted>();
    }
};

// Counts rows that reach the learner.
struct RowCounter : Learner {
    mutable std::size_t rows = 0;
    std::string name() const override { return "count"; }
    std::shared_ptr<const Model> train(const Matrix& x, std::span<const int> y, int, Rng&) const override {
        rows = x.rows();
        return std::make_shared<MajorityModel>(majority_predict(y));
    }
};
}  // namespace

TEST(Standardizer, UsesTrainingStatisticsOnly) {
    Matrix train(2, 2), test(1, 2);
    train(0, 0) = 0;
    train(1, 0) = 2;
    train(0, 1) = 5;
    train(1, 1) = 5;
    test(0, 0) = 4;
    test(0, 1) = 7;
    const auto f = Standardizer().fit(train, std::vector<int>{0, 1}, 2);
    const auto z = f->transform(test);
    EXPECT_DOUBLE_EQ(z(0, 0), 3.0);  // (4 - 1) / 1
    EXPECT_DOUBLE_EQ(z(0, 1), 2.0);  // constant feature: centred only
}

TEST(CorrelationSelector, KeepsMostCorrelatedSorted) {
    Matrix x(6, 4);
    const std::vector<int> y{0, 0, 0, 1, 1, 1};
    for (std::size_t i = 0; i < 6; ++i) {
        x(i, 0) = double(i % 3);       // weak
        x(i, 1) = -3.0 * y[i];         // perfect (negative)
        x(i, 2) = 1.0;                 // constant
        x(i, 3) = y[i] + 0.1 * double(i);  // strong
    }
    const auto f = CorrelationSelector(2).fit(x, y, 2);
    const auto& cols = static_cast<const CorrelationSelector::Fitted&>(*f).columns();
    EXPECT_EQ(cols, (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(f->transform(x).cols(), 2u);
    EXPECT_THROW(CorrelationSelector(0), std::invalid_argument);
}

TEST(CorrelationSelector, TiesGoToLowerIndex) {
    Matrix x(4, 3);
    const std::vector<int> y{0, 1, 0, 1};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < 3; ++k) x(i, k) = y[i];
    const auto f = CorrelationSelector(2).fit(x, y, 2);
    EXPECT_EQ(static_cast<const CorrelationSelector::Fitted&>(*f).columns(), (std::vector<std::size_t>{0, 1}));
}

TEST(Pipeline, TransformersFitOnTrainingRowsOnly) {
    auto d = noisy_data(40, 3, 1);
    // Make the first column a unique row id so the canary can identify rows.
    Matrix x = d.features();
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, 0) = double(i);
    const Dataset data(x, d.labels(), 2);
    auto canary = std::make_shared<Canary>();
    Pipeline p(std::make_shared<GnbLearner>());
    p.then(std::shared_ptr<const Transformer>(canary));
    const auto plan = kfold_split(data, 5, true, false, 1, 9);
    const auto rep = cross_validate(data, p, plan);
    ASSERT_EQ(canary->seen.size(), plan.folds.size());
    // Folds run sequentially here, so fit order follows fold order.
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        std::set<double> train;
        for (auto i : plan.folds[f].train) train.insert(double(i));
        EXPECT_EQ(canary->seen[f], train);
    }
    EXPECT_FALSE(rep.invalid);
}

TEST(Pipeline, AugmentationOnlyTouchesTrainingData) {
    const auto d = noisy_data(30, 2, 2);
    auto counter = std::make_shared<RowCounter>();
    Pipeline p(counter);
    p.then(std::shared_ptr<const Augmenter>(std::make_shared<GaussianJitter>(2, 0.1)));
    const std::vector<std::size_t> train_idx{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    const auto train = d.subset(train_idx);
    const auto fitted = p.fit(train, 1);
    EXPECT_EQ(counter->rows, 30u);  // 10 originals + 2 jittered copies
    EXPECT_EQ(fitted.predict(d.features()).size(), d.size());
}

TEST(Pipeline, FitIsDeterministicInSeed) {
    const auto d = noisy_data(30, 2, 3);
    Pipeline p(std::make_shared<GnbLearner>());
    p.then(std::shared_ptr<const Augmenter>(std::make_shared<GaussianJitter>(1, 0.5)));
    const auto a = p.fit(d, 4), b = p.fit(d, 4), c = p.fit(d, 5);
    const auto& ma = static_cast<const GnbModel&>(a.model());
    const auto& mb = static_cast<const GnbModel&>(b.model());
    const auto& mc = static_cast<const GnbModel&>(c.model());
    EXPECT_EQ(ma.means(), mb.means());
    EXPECT_NE(ma.means(), mc.means());
}

TEST(Pipeline, DescribeAndMissingLearner) {
    Pipeline p(std::make_shared<GnbLearner>());
    p.then(std::shared_ptr<const Transformer>(std::make_shared<Standardizer>()))
        .then(std::shared_ptr<const Transformer>(std::make_shared<CorrelationSelector>(3)));
    EXPECT_EQ(p.describe(), "standardize -> select_top3 -> gnb");
    EXPECT_THROW(Pipeline().fit(noisy_data(4, 1, 1), 0), std::logic_error);
}
