#pragma once

// Leakage-safe model pipelines. A Pipeline is an ordered list of stages and a
// terminal learner. Fitting happens only through Pipeline::fit, which sees
// training rows only; the resulting FittedPipeline is immutable and applies
// the train-fitted transforms to any data. Augmenters act during fit only, so
// test data always passes through them unchanged.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "data.hpp"
#include "rng.hpp"

namespace evalkit {

class Model {
public:
    virtual ~Model() = default;
    virtual int predict(std::span<const double> x) const = 0;
    /// Continuous score for `positive` (higher = more positive), if the model has one.
    virtual std::optional<double> score(std::span<const double> /*x*/, int /*positive*/) const { return std::nullopt; }
};

class Learner {
public:
    virtual ~Learner() = default;
    virtual std::string name() const = 0;
    virtual std::shared_ptr<const Model> train(const Matrix& x, std::span<const int> y, int class_count,
                                               Rng& rng) const = 0;
};

class FittedTransform {
public:
    virtual ~FittedTransform() = default;
    virtual Matrix transform(const Matrix& x) const = 0;
};

/// A fit-time transform (scaling, feature selection, imputation, ...).
class Transformer {
public:
    virtual ~Transformer() = default;
    virtual std::string name() const = 0;
    virtual std::shared_ptr<const FittedTransform> fit(const Matrix& x, std::span<const int> y,
                                                       int class_count) const = 0;
};

/// Training-set-only data augmentation.
class Augmenter {
public:
    virtual ~Augmenter() = default;
    virtual std::string name() const = 0;
    virtual void augment(Matrix& x, std::vector<int>& y, Rng& rng) const = 0;
};

using Stage = std::variant<std::shared_ptr<const Transformer>, std::shared_ptr<const Augmenter>>;

class FittedPipeline {
public:
    FittedPipeline(std::vector<std::shared_ptr<const FittedTransform>> transforms, std::shared_ptr<const Model> model)
        : transforms_(std::move(transforms)), model_(std::move(model)) {}

    Matrix transform(const Matrix& x) const {
        Matrix out = x;
        for (const auto& t : transforms_) out = t->transform(out);
        return out;
    }

    std::vector<int> predict(const Matrix& x) const {
        const Matrix z = transform(x);
        std::vector<int> out(z.rows());
        for (std::size_t i = 0; i < z.rows(); ++i) out[i] = model_->predict(z.row(i));
        return out;
    }

    /// Scores for every row, or nullopt if the model does not produce scores.
    std::optional<std::vector<double>> scores(const Matrix& x, int positive) const {
        const Matrix z = transform(x);
        std::vector<double> out(z.rows());
        for (std::size_t i = 0; i < z.rows(); ++i) {
            auto s = model_->score(z.row(i), positive);
            if (!s) return std::nullopt;
            out[i] = *s;
        }
        return out;
    }

    const Model& model() const { return *model_; }

private:
    std::vector<std::shared_ptr<const FittedTransform>> transforms_;
    std::shared_ptr<const Model> model_;
};

class Pipeline {
public:
    Pipeline() = default;
    explicit Pipeline(std::shared_ptr<const Learner> learner) : learner_(std::move(learner)) {}
    Pipeline(std::vector<Stage> stages, std::shared_ptr<const Learner> learner)
        : stages_(std::move(stages)), learner_(std::move(learner)) {}

    Pipeline& then(std::shared_ptr<const Transformer> t) {
        stages_.emplace_back(std::move(t));
        return *this;
    }
    Pipeline& then(std::shared_ptr<const Augmenter> a) {
        stages_.emplace_back(std::move(a));
        return *this;
    }

    const std::vector<Stage>& stages() const noexcept { return stages_; }
    const std::shared_ptr<const Learner>& learner() const noexcept { return learner_; }

    std::string describe() const {
        std::string s;
        for (const auto& st : stages_) {
            s += std::visit([](const auto& p) { return p->name(); }, st);
            s += " -> ";
        }
        return s + (learner_ ? learner_->name() : std::string("<no learner>"));
    }

    /// Fits every stage on the given (training) rows, in order.
    FittedPipeline fit(const Matrix& x, std::span<const int> y, int class_count, std::uint64_t seed) const {
        if (!learner_) throw std::logic_error("Pipeline has no learner");
        if (x.rows() != y.size()) throw std::invalid_argument("Pipeline::fit: row/label mismatch");
        Rng rng(seed);
        Matrix cur = x;
        std::vector<int> labels(y.begin(), y.end());
        std::vector<std::shared_ptr<const FittedTransform>> fitted;
        for (const auto& st : stages_) {
            if (auto t = std::get_if<std::shared_ptr<const Transformer>>(&st)) {
                auto f = (*t)->fit(cur, labels, class_count);
                cur = f->transform(cur);
                fitted.push_back(std::move(f));
            } else {
                std::get<std::shared_ptr<const Augmenter>>(st)->augment(cur, labels, rng);
            }
        }
        auto model = learner_->train(cur, labels, class_count, rng);
        return FittedPipeline(std::move(fitted), std::move(model));
    }

    FittedPipeline fit(const Dataset& d, std::uint64_t seed) const {
        return fit(d.features(), d.labels(), d.class_count(), seed);
    }

    /// Fits the leading transformer stages once on `x` (writing the
    /// transformed rows to `transformed`) and returns the remaining pipeline.
    /// Used only by the deliberately unsafe evaluation mode that reproduces
    /// the peeking bias.
    Pipeline prefit_leading_transformers(const Matrix& x, std::span<const int> y, int class_count,
                                         Matrix& transformed) const {
        transformed = x;
        std::size_t i = 0;
        for (; i < stages_.size(); ++i) {
            auto t = std::get_if<std::shared_ptr<const Transformer>>(&stages_[i]);
            if (!t) break;
            transformed = (*t)->fit(transformed, y, class_count)->transform(transformed);
        }
        return Pipeline(std::vector<Stage>(stages_.begin() + static_cast<long>(i), stages_.end()), learner_);
    }

private:
    std::vector<Stage> stages_;
    std::shared_ptr<const Learner> learner_;
};

}  // namespace evalkit
