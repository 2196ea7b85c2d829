#pragma once

// Reference learners: Gaussian Naive Bayes, a majority-class baseline and the
// Bayes-optimal rule for Gaussian problems with known parameters.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "data.hpp"
#include "pipeline.hpp"
#include "rng.hpp"

namespace evalkit {

namespace detail {
inline constexpr double log_two_pi = 1.8378770664093454836;

// Index of the largest value; ties go to the lowest index.
inline int argmax(std::span<const double> v) {
    int best = 0;
    for (std::size_t j = 1; j < v.size(); ++j)
        if (v[j] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
    return best;
}
}  // namespace detail

struct GnbOptions {
    /// Replaces the estimated class frequencies (separate-sampling designs).
    std::optional<PriorVector> priors;
};

/// Fitted Gaussian Naive Bayes parameters. means/variances are indexed [class][feature].
class GnbModel : public Model {
public:
    GnbModel(std::vector<std::vector<double>> means, std::vector<std::vector<double>> variances, PriorVector priors,
             std::vector<std::vector<bool>> floored = {})
        : means_(std::move(means)), variances_(std::move(variances)), priors_(std::move(priors)),
          floored_(std::move(floored)) {
        if (means_.size() < 2 || means_.size() != variances_.size() || priors_.size() != means_.size())
            throw std::invalid_argument("GnbModel: inconsistent class dimensions");
        d_ = means_[0].size();
        if (d_ == 0) throw std::invalid_argument("GnbModel: no features");
        if (floored_.empty()) floored_.assign(means_.size(), std::vector<bool>(d_, false));
        const std::size_t c = means_.size();
        log_norm_.resize(c);
        inv_two_var_.resize(c);
        for (std::size_t j = 0; j < c; ++j) {
            if (means_[j].size() != d_ || variances_[j].size() != d_)
                throw std::invalid_argument("GnbModel: inconsistent feature dimensions");
            double ln = priors_[j] > 0.0 ? std::log(priors_[j]) : -std::numeric_limits<double>::infinity();
            inv_two_var_[j].resize(d_);
            for (std::size_t k = 0; k < d_; ++k) {
                const double s = variances_[j][k];
                if (!(s > 0.0)) throw std::invalid_argument("GnbModel: variances must be positive");
                ln -= 0.5 * (detail::log_two_pi + std::log(s));
                inv_two_var_[j][k] = 1.0 / (2.0 * s);
            }
            log_norm_[j] = ln;
        }
    }

    int class_count() const noexcept { return static_cast<int>(means_.size()); }
    std::size_t feature_count() const noexcept { return d_; }
    const std::vector<std::vector<double>>& means() const noexcept { return means_; }
    const std::vector<std::vector<double>>& variances() const noexcept { return variances_; }
    const PriorVector& priors() const noexcept { return priors_; }
    const std::vector<std::vector<bool>>& floored() const noexcept { return floored_; }
    bool any_floored() const {
        for (const auto& row : floored_)
            for (bool f : row)
                if (f) return true;
        return false;
    }

    /// log f_j = sum_k log G(x_k; m_jk, s_jk) + log P(j), for every class.
    std::vector<double> log_discriminants(std::span<const double> x) const {
        if (x.size() != d_) throw std::invalid_argument("GnbModel: feature dimension mismatch");
        std::vector<double> out(means_.size());
        for (std::size_t j = 0; j < means_.size(); ++j) out[j] = log_discriminant(j, x);
        return out;
    }

    int predict(std::span<const double> x) const override {
        if (x.size() != d_) throw std::invalid_argument("GnbModel: feature dimension mismatch");
        int best = 0;
        double best_v = log_discriminant(0, x);
        for (std::size_t j = 1; j < means_.size(); ++j) {
            const double v = log_discriminant(j, x);
            if (v > best_v) {
                best_v = v;
                best = static_cast<int>(j);
            }
        }
        return best;
    }

    /// Posterior probability of `positive` for two-class models.
    std::optional<double> score(std::span<const double> x, int positive) const override {
        if (means_.size() != 2) throw std::invalid_argument("gnb_score: requires a two-class model");
        if (positive != 0 && positive != 1) throw std::invalid_argument("gnb_score: positive must be 0 or 1");
        if (x.size() != d_) throw std::invalid_argument("GnbModel: feature dimension mismatch");
        const auto p = static_cast<std::size_t>(positive);
        const double diff = log_discriminant(1 - p, x) - log_discriminant(p, x);
        if (std::isnan(diff)) return 0.5;
        return 1.0 / (1.0 + std::exp(diff));
    }

private:
    double log_discriminant(std::size_t j, std::span<const double> x) const {
        double q = 0.0;
        const auto& m = means_[j];
        const auto& iv = inv_two_var_[j];
        for (std::size_t k = 0; k < d_; ++k) {
            const double e = x[k] - m[k];
            q += e * e * iv[k];
        }
        return log_norm_[j] - q;
    }

    std::vector<std::vector<double>> means_;
    std::vector<std::vector<double>> variances_;
    PriorVector priors_;
    std::vector<std::vector<bool>> floored_;
    std::size_t d_ = 0;
    std::vector<double> log_norm_;
    std::vector<std::vector<double>> inv_two_var_;
};

/// Per-class means and variances with 1/n_j normalisation; priors n_j/n.
/// Variances below 1e-9 * (global feature variance + 1e-12) are floored to it.
inline GnbModel gnb_fit(const Matrix& x, std::span<const int> y, int class_count, const GnbOptions& opts = {}) {
    if (x.rows() != y.size()) throw std::invalid_argument("gnb_fit: row/label mismatch");
    if (x.rows() == 0) throw std::invalid_argument("gnb_fit: no training rows");
    const std::size_t c = static_cast<std::size_t>(class_count);
    const std::size_t d = x.cols();
    std::vector<std::size_t> counts(c, 0);
    std::vector<std::vector<double>> mean(c, std::vector<double>(d, 0.0)), var(c, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const int yi = y[i];
        if (yi < 0 || yi >= class_count) throw std::invalid_argument("gnb_fit: label out of range");
        ++counts[static_cast<std::size_t>(yi)];
        auto row = x.row(i);
        for (std::size_t k = 0; k < d; ++k) mean[static_cast<std::size_t>(yi)][k] += row[k];
    }
    for (std::size_t j = 0; j < c; ++j) {
        if (counts[j] == 0) throw std::invalid_argument("gnb_fit: class " + std::to_string(j) + " absent from training data");
        for (auto& v : mean[j]) v /= double(counts[j]);
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto j = static_cast<std::size_t>(y[i]);
        auto row = x.row(i);
        for (std::size_t k = 0; k < d; ++k) {
            const double e = row[k] - mean[j][k];
            var[j][k] += e * e;
        }
    }
    std::vector<double> global_mean(d, 0.0), global_var(d, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < d; ++k) global_mean[k] += x(i, k);
    for (auto& v : global_mean) v /= double(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < d; ++k) global_var[k] += (x(i, k) - global_mean[k]) * (x(i, k) - global_mean[k]);
    for (auto& v : global_var) v /= double(x.rows());

    std::vector<std::vector<bool>> floored(c, std::vector<bool>(d, false));
    for (std::size_t j = 0; j < c; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            var[j][k] /= double(counts[j]);
            const double eps = 1e-9 * (global_var[k] + 1e-12);
            if (var[j][k] < eps) {
                var[j][k] = eps;
                floored[j][k] = true;
            }
        }

    std::vector<double> priors(c);
    for (std::size_t j = 0; j < c; ++j) priors[j] = double(counts[j]) / double(x.rows());
    PriorVector pv = opts.priors ? *opts.priors : PriorVector([&] {
        double s = 0.0;
        for (double p : priors) s += p;
        for (auto& p : priors) p /= s;
        return priors;
    }());
    if (pv.size() != c) throw std::invalid_argument("gnb_fit: prior override has wrong length");
    return GnbModel(std::move(mean), std::move(var), std::move(pv), std::move(floored));
}

inline GnbModel gnb_fit(const Dataset& d, const GnbOptions& opts = {}) {
    return gnb_fit(d.features(), d.labels(), d.class_count(), opts);
}

struct GnbPrediction {
    int label;
    std::vector<double> log_discriminants;
};

inline GnbPrediction gnb_predict(const GnbModel& model, std::span<const double> x) {
    auto ld = model.log_discriminants(x);
    return {detail::argmax(ld), std::move(ld)};
}

inline double gnb_score(const GnbModel& model, std::span<const double> x) { return *model.score(x, 1); }

class GnbLearner : public Learner {
public:
    explicit GnbLearner(GnbOptions opts = {}) : opts_(std::move(opts)) {}
    std::string name() const override { return "gnb"; }
    std::shared_ptr<const Model> train(const Matrix& x, std::span<const int> y, int class_count, Rng&) const override {
        return std::make_shared<GnbModel>(gnb_fit(x, y, class_count, opts_));
    }

private:
    GnbOptions opts_;
};

/// Predicts the modal training class (lowest index on ties) for every input.
class MajorityModel : public Model {
public:
    explicit MajorityModel(int label) : label_(label) {}
    int label() const noexcept { return label_; }
    int predict(std::span<const double>) const override { return label_; }
    std::optional<double> score(std::span<const double>, int positive) const override {
        return label_ == positive ? 1.0 : 0.0;
    }

private:
    int label_;
};

inline MajorityModel majority_predict(std::span<const int> training_labels) {
    if (training_labels.empty()) throw std::invalid_argument("majority_predict: no labels");
    const int max_label = *std::max_element(training_labels.begin(), training_labels.end());
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_label) + 1, 0);
    for (int y : training_labels) {
        if (y < 0) throw std::invalid_argument("majority_predict: negative label");
        ++counts[static_cast<std::size_t>(y)];
    }
    const auto it = std::max_element(counts.begin(), counts.end());  // first maximum
    return MajorityModel(static_cast<int>(it - counts.begin()));
}

class MajorityLearner : public Learner {
public:
    std::string name() const override { return "majority"; }
    std::shared_ptr<const Model> train(const Matrix&, std::span<const int> y, int, Rng&) const override {
        return std::make_shared<MajorityModel>(majority_predict(y));
    }
};

/// Class-conditional Gaussians with a shared diagonal covariance.
struct GaussianProblemSpec {
    std::vector<std::vector<double>> means;  // [class][feature]
    std::vector<double> variances;           // shared diagonal
    std::vector<double> priors;

    std::size_t dimension() const { return variances.size(); }
    std::size_t class_count() const { return means.size(); }

    void validate() const {
        if (means.size() < 2) throw std::invalid_argument("GaussianProblemSpec: need >= 2 classes");
        if (priors.size() != means.size()) throw std::invalid_argument("GaussianProblemSpec: priors length");
        if (variances.empty()) throw std::invalid_argument("GaussianProblemSpec: no dimensions");
        for (const auto& m : means)
            if (m.size() != variances.size()) throw std::invalid_argument("GaussianProblemSpec: mean length");
        for (double v : variances)
            if (!(v > 0.0)) throw std::invalid_argument("GaussianProblemSpec: variances must be positive");
        double s = 0.0;
        for (double p : priors) {
            if (!(p >= 0.0)) throw std::invalid_argument("GaussianProblemSpec: negative prior");
            s += p;
        }
        if (std::fabs(s - 1.0) > 1e-12) throw std::invalid_argument("GaussianProblemSpec: priors must sum to 1");
    }

    /// log p(x|j) + log P(j)
    double log_joint(std::size_t j, std::span<const double> x) const {
        double q = std::log(priors[j]);
        for (std::size_t k = 0; k < variances.size(); ++k) {
            const double e = x[k] - means[j][k];
            q -= 0.5 * (detail::log_two_pi + std::log(variances[k])) + e * e / (2.0 * variances[k]);
        }
        return q;
    }
};

inline int bayes_optimal_predict(const GaussianProblemSpec& problem, std::span<const double> x) {
    if (x.size() != problem.dimension()) throw std::invalid_argument("bayes_optimal_predict: dimension mismatch");
    std::vector<double> v(problem.class_count());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = problem.log_joint(j, x);
    return detail::argmax(v);
}

/// Draws exactly counts[j] rows from class j, classes in order.
inline Dataset sample_problem(const GaussianProblemSpec& problem, std::span<const std::size_t> counts, Rng& rng) {
    if (counts.size() != problem.class_count()) throw std::invalid_argument("sample_problem: counts length");
    std::size_t n = 0;
    for (auto c : counts) n += c;
    const std::size_t d = problem.dimension();
    Matrix x(n, d);
    std::vector<int> y;
    y.reserve(n);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> sd(d);
    for (std::size_t k = 0; k < d; ++k) sd[k] = std::sqrt(problem.variances[k]);
    std::size_t r = 0;
    for (std::size_t j = 0; j < counts.size(); ++j)
        for (std::size_t i = 0; i < counts[j]; ++i, ++r) {
            for (std::size_t k = 0; k < d; ++k) x(r, k) = problem.means[j][k] + sd[k] * z(rng);
            y.push_back(static_cast<int>(j));
        }
    return Dataset(std::move(x), std::move(y), static_cast<int>(problem.class_count()));
}

/// Draws n rows with class labels sampled from the priors.
inline Dataset sample_problem_mixture(const GaussianProblemSpec& problem, std::size_t n, Rng& rng) {
    std::discrete_distribution<int> cls(problem.priors.begin(), problem.priors.end());
    std::vector<std::size_t> counts(problem.class_count(), 0);
    std::vector<int> draw(n);
    for (auto& c : draw) {
        c = cls(rng);
        ++counts[static_cast<std::size_t>(c)];
    }
    const std::size_t d = problem.dimension();
    Matrix x(n, d);
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(draw[i]);
        for (std::size_t k = 0; k < d; ++k) x(i, k) = problem.means[j][k] + std::sqrt(problem.variances[k]) * z(rng);
    }
    return Dataset(std::move(x), std::move(draw), static_cast<int>(problem.class_count()));
}

}  // namespace evalkit
