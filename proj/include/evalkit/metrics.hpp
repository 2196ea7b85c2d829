#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "data.hpp"

namespace evalkit {

/// A measure that is undefined when its denominator is zero.
using Measure = std::optional<double>;

namespace detail {
inline Measure ratio(double num, double den) {
    if (den == 0.0) return std::nullopt;
    return num / den;
}
}  // namespace detail

/// c x c count table; entry (i, j) counts cases of true class i predicted as j.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int class_count)
        : c_(class_count), counts_(static_cast<std::size_t>(class_count) * class_count, 0) {
        if (class_count < 2) throw std::invalid_argument("ConfusionMatrix: class_count must be >= 2");
    }

    /// Builds from a row-major table of counts.
    static ConfusionMatrix from_counts(const std::vector<std::vector<std::int64_t>>& table) {
        ConfusionMatrix cm(static_cast<int>(table.size()));
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (table[i].size() != table.size()) throw std::invalid_argument("ConfusionMatrix: table not square");
            for (std::size_t j = 0; j < table.size(); ++j) {
                if (table[i][j] < 0) throw std::invalid_argument("ConfusionMatrix: negative count");
                cm.at(static_cast<int>(i), static_cast<int>(j)) = table[i][j];
            }
        }
        return cm;
    }

    int class_count() const noexcept { return c_; }
    std::int64_t& at(int truth, int predicted) { return counts_[index(truth, predicted)]; }
    std::int64_t at(int truth, int predicted) const { return counts_[index(truth, predicted)]; }

    std::int64_t total() const { return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0}); }
    std::int64_t trace() const {
        std::int64_t t = 0;
        for (int i = 0; i < c_; ++i) t += at(i, i);
        return t;
    }
    std::int64_t row_sum(int i) const {
        std::int64_t s = 0;
        for (int j = 0; j < c_; ++j) s += at(i, j);
        return s;
    }
    std::int64_t col_sum(int j) const {
        std::int64_t s = 0;
        for (int i = 0; i < c_; ++i) s += at(i, j);
        return s;
    }

    std::vector<std::vector<std::int64_t>> table() const {
        std::vector<std::vector<std::int64_t>> t(static_cast<std::size_t>(c_));
        for (int i = 0; i < c_; ++i)
            for (int j = 0; j < c_; ++j) t[static_cast<std::size_t>(i)].push_back(at(i, j));
        return t;
    }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::size_t index(int i, int j) const {
        if (i < 0 || j < 0 || i >= c_ || j >= c_) throw std::out_of_range("ConfusionMatrix: class index");
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(c_) + static_cast<std::size_t>(j);
    }

    int c_;
    std::vector<std::int64_t> counts_;
};

inline ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                        int class_count) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("confusion_matrix: length mismatch");
    if (truth.empty()) throw std::invalid_argument("confusion_matrix: empty input");
    ConfusionMatrix cm(class_count);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= class_count || predicted[i] < 0 || predicted[i] >= class_count)
            throw std::invalid_argument("confusion_matrix: label out of range at index " + std::to_string(i));
        ++cm.at(truth[i], predicted[i]);
    }
    return cm;
}

/// One-vs-rest counts for a designated positive class.
struct BinaryCounts {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline BinaryCounts collapse(const ConfusionMatrix& cm, int positive) {
    BinaryCounts b;
    b.tp = cm.at(positive, positive);
    b.fn = cm.row_sum(positive) - b.tp;
    b.fp = cm.col_sum(positive) - b.tp;
    b.tn = cm.total() - b.tp - b.fn - b.fp;
    return b;
}

struct BinaryMetricBundle {
    BinaryCounts counts;
    Measure accuracy, sensitivity, specificity, ppv, npv, precision, recall, f1, balanced_accuracy,
        youden_j, mcc, dice, jaccard;

    /// (name, value) pairs in a fixed reporting order.
    std::vector<std::pair<std::string, Measure>> named() const {
        return {{"accuracy", accuracy},       {"sensitivity", sensitivity},
                {"specificity", specificity}, {"ppv", ppv},
                {"npv", npv},                 {"precision", precision},
                {"recall", recall},           {"f1", f1},
                {"balanced_accuracy", balanced_accuracy},
                {"youden_j", youden_j},       {"mcc", mcc},
                {"dice", dice},               {"jaccard", jaccard}};
    }
};

inline BinaryMetricBundle binary_metrics(const BinaryCounts& c) {
    const double tp = double(c.tp), fp = double(c.fp), tn = double(c.tn), fn = double(c.fn);
    BinaryMetricBundle m;
    m.counts = c;
    m.accuracy = detail::ratio(tp + tn, tp + tn + fp + fn);
    m.sensitivity = detail::ratio(tp, tp + fn);
    m.specificity = detail::ratio(tn, tn + fp);
    m.ppv = detail::ratio(tp, tp + fp);
    m.npv = detail::ratio(tn, tn + fn);
    m.precision = m.ppv;
    m.recall = m.sensitivity;
    // harmonic mean of precision and recall, written in counts: 2TP / (2TP + FP + FN)
    if (m.precision && m.recall) m.f1 = detail::ratio(2.0 * tp, 2.0 * tp + fp + fn);
    if (m.sensitivity && m.specificity) {
        m.balanced_accuracy = (*m.sensitivity + *m.specificity) / 2.0;
        m.youden_j = *m.sensitivity + *m.specificity - 1.0;
    }
    const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (den > 0.0) m.mcc = (tp * tn - fp * fn) / std::sqrt(den);
    m.dice = detail::ratio(2.0 * tp, 2.0 * tp + fp + fn);
    m.jaccard = detail::ratio(tp, tp + fp + fn);
    return m;
}

/// Measures for `positive` against all other classes merged.
inline BinaryMetricBundle binary_metrics(const ConfusionMatrix& cm, int positive) {
    if (positive < 0 || positive >= cm.class_count())
        throw std::invalid_argument("binary_metrics: positive class out of range");
    return binary_metrics(collapse(cm, positive));
}

struct MulticlassMetrics {
    std::vector<Measure> recall;     // per true class (row)
    std::vector<Measure> precision;  // per predicted class (column)
    Measure accuracy;
    Measure balanced_accuracy;       // mean recall over classes with non-empty rows
    std::vector<int> skipped_classes;
};

inline MulticlassMetrics multiclass_metrics(const ConfusionMatrix& cm) {
    MulticlassMetrics m;
    const int c = cm.class_count();
    double recall_sum = 0.0;
    int recall_n = 0;
    for (int i = 0; i < c; ++i) {
        auto r = detail::ratio(double(cm.at(i, i)), double(cm.row_sum(i)));
        m.recall.push_back(r);
        m.precision.push_back(detail::ratio(double(cm.at(i, i)), double(cm.col_sum(i))));
        if (r) {
            recall_sum += *r;
            ++recall_n;
        } else {
            m.skipped_classes.push_back(i);
        }
    }
    m.accuracy = detail::ratio(double(cm.trace()), double(cm.total()));
    if (recall_n > 0) m.balanced_accuracy = recall_sum / recall_n;
    return m;
}

struct RegressionMetricBundle {
    double mse = 0.0;
    double mae = 0.0;
    Measure pearson_r;
    Measure q2;
};

/// MSE, MAE, Pearson r and Q^2, all with 1/N normalisation.
inline RegressionMetricBundle regression_metrics(std::span<const double> truth, std::span<const double> predicted) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("regression_metrics: length mismatch");
    if (truth.size() < 2) throw std::invalid_argument("regression_metrics: need at least 2 values");
    const double n = double(truth.size());
    double m = 0.0, mh = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        m += truth[i];
        mh += predicted[i];
    }
    m /= n;
    mh /= n;
    double sse = 0.0, sae = 0.0, syy = 0.0, shh = 0.0, syh = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = predicted[i] - truth[i];
        sse += e * e;
        sae += std::fabs(e);
        const double dy = truth[i] - m;
        const double dh = predicted[i] - mh;
        syy += dy * dy;
        shh += dh * dh;
        syh += dy * dh;
    }
    RegressionMetricBundle r;
    r.mse = sse / n;
    r.mae = sae / n;
    if (syy > 0.0) {
        r.q2 = 1.0 - (sse / n) / (syy / n);
        if (shh > 0.0) {
            const double s = std::sqrt(syy / n), sh = std::sqrt(shh / n);
            r.pearson_r = std::clamp((syh / n) / (s * sh), -1.0, 1.0);
        }
    }
    return r;
}

struct Posterior {
    PriorVector posterior;
    double evidence;  // sum_k likelihood_k * prior_k
};

/// Bayes rule: posterior_j = likelihood_j * prior_j / evidence.
inline Posterior bayes_posterior(const PriorVector& priors, std::span<const double> likelihoods) {
    if (likelihoods.size() != priors.size()) throw std::invalid_argument("bayes_posterior: size mismatch");
    double evidence = 0.0;
    for (std::size_t j = 0; j < likelihoods.size(); ++j) {
        if (!(likelihoods[j] >= 0.0)) throw std::invalid_argument("bayes_posterior: negative likelihood");
        evidence += likelihoods[j] * priors[j];
    }
    if (!(evidence > 0.0)) throw std::invalid_argument("bayes_posterior: zero evidence");
    std::vector<double> post(likelihoods.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < post.size(); ++j) {
        post[j] = likelihoods[j] * priors[j] / evidence;
        sum += post[j];
    }
    for (auto& p : post) p /= sum;
    return {PriorVector(std::move(post)), evidence};
}

}  // namespace evalkit
