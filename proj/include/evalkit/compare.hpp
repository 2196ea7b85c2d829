#pragma once

// Significance tests for comparing two learners or two AUCs. Every test is
// two-sided and antisymmetric in the order of its inputs: swapping A and B
// negates the statistic and leaves the p-value unchanged. Degenerate inputs
// (zero variance) give flagged results instead of exceptions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "intervals.hpp"
#include "numeric.hpp"
#include "roc.hpp"

namespace evalkit {

struct TestResult {
    std::string test;
    double statistic = 0.0;
    double p_value = 1.0;
    std::optional<double> df;
    bool degenerate = false;
    std::string note;
    std::map<std::string, double> inputs;  // counts, sizes, component estimates
};

inline constexpr std::int64_t mcnemar_exact_below = 25;

/// McNemar test on paired predictions. n01 counts cases A got right and B
/// wrong, n10 the reverse. The statistic is the signed, continuity-corrected
/// z = sign(n01 - n10) * max(0, |n01 - n10| - 1) / sqrt(n01 + n10), whose
/// square is the usual chi-square. Below 25 discordant pairs the p-value is
/// the exact two-sided binomial tail.
inline TestResult mcnemar(std::span<const int> truth, std::span<const int> pred_a, std::span<const int> pred_b) {
    if (truth.size() != pred_a.size() || truth.size() != pred_b.size())
        throw std::invalid_argument("mcnemar: length mismatch");
    std::int64_t n01 = 0, n10 = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool a = pred_a[i] == truth[i];
        const bool b = pred_b[i] == truth[i];
        if (a && !b) ++n01;
        if (!a && b) ++n10;
    }
    TestResult r;
    r.test = "mcnemar";
    r.inputs = {{"n", double(truth.size())}, {"n01", double(n01)}, {"n10", double(n10)}};
    const std::int64_t nd = n01 + n10;
    if (nd == 0) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        r.degenerate = true;
        r.note = "no discordant pairs";
        return r;
    }
    const double diff = double(n01 - n10);
    const double corrected = std::max(0.0, std::fabs(diff) - 1.0);
    r.statistic = (diff < 0 ? -1.0 : 1.0) * corrected / std::sqrt(double(nd));
    r.inputs["chi_square"] = corrected * corrected / double(nd);
    if (nd < mcnemar_exact_below) {
        r.p_value = std::min(1.0, 2.0 * numeric::binomial_half_cdf(std::min(n01, n10), nd));
        r.note = "exact binomial";
    } else {
        r.df = 1.0;
        r.p_value = numeric::normal_two_sided(r.statistic);  // chi-square(1) tail of z^2
        r.note = "continuity-corrected chi-square";
    }
    return r;
}

namespace detail {
inline double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}
inline double sample_var_of(std::span<const double> v) {
    // Constant input has zero variance exactly; the two-pass sum below would
    // leave rounding noise when the mean is not representable.
    if (std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end()) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / double(v.size() - 1);
}

inline TestResult t_from_variance(std::string name, double mean, double scaled_var, double df) {
    TestResult r;
    r.test = std::move(name);
    r.df = df;
    if (!(scaled_var > 0.0)) {
        r.degenerate = true;
        if (mean == 0.0) {
            r.statistic = 0.0;
            r.p_value = 1.0;
            r.note = "zero variance and zero mean difference";
        } else {
            r.statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
            r.p_value = 0.0;
            r.note = "zero variance with nonzero mean difference";
        }
        return r;
    }
    r.statistic = mean / std::sqrt(scaled_var);
    r.p_value = numeric::student_t_two_sided(r.statistic, df);
    return r;
}
}  // namespace detail

/// Resampled t-test with the variance correction for overlapping training
/// sets: t = mean(d) / sqrt((1/J + n_test/n_train) * var(d)), J - 1 df.
inline TestResult corrected_resampled_t(std::span<const double> differences, std::size_t n_train, std::size_t n_test) {
    if (differences.size() < 2) throw std::invalid_argument("corrected_resampled_t: need >= 2 differences");
    if (n_train == 0 || n_test == 0) throw std::invalid_argument("corrected_resampled_t: sizes must be positive");
    const double j = double(differences.size());
    const double m = detail::mean_of(differences);
    const double v = detail::sample_var_of(differences);
    auto r = detail::t_from_variance("corrected_resampled_t", m, (1.0 / j + double(n_test) / double(n_train)) * v, j - 1.0);
    r.inputs = {{"repetitions", j}, {"n_train", double(n_train)}, {"n_test", double(n_test)}, {"mean_difference", m},
                {"variance", v}};
    return r;
}

/// The naive version that treats resamples as independent:
/// t = mean(d) / sqrt(var(d) / J). Kept for comparison; it is known to be
/// anti-conservative.
inline TestResult uncorrected_resampled_t(std::span<const double> differences) {
    if (differences.size() < 2) throw std::invalid_argument("uncorrected_resampled_t: need >= 2 differences");
    const double j = double(differences.size());
    const double m = detail::mean_of(differences);
    const double v = detail::sample_var_of(differences);
    auto r = detail::t_from_variance("uncorrected_resampled_t", m, v / j, j - 1.0);
    r.inputs = {{"repetitions", j}, {"mean_difference", m}, {"variance", v}};
    return r;
}

/// Corrected repeated k-fold CV test: all r*k fold differences enter one
/// corrected t statistic (J = r*k, J - 1 df); repeats are not treated as
/// independent replications.
inline TestResult corrected_repeated_kfold_t(std::span<const double> fold_differences, std::size_t repeats,
                                             std::size_t k, std::size_t n_train, std::size_t n_test) {
    if (repeats * k != fold_differences.size())
        throw std::invalid_argument("corrected_repeated_kfold_t: expected repeats*k differences");
    if (fold_differences.size() < 2) throw std::invalid_argument("corrected_repeated_kfold_t: need >= 2 differences");
    auto r = corrected_resampled_t(fold_differences, n_train, n_test);
    r.test = "corrected_repeated_kfold_t";
    r.inputs["repeats"] = double(repeats);
    r.inputs["k"] = double(k);
    return r;
}

/// 5x2 CV paired t-test. `d[i][j]` is the difference on fold j of
/// replication i; t = d[0][0] / sqrt(mean_i s_i^2), 5 df.
inline TestResult five_by_two_cv_test(const std::vector<std::vector<double>>& d) {
    if (d.size() != 5) throw std::invalid_argument("five_by_two_cv_test: need 5 replications");
    double s2 = 0.0;
    for (const auto& row : d) {
        if (row.size() != 2) throw std::invalid_argument("five_by_two_cv_test: need 2 folds per replication");
        const double m = (row[0] + row[1]) / 2.0;
        s2 += (row[0] - m) * (row[0] - m) + (row[1] - m) * (row[1] - m);
    }
    auto r = detail::t_from_variance("five_by_two_cv", d[0][0], s2 / 5.0, 5.0);
    r.inputs = {{"d11", d[0][0]}, {"mean_variance", s2 / 5.0}};
    return r;
}

/// Paired DeLong test for two scorers evaluated on the same samples.
inline TestResult delong_test(const ScoreSet& a, const ScoreSet& b) {
    if (a.size() != b.size()) throw std::invalid_argument("delong_test: score sets differ in size");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.records()[i].positive != b.records()[i].positive)
            throw std::invalid_argument("delong_test: truth labels differ at record " + std::to_string(i));
    if (a.positives() < 2 || a.negatives() < 2) throw std::invalid_argument("delong_test: need >= 2 of each class");

    const auto pa = placement_values(a);
    const auto pb = placement_values(b);
    auto cov = [](const std::vector<double>& x, const std::vector<double>& y) {
        const double mx = detail::mean_of(x), my = detail::mean_of(y);
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
        return s / double(x.size() - 1);
    };
    const double m = double(pa.positive_placements.size());
    const double n = double(pa.negative_placements.size());
    const double var_a = cov(pa.positive_placements, pa.positive_placements) / m + cov(pa.negative_placements, pa.negative_placements) / n;
    const double var_b = cov(pb.positive_placements, pb.positive_placements) / m + cov(pb.negative_placements, pb.negative_placements) / n;
    const double cov_ab = cov(pa.positive_placements, pb.positive_placements) / m + cov(pa.negative_placements, pb.negative_placements) / n;
    const double var_diff = var_a + var_b - 2.0 * cov_ab;
    const double diff = pa.auc - pb.auc;

    TestResult r;
    r.test = "delong";
    r.inputs = {{"auc_a", pa.auc}, {"auc_b", pb.auc}, {"var_a", var_a}, {"var_b", var_b}, {"cov_ab", cov_ab},
                {"n_pos", m}, {"n_neg", n}};
    // Relative tolerance: identical scorers give var_diff of rounding size.
    const double scale = std::max({var_a, var_b, 1e-300});
    if (!(var_diff > 1e-12 * scale)) {
        r.degenerate = true;
        if (diff == 0.0) {
            r.statistic = 0.0;
            r.p_value = 1.0;
            r.note = "variance of the AUC difference is zero";
        } else {
            r.statistic = std::copysign(std::numeric_limits<double>::infinity(), diff);
            r.p_value = 0.0;
            r.note = "zero variance with nonzero AUC difference";
        }
        return r;
    }
    r.statistic = diff / std::sqrt(var_diff);
    r.p_value = numeric::normal_two_sided(r.statistic);
    return r;
}

}  // namespace evalkit
