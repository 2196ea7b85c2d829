#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "numeric.hpp"
#include "roc.hpp"

namespace evalkit {

enum class IntervalMethod { wald, wilson, clopper_pearson, hanley_mcneil, delong };

inline std::string to_string(IntervalMethod m) {
    switch (m) {
        case IntervalMethod::wald: return "wald";
        case IntervalMethod::wilson: return "wilson";
        case IntervalMethod::clopper_pearson: return "clopper_pearson";
        case IntervalMethod::hanley_mcneil: return "hanley_mcneil";
        case IntervalMethod::delong: return "delong";
    }
    return "unknown";
}

inline IntervalMethod interval_method_from_string(const std::string& s) {
    if (s == "wald") return IntervalMethod::wald;
    if (s == "wilson") return IntervalMethod::wilson;
    if (s == "clopper_pearson" || s == "clopper-pearson") return IntervalMethod::clopper_pearson;
    if (s == "hanley_mcneil" || s == "hanley-mcneil") return IntervalMethod::hanley_mcneil;
    if (s == "delong") return IntervalMethod::delong;
    throw std::invalid_argument("unknown interval method: " + s);
}

struct ConfidenceInterval {
    double point;
    double lower;
    double upper;
    double level;
    IntervalMethod method;

    double width() const { return upper - lower; }
    bool contains(double v) const { return lower <= v && v <= upper; }
};

namespace detail {
inline double two_sided_z(double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must be in (0,1)");
    return numeric::normal_quantile(0.5 + level / 2.0);
}

inline ConfidenceInterval normal_interval(double point, double se, double level, IntervalMethod method) {
    const double z = two_sided_z(level);
    const double lo = std::clamp(point - z * se, 0.0, 1.0);
    const double hi = std::clamp(point + z * se, 0.0, 1.0);
    return {point, std::min(lo, point), std::max(hi, point), level, method};
}
}  // namespace detail

/// Interval for a binomial proportion k/n.
inline ConfidenceInterval proportion_ci(std::int64_t k, std::int64_t n, double level, IntervalMethod method) {
    if (n < 1) throw std::invalid_argument("proportion_ci: n must be >= 1");
    if (k < 0 || k > n) throw std::invalid_argument("proportion_ci: k must be in [0, n]");
    const double z = detail::two_sided_z(level);
    const double nn = double(n);
    const double p = double(k) / nn;

    switch (method) {
        case IntervalMethod::wald: {
            const double half = z * std::sqrt(p * (1.0 - p) / nn);
            return {p, std::max(0.0, p - half), std::min(1.0, p + half), level, method};
        }
        case IntervalMethod::wilson: {
            const double z2 = z * z;
            const double denom = 1.0 + z2 / nn;
            const double centre = (p + z2 / (2.0 * nn)) / denom;
            const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
            double lo = std::max(0.0, centre - half);
            double hi = std::min(1.0, centre + half);
            if (k == 0) lo = 0.0;
            if (k == n) hi = 1.0;
            return {p, std::min(lo, p), std::max(hi, p), level, method};
        }
        case IntervalMethod::clopper_pearson: {
            const double alpha = 1.0 - level;
            const double lo = k == 0 ? 0.0 : numeric::incomplete_beta_inverse(double(k), double(n - k + 1), alpha / 2.0);
            const double hi = k == n ? 1.0 : numeric::incomplete_beta_inverse(double(k + 1), double(n - k), 1.0 - alpha / 2.0);
            return {p, std::min(lo, p), std::max(hi, p), level, method};
        }
        default:
            throw std::invalid_argument("proportion_ci: method is not a proportion method");
    }
}

/// Hanley-McNeil standard error of an AUC, with Q1 = A/(2-A), Q2 = 2A^2/(1+A).
inline double hanley_mcneil_se(double a, std::int64_t n_pos, std::int64_t n_neg) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("hanley_mcneil_se: auc must be in [0,1]");
    if (n_pos < 1 || n_neg < 1) throw std::invalid_argument("hanley_mcneil_se: class counts must be >= 1");
    const double q1 = a / (2.0 - a);
    const double q2 = 2.0 * a * a / (1.0 + a);
    const double var = (a * (1.0 - a) + double(n_pos - 1) * (q1 - a * a) + double(n_neg - 1) * (q2 - a * a)) /
                       (double(n_pos) * double(n_neg));
    return std::sqrt(std::max(0.0, var));
}

inline ConfidenceInterval hanley_mcneil_ci(const ScoreSet& scores, double level) {
    const double a = auc(scores);
    const double se = hanley_mcneil_se(a, std::int64_t(scores.positives()), std::int64_t(scores.negatives()));
    return detail::normal_interval(a, se, level, IntervalMethod::hanley_mcneil);
}

/// DeLong structural components. `positive_placements[i]` is the fraction of
/// negatives scored below positive i (ties 1/2); `negative_placements[j]` the
/// fraction of positives scored above negative j.
struct PlacementValues {
    std::vector<double> positive_placements;
    std::vector<double> negative_placements;
    double auc = 0.0;
};

inline PlacementValues placement_values(const ScoreSet& scores) {
    detail::require_both_classes(scores, "placement_values");
    const auto& recs = scores.records();
    std::vector<std::size_t> order(recs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return recs[a].score < recs[b].score; });

    const double n_pos = double(scores.positives());
    const double n_neg = double(scores.negatives());
    // Placement for every record, in original order; split afterwards so
    // positives and negatives keep their input order.
    std::vector<double> place(recs.size());
    double pos_below = 0.0, neg_below = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = recs[order[i]].score;
        std::size_t j = i;
        double pos_tied = 0.0, neg_tied = 0.0;
        for (; j < order.size() && recs[order[j]].score == s; ++j) (recs[order[j]].positive ? pos_tied : neg_tied) += 1.0;
        for (std::size_t t = i; t < j; ++t) {
            const auto idx = order[t];
            if (recs[idx].positive)
                place[idx] = (neg_below + 0.5 * neg_tied) / n_neg;
            else
                place[idx] = (n_pos - pos_below - pos_tied + 0.5 * pos_tied) / n_pos;
        }
        pos_below += pos_tied;
        neg_below += neg_tied;
        i = j;
    }
    PlacementValues pv;
    for (std::size_t i = 0; i < recs.size(); ++i)
        (recs[i].positive ? pv.positive_placements : pv.negative_placements).push_back(place[i]);
    // Same arithmetic as auc() so that both agree exactly.
    pv.auc = auc(scores);
    return pv;
}

namespace detail {
inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / double(v.size() - 1);
}
}  // namespace detail

inline double delong_variance(const PlacementValues& pv) {
    return detail::sample_variance(pv.positive_placements) / double(pv.positive_placements.size()) +
           detail::sample_variance(pv.negative_placements) / double(pv.negative_placements.size());
}

inline double delong_variance(const ScoreSet& scores) { return delong_variance(placement_values(scores)); }

/// Normal-approximation interval around the Mann-Whitney AUC with DeLong variance.
inline ConfidenceInterval delong_ci(const ScoreSet& scores, double level) {
    if (scores.positives() < 2 || scores.negatives() < 2)
        throw std::invalid_argument("delong_ci: need at least 2 positives and 2 negatives");
    const auto pv = placement_values(scores);
    return detail::normal_interval(pv.auc, std::sqrt(delong_variance(pv)), level, IntervalMethod::delong);
}

}  // namespace evalkit
