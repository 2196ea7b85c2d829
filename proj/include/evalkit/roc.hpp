#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evalkit {

struct ScoreRecord {
    double score;
    bool positive;
};

/// Paired (score, binary truth) records. Higher score means "more positive".
class ScoreSet {
public:
    ScoreSet() = default;
    explicit ScoreSet(std::vector<ScoreRecord> records) : records_(std::move(records)) {
        for (const auto& r : records_) check(r.score);
    }
    ScoreSet(std::span<const double> scores, std::span<const int> truth, int positive_class = 1) {
        if (scores.size() != truth.size()) throw std::invalid_argument("ScoreSet: length mismatch");
        records_.reserve(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i) add(scores[i], truth[i] == positive_class);
    }

    static ScoreSet from_groups(std::span<const double> positives, std::span<const double> negatives) {
        ScoreSet s;
        for (double v : positives) s.add(v, true);
        for (double v : negatives) s.add(v, false);
        return s;
    }

    void add(double score, bool positive) {
        check(score);
        records_.push_back({score, positive});
    }

    const std::vector<ScoreRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    std::size_t positives() const {
        return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [](auto& r) { return r.positive; }));
    }
    std::size_t negatives() const { return size() - positives(); }
    bool has_both_classes() const { return positives() > 0 && negatives() > 0; }

    /// Negated scores, for classifiers whose low output indicates the positive class.
    ScoreSet inverted() const {
        ScoreSet s;
        s.records_.reserve(records_.size());
        for (const auto& r : records_) s.records_.push_back({-r.score, r.positive});
        return s;
    }

    /// Same scores with truth labels swapped.
    ScoreSet swapped_truth() const {
        ScoreSet s;
        s.records_.reserve(records_.size());
        for (const auto& r : records_) s.records_.push_back({r.score, !r.positive});
        return s;
    }

private:
    static void check(double score) {
        if (std::isnan(score)) throw std::invalid_argument("ScoreSet: NaN score");
    }
    std::vector<ScoreRecord> records_;
};

struct RocPoint {
    double threshold;  // classify positive iff score >= threshold
    double fpr;
    double tpr;
};

struct RocCurve {
    std::vector<RocPoint> points;  // ordered by decreasing threshold, starting at (0,0)
};

namespace detail {
inline void require_both_classes(const ScoreSet& s, const char* who) {
    if (!s.has_both_classes()) throw std::invalid_argument(std::string(who) + ": both classes must be present");
}
}  // namespace detail

/// One point per distinct score (ties grouped), plus the +inf-threshold (0,0) point.
inline RocCurve roc_curve(const ScoreSet& scores) {
    detail::require_both_classes(scores, "roc_curve");
    auto recs = scores.records();
    std::sort(recs.begin(), recs.end(), [](const ScoreRecord& a, const ScoreRecord& b) { return a.score > b.score; });
    const double n_pos = double(scores.positives());
    const double n_neg = double(scores.negatives());

    RocCurve curve;
    curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < recs.size();) {
        const double s = recs[i].score;
        for (; i < recs.size() && recs[i].score == s; ++i) (recs[i].positive ? tp : fp) += 1;
        curve.points.push_back({s, double(fp) / n_neg, double(tp) / n_pos});
    }
    return curve;
}

/// Mann-Whitney estimate: fraction of (positive, negative) pairs ranked
/// correctly, ties credited one half.
inline double auc(const ScoreSet& scores) {
    detail::require_both_classes(scores, "auc");
    auto recs = scores.records();
    std::sort(recs.begin(), recs.end(), [](const ScoreRecord& a, const ScoreRecord& b) { return a.score < b.score; });
    double credit = 0.0;  // in units of half-pairs
    double neg_below = 0.0;
    for (std::size_t i = 0; i < recs.size();) {
        const double s = recs[i].score;
        double pos_tied = 0.0, neg_tied = 0.0;
        for (; i < recs.size() && recs[i].score == s; ++i) (recs[i].positive ? pos_tied : neg_tied) += 1.0;
        credit += pos_tied * (2.0 * neg_below + neg_tied);
        neg_below += neg_tied;
    }
    return credit / (2.0 * double(scores.positives()) * double(scores.negatives()));
}

/// Trapezoidal area under a curve.
inline double trapezoid_area(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& a = curve.points[i - 1];
        const auto& b = curve.points[i];
        area += (b.fpr - a.fpr) * (b.tpr + a.tpr) / 2.0;
    }
    return area;
}

struct ThresholdChoice {
    double threshold;
    double fpr;
    double tpr;
    double objective;  // distance, J or expected cost, depending on the rule
};

namespace detail {
// Minimises `objective`; near-ties go to higher tpr, then to higher threshold.
template <class Objective>
ThresholdChoice select_point(const RocCurve& curve, Objective objective) {
    if (curve.points.empty()) throw std::invalid_argument("threshold selection: empty curve");
    constexpr double tie_tol = 1e-12;
    std::optional<ThresholdChoice> best;
    for (const auto& p : curve.points) {
        const double v = objective(p);
        const ThresholdChoice cand{p.threshold, p.fpr, p.tpr, v};
        if (!best || v < best->objective - tie_tol) {
            best = cand;
        } else if (std::fabs(v - best->objective) <= tie_tol) {
            if (p.tpr > best->tpr || (p.tpr == best->tpr && p.threshold > best->threshold)) best = cand;
        }
    }
    return *best;
}
}  // namespace detail

/// Point nearest (fpr, tpr) = (0, 1); objective is the Euclidean distance.
inline ThresholdChoice threshold_closest_topleft(const RocCurve& curve) {
    return detail::select_point(curve, [](const RocPoint& p) { return std::hypot(p.fpr, 1.0 - p.tpr); });
}

/// Point maximising Youden's J = tpr - fpr; objective is J.
inline ThresholdChoice threshold_max_youden(const RocCurve& curve) {
    auto c = detail::select_point(curve, [](const RocPoint& p) { return -(p.tpr - p.fpr); });
    c.objective = c.tpr - c.fpr;
    return c;
}

/// Point minimising prevalence*(1-tpr)*cost_fn + (1-prevalence)*fpr*cost_fp.
inline ThresholdChoice threshold_min_cost(const RocCurve& curve, double cost_fp, double cost_fn, double prevalence) {
    if (!(prevalence > 0.0 && prevalence < 1.0)) throw std::invalid_argument("threshold_min_cost: prevalence must be in (0,1)");
    if (!(cost_fp >= 0.0 && cost_fn >= 0.0) || !(cost_fp + cost_fn > 0.0))
        throw std::invalid_argument("threshold_min_cost: costs must be non-negative and not both zero");
    return detail::select_point(curve, [&](const RocPoint& p) {
        return prevalence * (1.0 - p.tpr) * cost_fn + (1.0 - prevalence) * p.fpr * cost_fp;
    });
}

/// Concatenates fold score sets and builds a single curve.
inline ScoreSet pool_scores(std::span<const ScoreSet> folds) {
    if (folds.empty()) throw std::invalid_argument("pool_rocs: no folds");
    std::vector<ScoreRecord> all;
    for (const auto& f : folds) all.insert(all.end(), f.records().begin(), f.records().end());
    return ScoreSet(std::move(all));
}

inline RocCurve pool_rocs(std::span<const ScoreSet> folds) { return roc_curve(pool_scores(folds)); }

struct AucAverage {
    std::optional<double> mean;
    std::optional<double> sd;               // sample sd; needs two usable folds
    std::vector<std::optional<double>> per_fold;  // nullopt for single-class folds
    std::vector<std::size_t> excluded_folds;
};

inline AucAverage average_aucs(std::span<const ScoreSet> folds) {
    AucAverage out;
    std::vector<double> vals;
    for (std::size_t i = 0; i < folds.size(); ++i) {
        if (!folds[i].has_both_classes()) {
            out.per_fold.push_back(std::nullopt);
            out.excluded_folds.push_back(i);
            continue;
        }
        const double a = auc(folds[i]);
        out.per_fold.push_back(a);
        vals.push_back(a);
    }
    if (!vals.empty()) {
        double m = 0.0;
        for (double v : vals) m += v;
        m /= double(vals.size());
        out.mean = m;
        if (vals.size() >= 2) {
            double ss = 0.0;
            for (double v : vals) ss += (v - m) * (v - m);
            out.sd = std::sqrt(ss / double(vals.size() - 1));
        }
    }
    return out;
}

}  // namespace evalkit
