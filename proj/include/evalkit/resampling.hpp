#pragma once

// Split-plan generators, leakage-safe cross-validation, nested CV and
// bootstrap error estimation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "data.hpp"
#include "intervals.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "rng.hpp"
#include "roc.hpp"

namespace evalkit {

enum class SplitKind { holdout, kfold, custom };

inline std::string to_string(SplitKind k) {
    switch (k) {
        case SplitKind::holdout: return "holdout";
        case SplitKind::kfold: return "kfold";
        case SplitKind::custom: return "custom";
    }
    return "unknown";
}

inline SplitKind split_kind_from_string(const std::string& s) {
    if (s == "holdout") return SplitKind::holdout;
    if (s == "kfold") return SplitKind::kfold;
    if (s == "custom") return SplitKind::custom;
    throw std::invalid_argument("unknown split kind: " + s);
}

struct SplitScheme {
    SplitKind kind = SplitKind::kfold;
    std::size_t k = 5;
    std::size_t repeats = 1;
    bool stratified = false;
    bool grouped = false;
    double test_fraction = 0.0;  // holdout only
    std::uint64_t seed = 0;
};

struct Fold {
    std::size_t repeat = 0;
    std::size_t index = 0;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Explicit, auditable list of train/test index sets.
struct SplitPlan {
    SplitScheme scheme;
    std::size_t sample_count = 0;
    std::vector<Fold> folds;
    std::vector<std::string> warnings;
};

inline constexpr std::size_t default_k = 5;
inline constexpr std::size_t repeat_warning_threshold = 10;

namespace detail {

// Independence units: groups (first-appearance order) or single samples.
struct Units {
    std::vector<std::vector<std::size_t>> members;
    std::vector<int> label;  // majority label per unit, lowest index on ties
};

inline Units make_units(const Dataset& d, bool grouped) {
    Units u;
    if (!grouped) {
        u.members.resize(d.size());
        u.label.resize(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            u.members[i] = {i};
            u.label[i] = d.labels()[i];
        }
        return u;
    }
    if (!d.has_groups()) throw std::invalid_argument("grouped split requested but dataset has no groups");
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto [it, inserted] = index.try_emplace(d.groups()[i], u.members.size());
        if (inserted) u.members.emplace_back();
        u.members[it->second].push_back(i);
    }
    const auto c = static_cast<std::size_t>(d.class_count());
    for (const auto& m : u.members) {
        std::vector<std::size_t> counts(c, 0);
        for (auto i : m) ++counts[static_cast<std::size_t>(d.labels()[i])];
        u.label.push_back(static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin()));
    }
    return u;
}

inline Fold make_fold(const Units& u, const std::vector<bool>& unit_in_test, std::size_t repeat, std::size_t index) {
    Fold f;
    f.repeat = repeat;
    f.index = index;
    for (std::size_t g = 0; g < u.members.size(); ++g)
        for (auto i : u.members[g]) (unit_in_test[g] ? f.test : f.train).push_back(i);
    std::sort(f.train.begin(), f.train.end());
    std::sort(f.test.begin(), f.test.end());
    return f;
}

inline std::vector<std::vector<std::size_t>> units_by_class(const Units& u, int class_count) {
    std::vector<std::vector<std::size_t>> b(static_cast<std::size_t>(class_count));
    for (std::size_t g = 0; g < u.label.size(); ++g) b[static_cast<std::size_t>(u.label[g])].push_back(g);
    return b;
}

inline std::vector<std::string> mixed_group_warnings(const Dataset& d, const Units& u, bool grouped) {
    std::vector<std::string> w;
    if (!grouped) return w;
    std::size_t mixed = 0;
    std::string first;
    for (std::size_t g = 0; g < u.members.size(); ++g) {
        const int l0 = d.labels()[u.members[g].front()];
        for (auto i : u.members[g])
            if (d.labels()[i] != l0) {
                if (mixed++ == 0) first = d.groups()[u.members[g].front()];
                break;
            }
    }
    if (mixed)
        w.push_back(std::to_string(mixed) + " group(s) span more than one class (first: '" + first +
                    "'); stratification uses each group's majority label");
    return w;
}

inline std::size_t round_half_up(double v) { return static_cast<std::size_t>(std::floor(v + 0.5)); }

}  // namespace detail

/// Single randomized train/test split, optionally stratified; grouped splits
/// move whole groups.
inline SplitPlan holdout_split(const Dataset& d, double test_fraction, bool stratified, std::uint64_t seed,
                               bool grouped = false) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw std::invalid_argument("holdout_split: fraction must be in (0,1)");
    const auto units = detail::make_units(d, grouped);
    const std::size_t u = units.members.size();
    SplitPlan plan;
    plan.scheme = {SplitKind::holdout, 1, 1, stratified, grouped, test_fraction, seed};
    plan.sample_count = d.size();
    plan.warnings = detail::mixed_group_warnings(d, units, grouped);

    Rng rng = make_rng(seed, {0});
    std::vector<bool> in_test(u, false);
    if (stratified) {
        auto buckets = detail::units_by_class(units, d.class_count());
        for (std::size_t j = 0; j < buckets.size(); ++j) {
            auto& b = buckets[j];
            if (b.empty()) continue;
            std::shuffle(b.begin(), b.end(), rng);
            if (b.size() == 1) {
                plan.warnings.push_back("class " + std::to_string(j) +
                                        " has a single unit; assigned to the training set");
                continue;
            }
            const std::size_t n_test = std::min(detail::round_half_up(double(b.size()) * test_fraction), b.size() - 1);
            for (std::size_t i = 0; i < n_test; ++i) in_test[b[i]] = true;
        }
    } else {
        std::vector<std::size_t> order(u);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t n_test = detail::round_half_up(double(u) * test_fraction);
        for (std::size_t i = 0; i < n_test && i < u; ++i) in_test[order[i]] = true;
    }
    const auto n_test_units = static_cast<std::size_t>(std::count(in_test.begin(), in_test.end(), true));
    if (n_test_units == 0 || n_test_units == u)
        throw std::invalid_argument("holdout_split: test fraction leaves an empty training or test set");
    plan.folds.push_back(detail::make_fold(units, in_test, 0, 0));
    return plan;
}

/// (Repeated) k-fold partition. k equal to the number of units gives
/// leave-one-out (leave-one-group-out when grouped).
inline SplitPlan kfold_split(const Dataset& d, std::size_t k, bool stratified, bool grouped, std::size_t repeats,
                             std::uint64_t seed) {
    const auto units = detail::make_units(d, grouped);
    const std::size_t u = units.members.size();
    if (k < 2) throw std::invalid_argument("kfold_split: k must be >= 2");
    if (k > u)
        throw std::invalid_argument("kfold_split: k = " + std::to_string(k) + " exceeds the " + std::to_string(u) +
                                    (grouped ? " available groups" : " available samples"));
    if (repeats < 1) throw std::invalid_argument("kfold_split: repeats must be >= 1");

    SplitPlan plan;
    plan.scheme = {SplitKind::kfold, k, repeats, stratified, grouped, 0.0, seed};
    plan.sample_count = d.size();
    plan.warnings = detail::mixed_group_warnings(d, units, grouped);
    if (repeats > repeat_warning_threshold)
        plan.warnings.push_back("repeats = " + std::to_string(repeats) + " exceeds " +
                                std::to_string(repeat_warning_threshold) + "; more repeats rarely help");
    auto buckets = detail::units_by_class(units, d.class_count());
    if (stratified) {
        for (std::size_t j = 0; j < buckets.size(); ++j)
            if (!buckets[j].empty() && buckets[j].size() < k)
                plan.warnings.push_back("class " + std::to_string(j) + " has " + std::to_string(buckets[j].size()) +
                                        " units, fewer than k = " + std::to_string(k) +
                                        "; stratification is best-effort");
    }

    for (std::size_t r = 0; r < repeats; ++r) {
        Rng rng = make_rng(seed, {r});
        std::vector<std::size_t> fold_of(u);
        if (stratified) {
            // Deal each class's shuffled units round-robin, continuing the
            // position counter across classes so fold sizes stay balanced.
            std::size_t pos = 0;
            for (auto b : buckets) {
                std::shuffle(b.begin(), b.end(), rng);
                for (auto g : b) fold_of[g] = pos++ % k;
            }
        } else {
            std::vector<std::size_t> order(u);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::shuffle(order.begin(), order.end(), rng);
            for (std::size_t p = 0; p < u; ++p) fold_of[order[p]] = p % k;
        }
        for (std::size_t f = 0; f < k; ++f) {
            std::vector<bool> in_test(u);
            for (std::size_t g = 0; g < u; ++g) in_test[g] = fold_of[g] == f;
            plan.folds.push_back(detail::make_fold(units, in_test, r, f));
        }
    }
    return plan;
}

/// Checks the structural invariants of a plan against a dataset. Returns a
/// list of violations (empty when valid).
inline std::vector<std::string> validate_plan(const SplitPlan& plan, const Dataset& d) {
    std::vector<std::string> v;
    if (plan.sample_count != d.size())
        v.push_back("plan sample count " + std::to_string(plan.sample_count) + " != dataset size " +
                    std::to_string(d.size()));
    std::map<std::size_t, std::vector<const Fold*>> by_repeat;
    for (std::size_t fi = 0; fi < plan.folds.size(); ++fi) {
        const auto& f = plan.folds[fi];
        const std::string tag = "fold " + std::to_string(fi) + ": ";
        if (f.test.empty()) v.push_back(tag + "empty test set");
        if (f.train.empty()) v.push_back(tag + "empty training set");
        std::unordered_set<std::size_t> tr(f.train.begin(), f.train.end());
        if (tr.size() != f.train.size()) v.push_back(tag + "duplicate training index");
        std::unordered_set<std::size_t> te;
        for (auto i : f.test) {
            if (!te.insert(i).second) v.push_back(tag + "duplicate test index");
            if (tr.count(i)) v.push_back(tag + "index " + std::to_string(i) + " in both train and test");
        }
        for (auto i : f.train)
            if (i >= d.size()) v.push_back(tag + "index out of range");
        for (auto i : f.test)
            if (i >= d.size()) v.push_back(tag + "index out of range");
        if (d.has_groups()) {
            std::unordered_set<std::string> train_groups;
            for (auto i : f.train)
                if (i < d.size()) train_groups.insert(d.groups()[i]);
            for (auto i : f.test)
                if (i < d.size() && train_groups.count(d.groups()[i]))
                    v.push_back(tag + "group '" + d.groups()[i] + "' appears in both train and test");
        }
        by_repeat[f.repeat].push_back(&f);
    }
    if (plan.scheme.kind == SplitKind::kfold) {
        for (const auto& [r, folds] : by_repeat) {
            std::vector<int> seen(d.size(), 0);
            for (const auto* f : folds)
                for (auto i : f->test)
                    if (i < d.size()) ++seen[i];
            for (std::size_t i = 0; i < d.size(); ++i)
                if (seen[i] != 1) {
                    v.push_back("repeat " + std::to_string(r) + ": index " + std::to_string(i) + " appears in " +
                                std::to_string(seen[i]) + " test sets");
                    break;
                }
            for (const auto* f : folds)
                if (f->train.size() + f->test.size() != d.size()) {
                    v.push_back("repeat " + std::to_string(r) + ": train and test do not cover all indices");
                    break;
                }
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Evaluation

/// Which class is "positive" for binary measures and ROC scores, and which
/// aggregated measure drives model selection (higher is better).
struct MetricSpec {
    int positive = 1;
    std::string selection = "accuracy";
};

struct EvalOptions {
    unsigned threads = 1;
    /// Fits leading transformer stages on ALL data before splitting. This
    /// reproduces the peeking bias and marks the report INVALID. Tests only.
    bool unsafe_fit_on_all_data = false;
};

struct FoldResult {
    std::size_t repeat = 0;
    std::size_t index = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    bool failed = false;
    std::string error;
    std::map<std::string, Measure> values;
    std::optional<ConfusionMatrix> confusion;
    std::vector<std::size_t> test_indices;
    std::vector<int> predictions;
    std::optional<ScoreSet> scores;
    std::map<std::string, double> selected;  // nested CV only
};

struct Aggregate {
    double mean = 0.0;
    std::optional<double> sd;  // sample sd, needs >= 2 values
    std::size_t count = 0;     // folds contributing
};

struct EvalReport {
    SplitPlan plan;
    std::string pipeline;
    std::uint64_t seed = 0;
    std::vector<FoldResult> folds;
    std::map<std::string, Aggregate> aggregates;
    std::optional<double> pooled_auc;
    std::optional<AucAverage> averaged_auc;
    std::vector<std::string> warnings;
    std::size_t failed_folds = 0;
    bool invalid = false;
    std::string invalid_reason;

    std::optional<double> mean(const std::string& metric) const {
        auto it = aggregates.find(metric);
        if (it == aggregates.end() || it->second.count == 0) return std::nullopt;
        return it->second.mean;
    }
};

namespace detail {

inline std::map<std::string, Measure> fold_values(const ConfusionMatrix& cm, const std::optional<ScoreSet>& scores,
                                                  int positive) {
    std::map<std::string, Measure> v;
    if (cm.class_count() == 2) {
        for (auto& [name, m] : binary_metrics(cm, positive).named()) v[name] = m;
        if (scores && scores->has_both_classes()) v["auc"] = auc(*scores);
        else v["auc"] = std::nullopt;
    } else {
        const auto mc = multiclass_metrics(cm);
        v["accuracy"] = mc.accuracy;
        v["balanced_accuracy"] = mc.balanced_accuracy;
        for (std::size_t j = 0; j < mc.recall.size(); ++j) {
            v["recall_" + std::to_string(j)] = mc.recall[j];
            v["precision_" + std::to_string(j)] = mc.precision[j];
        }
    }
    return v;
}

inline FoldResult evaluate_fold(const Dataset& data, const Pipeline& pipeline, const Fold& fold, std::uint64_t seed,
                                const MetricSpec& spec) {
    FoldResult r;
    r.repeat = fold.repeat;
    r.index = fold.index;
    r.n_train = fold.train.size();
    r.n_test = fold.test.size();
    r.test_indices = fold.test;
    try {
        const Dataset train = data.subset(fold.train);
        const Dataset test = data.subset(fold.test);
        const auto fitted = pipeline.fit(train, derive_seed(seed, {fold.repeat, fold.index}));
        r.predictions = fitted.predict(test.features());
        const auto cm = confusion_matrix(test.labels(), r.predictions, data.class_count());
        if (data.class_count() == 2) {
            if (auto s = fitted.scores(test.features(), spec.positive))
                r.scores = ScoreSet(*s, test.labels(), spec.positive);
        }
        r.values = fold_values(cm, r.scores, spec.positive);
        r.confusion = cm;
    } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
        r.values.clear();
        r.predictions.clear();
        r.scores.reset();
    }
    return r;
}

inline void aggregate(EvalReport& report) {
    std::map<std::string, std::vector<double>> vals;
    report.failed_folds = 0;
    std::vector<ScoreSet> fold_scores;
    for (const auto& f : report.folds) {
        if (f.failed) {
            ++report.failed_folds;
            continue;
        }
        for (const auto& [name, m] : f.values) {
            auto& slot = vals[name];
            if (m) slot.push_back(*m);
        }
        if (f.scores) fold_scores.push_back(*f.scores);
    }
    report.aggregates.clear();
    for (const auto& [name, v] : vals) {
        Aggregate a;
        a.count = v.size();
        if (!v.empty()) {
            a.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
            if (v.size() >= 2) {
                double ss = 0.0;
                for (double x : v) ss += (x - a.mean) * (x - a.mean);
                a.sd = std::sqrt(ss / double(v.size() - 1));
            }
        }
        report.aggregates[name] = a;
    }
    if (report.failed_folds > 0)
        report.warnings.push_back(std::to_string(report.failed_folds) + " fold(s) failed and were excluded from the aggregates");
    if (!fold_scores.empty()) {
        const auto pooled = pool_scores(fold_scores);
        if (pooled.has_both_classes()) report.pooled_auc = auc(pooled);
        report.averaged_auc = average_aucs(fold_scores);
        if (!report.averaged_auc->excluded_folds.empty())
            report.warnings.push_back(std::to_string(report.averaged_auc->excluded_folds.size()) +
                                      " fold(s) with a single class excluded from AUC averaging");
    }
}

}  // namespace detail

/// Fits the pipeline on each training fold and evaluates it on the matching
/// test fold. Results are keyed by fold position, so execution order (and
/// thread count) cannot change the report.
inline EvalReport cross_validate(const Dataset& data, const Pipeline& pipeline, const SplitPlan& plan,
                                 const MetricSpec& spec = {}, const EvalOptions& opts = {}) {
    if (auto v = validate_plan(plan, data); !v.empty()) throw std::invalid_argument("cross_validate: invalid plan: " + v.front());
    if (spec.positive < 0 || spec.positive >= data.class_count())
        throw std::invalid_argument("cross_validate: positive class out of range");

    EvalReport report;
    report.plan = plan;
    report.seed = plan.scheme.seed;
    report.pipeline = pipeline.describe();
    report.warnings = plan.warnings;

    const Dataset* eval_data = &data;
    Pipeline eval_pipeline = pipeline;
    std::optional<Dataset> peeked;
    if (opts.unsafe_fit_on_all_data) {
        Matrix transformed;
        eval_pipeline = pipeline.prefit_leading_transformers(data.features(), data.labels(), data.class_count(), transformed);
        std::optional<std::vector<std::string>> groups;
        if (data.has_groups()) groups = data.groups();
        peeked.emplace(std::move(transformed), data.labels(), data.class_count(), std::move(groups));
        eval_data = &*peeked;
        report.invalid = true;
        report.invalid_reason = "INVALID: transformer stages were fitted on all data before splitting (peeking)";
        report.warnings.push_back(report.invalid_reason);
    }

    report.folds.resize(plan.folds.size());
    parallel_for(plan.folds.size(), opts.threads, [&](std::size_t i) {
        report.folds[i] = detail::evaluate_fold(*eval_data, eval_pipeline, plan.folds[i], plan.scheme.seed, spec);
    });
    detail::aggregate(report);
    return report;
}

/// Hyperparameter assignment, e.g. {"select_k": 10}.
using HyperParams = std::map<std::string, double>;
using PipelineFamily = std::function<Pipeline(const HyperParams&)>;

/// CV inside CV: per outer fold, an inner k-fold CV on the outer-training
/// data picks the grid entry with the best mean selection metric (first
/// entry wins ties); that pipeline is refitted on the whole outer-training
/// set and scored on the outer test set.
inline EvalReport nested_cv(const Dataset& data, const PipelineFamily& family, const std::vector<HyperParams>& grid,
                            const SplitPlan& outer, std::size_t inner_k, const MetricSpec& spec = {},
                            const EvalOptions& opts = {}) {
    if (grid.empty()) throw std::invalid_argument("nested_cv: empty hyperparameter grid");
    if (opts.unsafe_fit_on_all_data) throw std::invalid_argument("nested_cv: unsafe mode is not supported");
    if (auto v = validate_plan(outer, data); !v.empty()) throw std::invalid_argument("nested_cv: invalid plan: " + v.front());

    EvalReport report;
    report.plan = outer;
    report.seed = outer.scheme.seed;
    report.pipeline = "nested(" + family(grid.front()).describe() + ", grid=" + std::to_string(grid.size()) +
                      ", inner_k=" + std::to_string(inner_k) + ", select=" + spec.selection + ")";
    report.warnings = outer.warnings;
    report.folds.resize(outer.folds.size());

    parallel_for(outer.folds.size(), opts.threads, [&](std::size_t i) {
        const Fold& fold = outer.folds[i];
        std::size_t best = 0;
        try {
            const Dataset outer_train = data.subset(fold.train);
            const auto inner = kfold_split(outer_train, inner_k, outer.scheme.stratified,
                                           outer.scheme.grouped && outer_train.has_groups(), 1,
                                           derive_seed(outer.scheme.seed, {fold.repeat, fold.index, 0x1e5e7ULL}));
            double best_value = -std::numeric_limits<double>::infinity();
            bool any = false;
            for (std::size_t g = 0; g < grid.size(); ++g) {
                const auto inner_report = cross_validate(outer_train, family(grid[g]), inner, spec, {});
                const auto m = inner_report.mean(spec.selection);
                if (m && (!any || *m > best_value)) {
                    best_value = *m;
                    best = g;
                    any = true;
                }
            }
            if (!any) throw std::runtime_error("inner CV produced no defined '" + spec.selection + "' value for any grid entry");
        } catch (const std::exception& e) {
            FoldResult r;
            r.repeat = fold.repeat;
            r.index = fold.index;
            r.n_train = fold.train.size();
            r.n_test = fold.test.size();
            r.test_indices = fold.test;
            r.failed = true;
            r.error = std::string("inner CV failed: ") + e.what();
            report.folds[i] = std::move(r);
            return;
        }
        report.folds[i] = detail::evaluate_fold(data, family(grid[best]), fold, outer.scheme.seed, spec);
        report.folds[i].selected = grid[best];
    });
    detail::aggregate(report);
    return report;
}

// ---------------------------------------------------------------------------
// Bootstrap

inline double estimate_632(double resubstitution_error, double oob_error) {
    return 0.368 * resubstitution_error + 0.632 * oob_error;
}

struct BootstrapResult {
    double oob_error = 0.0;             // pooled over all out-of-bag predictions; NaN if no replicate was usable
    double resubstitution_error = 0.0;  // model trained and tested on all data
    double estimate_632 = 0.0;
    std::size_t replicates = 0;
    std::size_t used = 0;
    std::size_t skipped_empty_oob = 0;
    std::size_t failed = 0;
    std::vector<double> distinct_fraction;  // per replicate, in units
    std::vector<std::string> warnings;
};

/// Indices of one bootstrap sample of size n (with replacement).
inline std::vector<std::size_t> bootstrap_sample(std::size_t n, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> s(n);
    for (auto& i : s) i = pick(rng);
    return s;
}

/// m bootstrap replicates; each model is scored on its out-of-bag rows.
/// Grouped datasets are resampled by whole groups.
inline BootstrapResult bootstrap_oob(const Dataset& data, const Pipeline& pipeline, std::size_t m, std::uint64_t seed,
                                     const EvalOptions& opts = {}) {
    if (m < 1) throw std::invalid_argument("bootstrap_oob: m must be >= 1");
    if (data.size() < 2) throw std::invalid_argument("bootstrap_oob: need at least 2 samples");
    const auto units = detail::make_units(data, data.has_groups());
    const std::size_t u = units.members.size();

    struct Replicate {
        bool skipped = false;
        bool failed = false;
        std::size_t errors = 0;
        std::size_t oob = 0;
        double distinct = 0.0;
    };
    std::vector<Replicate> reps(m);
    parallel_for(m, opts.threads, [&](std::size_t r) {
        Rng rng = make_rng(seed, {r});
        const auto drawn = bootstrap_sample(u, rng);
        std::vector<bool> in_bag(u, false);
        for (auto g : drawn) in_bag[g] = true;
        const auto distinct = static_cast<std::size_t>(std::count(in_bag.begin(), in_bag.end(), true));
        reps[r].distinct = double(distinct) / double(u);
        if (distinct == u) {
            reps[r].skipped = true;
            return;
        }
        std::vector<std::size_t> bag, oob;
        for (auto g : drawn) bag.insert(bag.end(), units.members[g].begin(), units.members[g].end());
        for (std::size_t g = 0; g < u; ++g)
            if (!in_bag[g]) oob.insert(oob.end(), units.members[g].begin(), units.members[g].end());
        try {
            const Dataset train = data.subset(bag);
            const Dataset test = data.subset(oob);
            const auto fitted = pipeline.fit(train, derive_seed(seed, {r, 1}));
            const auto pred = fitted.predict(test.features());
            for (std::size_t i = 0; i < pred.size(); ++i)
                if (pred[i] != test.labels()[i]) ++reps[r].errors;
            reps[r].oob = oob.size();
        } catch (const std::exception&) {
            reps[r].failed = true;
        }
    });

    BootstrapResult res;
    res.replicates = m;
    std::size_t err = 0, total = 0;
    for (const auto& r : reps) {
        res.distinct_fraction.push_back(r.distinct);
        if (r.skipped) ++res.skipped_empty_oob;
        else if (r.failed) ++res.failed;
        else {
            ++res.used;
            err += r.errors;
            total += r.oob;
        }
    }
    if (res.skipped_empty_oob) res.warnings.push_back(std::to_string(res.skipped_empty_oob) + " replicate(s) had no out-of-bag samples and were skipped");
    if (res.failed) res.warnings.push_back(std::to_string(res.failed) + " replicate(s) failed to train and were skipped");
    if (total == 0) {
        res.warnings.push_back("no usable replicate; out-of-bag error is undefined");
        res.oob_error = std::numeric_limits<double>::quiet_NaN();
    } else {
        res.oob_error = double(err) / double(total);
    }

    const auto fitted = pipeline.fit(data, derive_seed(seed, {m, 2}));
    const auto pred = fitted.predict(data.features());
    std::size_t resub_err = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] != data.labels()[i]) ++resub_err;
    res.resubstitution_error = double(resub_err) / double(data.size());
    res.estimate_632 = estimate_632(res.resubstitution_error, res.oob_error);
    return res;
}

/// Accuracy of a pipeline trained and tested on the same rows.
inline double resubstitution_accuracy(const Dataset& data, const Pipeline& pipeline, std::uint64_t seed) {
    const auto pred = pipeline.fit(data, seed).predict(data.features());
    std::size_t ok = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == data.labels()[i];
    return double(ok) / double(data.size());
}

}  // namespace evalkit
