#pragma once

// JSON and CSV encodings for reports, plans and models (nlohmann/json).
// Undefined measures are written as the string "undefined"; non-finite
// reals as "inf", "-inf" or null (NaN).

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "compare.hpp"
#include "intervals.hpp"
#include "metrics.hpp"
#include "models.hpp"
#include "resampling.hpp"
#include "roc.hpp"
#include "sim.hpp"

namespace evalkit {

using Json = nlohmann::ordered_json;

inline Json real_json(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline double real_from_json(const Json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("expected a number, found string '" + s + "'");
    }
    return j.get<double>();
}

inline Json measure_json(const Measure& m) {
    if (!m) return "undefined";
    return real_json(*m);
}

inline Json to_json(const ConfusionMatrix& cm) { return cm.table(); }

inline Json to_json(const BinaryMetricBundle& b) {
    Json j;
    j["counts"] = {{"tp", b.counts.tp}, {"fp", b.counts.fp}, {"tn", b.counts.tn}, {"fn", b.counts.fn}};
    for (const auto& [name, m] : b.named()) j[name] = measure_json(m);
    return j;
}

inline Json to_json(const MulticlassMetrics& m, const std::vector<std::string>& class_names = {}) {
    auto name = [&](std::size_t i) { return i < class_names.size() ? class_names[i] : std::to_string(i); };
    Json j;
    j["accuracy"] = measure_json(m.accuracy);
    j["balanced_accuracy"] = measure_json(m.balanced_accuracy);
    Json recall = Json::object(), precision = Json::object();
    for (std::size_t i = 0; i < m.recall.size(); ++i) {
        recall[name(i)] = measure_json(m.recall[i]);
        precision[name(i)] = measure_json(m.precision[i]);
    }
    j["recall"] = recall;
    j["precision"] = precision;
    Json skipped = Json::array();
    for (int c : m.skipped_classes) skipped.push_back(name(static_cast<std::size_t>(c)));
    j["skipped_classes"] = skipped;
    return j;
}

inline Json to_json(const RegressionMetricBundle& r) {
    return {{"mse", real_json(r.mse)}, {"mae", real_json(r.mae)}, {"pearson_r", measure_json(r.pearson_r)},
            {"q2", measure_json(r.q2)}};
}

inline Json to_json(const ConfidenceInterval& ci) {
    return {{"point", real_json(ci.point)}, {"lower", real_json(ci.lower)}, {"upper", real_json(ci.upper)},
            {"level", ci.level},            {"method", to_string(ci.method)}};
}

inline Json to_json(const ThresholdChoice& t) {
    return {{"threshold", real_json(t.threshold)}, {"fpr", t.fpr}, {"tpr", t.tpr}, {"objective", real_json(t.objective)}};
}

inline Json to_json(const TestResult& r) {
    Json j;
    j["test"] = r.test;
    j["statistic"] = real_json(r.statistic);
    j["p_value"] = real_json(r.p_value);
    j["df"] = r.df ? real_json(*r.df) : Json(nullptr);
    j["degenerate"] = r.degenerate;
    j["note"] = r.note;
    Json in = Json::object();
    for (const auto& [k, v] : r.inputs) in[k] = real_json(v);
    j["inputs"] = in;
    return j;
}

inline Json to_json(const ScoreSet& s) {
    Json scores = Json::array(), truth = Json::array();
    for (const auto& r : s.records()) {
        scores.push_back(real_json(r.score));
        truth.push_back(r.positive ? 1 : 0);
    }
    return {{"score", scores}, {"truth", truth}};
}

inline void write_roc_csv(std::ostream& out, const RocCurve& curve) {
    out << "threshold,fpr,tpr\n";
    for (const auto& p : curve.points)
        out << (std::isinf(p.threshold) ? (p.threshold > 0 ? std::string("inf") : std::string("-inf"))
                                        : format_double(p.threshold))
            << ',' << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
}

// --- split plans ----------------------------------------------------------

inline Json to_json(const SplitPlan& plan) {
    Json j;
    j["scheme"] = {{"kind", to_string(plan.scheme.kind)},
                   {"k", plan.scheme.k},
                   {"repeats", plan.scheme.repeats},
                   {"stratified", plan.scheme.stratified},
                   {"grouped", plan.scheme.grouped},
                   {"test_fraction", plan.scheme.test_fraction},
                   {"seed", plan.scheme.seed}};
    j["sample_count"] = plan.sample_count;
    Json folds = Json::array();
    for (const auto& f : plan.folds)
        folds.push_back({{"repeat", f.repeat}, {"fold", f.index}, {"train", f.train}, {"test", f.test}});
    j["folds"] = folds;
    j["warnings"] = plan.warnings;
    return j;
}

/// Reads a plan. Missing scheme fields default to a "custom" plan, so
/// hand-written plans (e.g. one fold per centre) need only `folds` with
/// `test` lists; a missing `train` list means "all other indices".
inline SplitPlan plan_from_json(const Json& j, std::size_t sample_count) {
    SplitPlan plan;
    plan.sample_count = j.value("sample_count", sample_count);
    if (j.contains("scheme")) {
        const auto& s = j["scheme"];
        plan.scheme.kind = split_kind_from_string(s.value("kind", std::string("custom")));
        plan.scheme.k = s.value("k", std::size_t{0});
        plan.scheme.repeats = s.value("repeats", std::size_t{1});
        plan.scheme.stratified = s.value("stratified", false);
        plan.scheme.grouped = s.value("grouped", false);
        plan.scheme.test_fraction = s.value("test_fraction", 0.0);
        plan.scheme.seed = s.value("seed", std::uint64_t{0});
    } else {
        plan.scheme.kind = SplitKind::custom;
    }
    if (!j.contains("folds") || !j["folds"].is_array()) throw std::invalid_argument("plan JSON: missing 'folds' array");
    std::size_t idx = 0;
    for (const auto& f : j["folds"]) {
        Fold fold;
        fold.repeat = f.value("repeat", std::size_t{0});
        fold.index = f.value("fold", idx);
        fold.test = f.at("test").get<std::vector<std::size_t>>();
        if (f.contains("train")) {
            fold.train = f["train"].get<std::vector<std::size_t>>();
        } else {
            std::vector<bool> in_test(plan.sample_count, false);
            for (auto i : fold.test)
                if (i < plan.sample_count) in_test[i] = true;
            for (std::size_t i = 0; i < plan.sample_count; ++i)
                if (!in_test[i]) fold.train.push_back(i);
        }
        plan.folds.push_back(std::move(fold));
        ++idx;
    }
    if (j.contains("warnings")) plan.warnings = j["warnings"].get<std::vector<std::string>>();
    if (plan.scheme.kind == SplitKind::custom) plan.scheme.k = plan.folds.size();
    return plan;
}

// --- evaluation reports ---------------------------------------------------

inline Json to_json(const AucAverage& a) {
    Json per = Json::array();
    for (const auto& v : a.per_fold) per.push_back(v ? real_json(*v) : Json("undefined"));
    return {{"mean", a.mean ? real_json(*a.mean) : Json("undefined")},
            {"sd", a.sd ? real_json(*a.sd) : Json("undefined")},
            {"per_fold", per},
            {"excluded_folds", a.excluded_folds}};
}

inline Json to_json(const EvalReport& r, bool include_scores = true) {
    Json j;
    j["pipeline"] = r.pipeline;
    j["seed"] = r.seed;
    j["valid"] = !r.invalid;
    if (r.invalid) j["invalid_reason"] = r.invalid_reason;
    Json agg = Json::object();
    for (const auto& [name, a] : r.aggregates)
        agg[name] = {{"mean", a.count ? real_json(a.mean) : Json("undefined")},
                     {"sd", a.sd ? real_json(*a.sd) : Json("undefined")},
                     {"folds", a.count}};
    j["aggregates"] = agg;
    j["pooled_auc"] = r.pooled_auc ? real_json(*r.pooled_auc) : Json("undefined");
    j["averaged_auc"] = r.averaged_auc ? to_json(*r.averaged_auc) : Json("undefined");
    j["failed_folds"] = r.failed_folds;
    Json folds = Json::array();
    for (const auto& f : r.folds) {
        Json fj;
        fj["repeat"] = f.repeat;
        fj["fold"] = f.index;
        fj["n_train"] = f.n_train;
        fj["n_test"] = f.n_test;
        fj["failed"] = f.failed;
        if (f.failed) fj["error"] = f.error;
        Json vals = Json::object();
        for (const auto& [name, m] : f.values) vals[name] = measure_json(m);
        fj["metrics"] = vals;
        if (f.confusion) fj["confusion_matrix"] = to_json(*f.confusion);
        if (!f.selected.empty()) {
            Json sel = Json::object();
            for (const auto& [k, v] : f.selected) sel[k] = real_json(v);
            fj["selected"] = sel;
        }
        if (include_scores && f.scores) fj["scores"] = to_json(*f.scores);
        folds.push_back(fj);
    }
    j["folds"] = folds;
    j["plan"] = to_json(r.plan);
    j["warnings"] = r.warnings;
    return j;
}

inline Json to_json(const BootstrapResult& b) {
    return {{"oob_error", real_json(b.oob_error)},
            {"resubstitution_error", real_json(b.resubstitution_error)},
            {"estimate_632", real_json(b.estimate_632)},
            {"replicates", b.replicates},
            {"used", b.used},
            {"skipped_empty_oob", b.skipped_empty_oob},
            {"failed", b.failed},
            {"warnings", b.warnings}};
}

// --- models ---------------------------------------------------------------

inline Json to_json(const GnbModel& m) {
    return {{"model", "gnb"}, {"means", m.means()}, {"variances", m.variances()}, {"priors", m.priors().values()}};
}

inline GnbModel gnb_from_json(const Json& j) {
    if (j.value("model", std::string()) != "gnb") throw std::invalid_argument("model JSON: not a gnb model");
    return GnbModel(j.at("means").get<std::vector<std::vector<double>>>(),
                    j.at("variances").get<std::vector<std::vector<double>>>(),
                    PriorVector(j.at("priors").get<std::vector<double>>()));
}

}  // namespace evalkit
