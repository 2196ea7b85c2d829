#pragma once

// Command-line front end. `run` takes the arguments after the program name
// and returns the process exit code: 0 for a valid report, 1 for input or
// runtime errors, 3 when a report was written but is marked INVALID.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "evalkit/evalkit.hpp"

namespace evalkit::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_invalid_report = 3;

struct Options {
    std::string input;
    std::string label_col = "label";
    std::string group_col;
    std::string positive;
    std::uint64_t seed = 0;
    std::string out;
    unsigned threads = 1;

    // metrics / roc / compare inputs
    std::string truth_col = "truth";
    std::string pred_col = "prediction";
    std::string score_col = "score";
    std::string count_col;
    std::string ci_method = "wilson";
    double level = 0.95;
    bool invert_scores = false;
    std::string points_out;
    double cost_fp = 1.0;
    double cost_fn = 1.0;
    double prevalence = -1.0;

    // evaluation
    std::string model = "gnb";
    std::size_t k = default_k;
    std::size_t repeats = 1;
    bool no_stratify = false;
    double holdout = 0.0;
    std::string plan_in;
    std::string plan_out;
    bool standardize = false;
    std::size_t select_top = 0;
    bool unsafe_peeking = false;
    bool omit_scores = false;
    std::string grid;
    std::size_t inner_k = default_k;
    std::string select_metric = "accuracy";
    std::size_t m = 100;

    // compare
    std::string test;
    std::string a;
    std::string b;
    std::string diffs;
    std::string diff_col = "difference";
    std::string metric_col = "accuracy";
    std::size_t n_train = 0;
    std::size_t n_test = 0;

    // simulate
    std::string study;
    std::vector<std::size_t> dims;
    std::vector<std::size_t> sizes;
    std::size_t reps = 0;
    std::size_t test_size = 0;
    double bayes_error = 0.05;
    double holdout_fraction = 0.2;
    bool paper_scale = false;

    // replay
    std::string report;
};

inline std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed for '" + path + "'");
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

inline std::string utc_timestamp() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Resolved value of every option of the subcommand (given or default).
inline Json resolved_config(const CLI::App& sub) {
    Json cfg = Json::object();
    for (const auto* opt : sub.get_options()) {
        const auto name = opt->get_single_name();
        if (name.empty() || name == "help") continue;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            if (opt->get_type_size() == 0) cfg[name] = true;
            else if (res.size() == 1) cfg[name] = res.front();
            else cfg[name] = res;
        } else {
            cfg[name] = opt->get_type_size() == 0 ? Json(false) : Json(opt->get_default_str());
        }
    }
    return cfg;
}

inline Json make_manifest(const CLI::App& sub, const std::vector<std::string>& args,
                          std::optional<std::uint64_t> seed, const std::vector<std::string>& inputs) {
    Json m;
    m["subcommand"] = sub.get_name();
    m["argv"] = args;
    m["config"] = resolved_config(sub);
    m["seed"] = seed ? Json(*seed) : Json(nullptr);
    Json in = Json::array();
    for (const auto& p : inputs) in.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    m["inputs"] = in;
    m["version"] = version;
    m["timestamp"] = utc_timestamp();
    return m;
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

inline void emit(const Json& report, const Options& o, std::ostream& out) { write_text(o.out, report.dump(2) + "\n", out); }

inline Json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open '" + path + "'");
    try {
        return Json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline std::size_t require_column(const csv::Table& t, const std::string& name, const std::string& path) {
    auto c = t.column(name);
    if (!c) throw DataError("column '" + name + "' not found in '" + path + "'", 1);
    return *c;
}

inline csv::Table read_nonempty_table(const std::string& path) {
    auto t = csv::read_table(path);
    if (t.rows.empty()) throw DataError("'" + path + "' has no data rows", 1);
    return t;
}

inline std::vector<std::string> string_column(const csv::Table& t, const std::string& name, const std::string& path) {
    const auto c = require_column(t, name, path);
    std::vector<std::string> v;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r][c].empty()) throw DataError("missing value in column '" + name + "'", t.line_numbers[r]);
        v.push_back(t.rows[r][c]);
    }
    return v;
}

inline std::vector<double> numeric_column(const csv::Table& t, const std::string& name, const std::string& path) {
    const auto c = require_column(t, name, path);
    std::vector<double> v;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto x = csv::parse_double(t.rows[r][c]);
        if (!x) throw DataError("non-numeric value '" + t.rows[r][c] + "' in column '" + name + "'", t.line_numbers[r]);
        v.push_back(*x);
    }
    return v;
}

/// Positive class index: the --positive label, else "1" when present, else
/// the second label in order of first appearance (with a warning).
inline int resolve_positive(const std::vector<std::string>& names, const std::string& requested,
                            std::vector<std::string>& warnings) {
    if (!requested.empty()) {
        auto it = std::find(names.begin(), names.end(), requested);
        if (it == names.end()) throw std::invalid_argument("positive label '" + requested + "' does not occur in the data");
        return static_cast<int>(it - names.begin());
    }
    auto it = std::find(names.begin(), names.end(), "1");
    if (it != names.end()) return static_cast<int>(it - names.begin());
    warnings.push_back("no --positive given; using '" + names.at(1) + "' as the positive class");
    return 1;
}

// --- metrics --------------------------------------------------------------

inline int cmd_metrics(const Options& o, Json manifest, std::ostream& out) {
    const auto table = read_nonempty_table(o.input);
    const auto truth = string_column(table, o.truth_col, o.input);
    const auto pred = string_column(table, o.pred_col, o.input);
    std::vector<std::int64_t> counts(truth.size(), 1);
    if (!o.count_col.empty()) {
        const auto w = numeric_column(table, o.count_col, o.input);
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (!(w[i] >= 0.0) || w[i] != std::floor(w[i]))
                throw DataError("count must be a non-negative integer", table.line_numbers[i]);
            counts[i] = static_cast<std::int64_t>(w[i]);
        }
    }
    LabelEncoder enc;
    for (const auto& t : truth) enc.encode(t);
    for (const auto& p : pred) enc.encode(p);
    const int c = static_cast<int>(enc.size());
    if (c < 2) throw DataError("fewer than 2 distinct labels");

    std::vector<std::vector<std::int64_t>> cm_table(std::size_t(c), std::vector<std::int64_t>(std::size_t(c), 0));
    for (std::size_t i = 0; i < truth.size(); ++i)
        cm_table[std::size_t(*enc.find(truth[i]))][std::size_t(*enc.find(pred[i]))] += counts[i];
    const auto cm = ConfusionMatrix::from_counts(cm_table);
    if (cm.total() == 0) throw DataError("all counts are zero");

    const auto method = interval_method_from_string(o.ci_method);
    std::vector<std::string> warnings;
    Json r;
    r["manifest"] = std::move(manifest);
    r["classes"] = enc.names();
    r["confusion_matrix"] = to_json(cm);
    r["total"] = cm.total();
    Json cis = Json::object();
    cis["accuracy"] = to_json(proportion_ci(cm.trace(), cm.total(), o.level, method));
    if (c == 2 || !o.positive.empty()) {
        const int pos = resolve_positive(enc.names(), o.positive, warnings);
        const auto bc = collapse(cm, pos);
        r["positive_class"] = enc.names()[std::size_t(pos)];
        r["binary"] = to_json(binary_metrics(bc));
        if (bc.tp + bc.fn > 0) cis["sensitivity"] = to_json(proportion_ci(bc.tp, bc.tp + bc.fn, o.level, method));
        else cis["sensitivity"] = "undefined";
        if (bc.tn + bc.fp > 0) cis["specificity"] = to_json(proportion_ci(bc.tn, bc.tn + bc.fp, o.level, method));
        else cis["specificity"] = "undefined";
    }
    if (c > 2) {
        r["multiclass"] = to_json(multiclass_metrics(cm), enc.names());
        Json rec = Json::object();
        for (int j = 0; j < c; ++j)
            rec[enc.names()[std::size_t(j)]] = cm.row_sum(j) > 0
                                                   ? to_json(proportion_ci(cm.at(j, j), cm.row_sum(j), o.level, method))
                                                   : Json("undefined");
        cis["recall"] = rec;
    }
    r["intervals"] = cis;
    r["warnings"] = warnings;
    emit(r, o, out);
    return exit_ok;
}

// --- roc ------------------------------------------------------------------

inline ScoreSet read_scores(const std::string& path, const Options& o) {
    const auto table = read_nonempty_table(path);
    const auto truth = string_column(table, o.label_col, path);
    const auto score = numeric_column(table, o.score_col, path);
    const std::string pos = o.positive.empty() ? "1" : o.positive;
    if (std::find(truth.begin(), truth.end(), pos) == truth.end())
        throw DataError("positive label '" + pos + "' does not occur in '" + path + "'; single-class or mislabelled truth");
    std::vector<ScoreRecord> recs;
    for (std::size_t i = 0; i < truth.size(); ++i) recs.push_back({score[i], truth[i] == pos});
    ScoreSet s(std::move(recs));
    if (!s.has_both_classes()) throw DataError("truth column in '" + path + "' contains a single class");
    return o.invert_scores ? s.inverted() : s;
}

inline std::string points_path(const Options& o) {
    if (!o.points_out.empty()) return o.points_out;
    if (o.out.empty()) return {};
    auto p = o.out;
    if (p.size() > 5 && p.ends_with(".json")) p.resize(p.size() - 5);
    return p + ".points.csv";
}

inline int cmd_roc(const Options& o, Json manifest, std::ostream& out) {
    const auto scores = read_scores(o.input, o);
    const auto curve = roc_curve(scores);
    const double prevalence = o.prevalence >= 0.0 ? o.prevalence : double(scores.positives()) / double(scores.size());

    Json r;
    r["manifest"] = std::move(manifest);
    r["n_positive"] = scores.positives();
    r["n_negative"] = scores.negatives();
    r["auc"] = auc(scores);
    Json cis = Json::object();
    if (scores.positives() >= 2 && scores.negatives() >= 2) cis["delong"] = to_json(delong_ci(scores, o.level));
    else cis["delong"] = "undefined: needs at least 2 samples per class";
    cis["hanley_mcneil"] = to_json(hanley_mcneil_ci(scores, o.level));
    r["intervals"] = cis;
    r["thresholds"] = {{"closest_topleft", to_json(threshold_closest_topleft(curve))},
                       {"max_youden", to_json(threshold_max_youden(curve))},
                       {"min_cost", to_json(threshold_min_cost(curve, o.cost_fp, o.cost_fn, prevalence))}};
    r["min_cost_inputs"] = {{"cost_fp", o.cost_fp}, {"cost_fn", o.cost_fn}, {"prevalence", prevalence}};
    const auto pp = points_path(o);
    if (!pp.empty()) {
        std::ostringstream csv;
        write_roc_csv(csv, curve);
        write_text(pp, csv.str(), out);
        r["points_file"] = pp;
    } else {
        Json pts = Json::array();
        for (const auto& p : curve.points) pts.push_back({real_json(p.threshold), p.fpr, p.tpr});
        r["points"] = pts;
    }
    r["warnings"] = Json::array();
    emit(r, o, out);
    return exit_ok;
}

// --- evaluation -----------------------------------------------------------

inline Pipeline build_pipeline(const std::string& model, bool standardize, std::size_t select_top) {
    std::shared_ptr<const Learner> learner;
    if (model == "gnb") learner = std::make_shared<GnbLearner>();
    else if (model == "majority") learner = std::make_shared<MajorityLearner>();
    else throw std::invalid_argument("unknown model '" + model + "' (expected gnb or majority)");
    Pipeline p(learner);
    if (standardize) p.then(std::shared_ptr<const Transformer>(std::make_shared<Standardizer>()));
    if (select_top > 0) p.then(std::shared_ptr<const Transformer>(std::make_shared<CorrelationSelector>(select_top)));
    return p;
}

inline Dataset load_input(const Options& o) {
    Schema schema;
    schema.label_column = o.label_col;
    if (!o.group_col.empty()) schema.group_column = o.group_col;
    return load_dataset(o.input, schema);
}

inline SplitPlan make_plan(const Options& o, const Dataset& d) {
    SplitPlan plan;
    if (!o.plan_in.empty()) {
        plan = plan_from_json(read_json_file(o.plan_in), d.size());
        if (auto v = validate_plan(plan, d); !v.empty()) throw std::invalid_argument("plan '" + o.plan_in + "': " + v.front());
    } else if (o.holdout > 0.0) {
        plan = holdout_split(d, o.holdout, !o.no_stratify, o.seed, d.has_groups());
    } else {
        plan = kfold_split(d, o.k, !o.no_stratify, d.has_groups(), o.repeats, o.seed);
    }
    if (!o.plan_out.empty()) write_text(o.plan_out, to_json(plan).dump(2) + "\n", std::cout);
    return plan;
}

inline int finish_eval(const EvalReport& rep, const Dataset& d, int positive, std::vector<std::string> extra_warnings,
                       const Options& o, Json manifest, std::ostream& out) {
    Json r;
    r["manifest"] = std::move(manifest);
    r["classes"] = d.label_names();
    r["positive_class"] = d.label_names().at(std::size_t(positive));
    r["n"] = d.size();
    Json body = to_json(rep, !o.omit_scores);
    for (auto& [k, v] : body.items()) r[k] = v;
    for (const auto& w : extra_warnings) r["warnings"].push_back(w);
    emit(r, o, out);
    return rep.invalid ? exit_invalid_report : exit_ok;
}

inline int cmd_cv(const Options& o, Json manifest, std::ostream& out) {
    const auto d = load_input(o);
    std::vector<std::string> warnings;
    const MetricSpec spec{resolve_positive(d.label_names(), o.positive, warnings), o.select_metric};
    const auto plan = make_plan(o, d);
    EvalOptions eo;
    eo.threads = o.threads;
    eo.unsafe_fit_on_all_data = o.unsafe_peeking;
    const auto rep = cross_validate(d, build_pipeline(o.model, o.standardize, o.select_top), plan, spec, eo);
    return finish_eval(rep, d, spec.positive, warnings, o, std::move(manifest), out);
}

/// Grid file: either a list of assignments, e.g. [{"select_top": 5}, ...],
/// or an object of value lists whose Cartesian product is taken.
inline std::vector<HyperParams> parse_grid(const Json& j) {
    std::vector<HyperParams> grid;
    auto as_number = [](const Json& v, const std::string& key) {
        if (!v.is_number()) throw std::invalid_argument("grid: value for '" + key + "' is not a number");
        return v.get<double>();
    };
    if (j.is_array()) {
        for (const auto& e : j) {
            if (!e.is_object()) throw std::invalid_argument("grid: list entries must be objects");
            HyperParams hp;
            for (const auto& [k, v] : e.items()) hp[k] = as_number(v, k);
            grid.push_back(std::move(hp));
        }
    } else if (j.is_object()) {
        grid.emplace_back();
        for (const auto& [k, v] : j.items()) {
            std::vector<double> values;
            if (v.is_array())
                for (const auto& x : v) values.push_back(as_number(x, k));
            else
                values.push_back(as_number(v, k));
            if (values.empty()) throw std::invalid_argument("grid: empty value list for '" + k + "'");
            std::vector<HyperParams> next;
            for (const auto& g : grid)
                for (double x : values) {
                    auto h = g;
                    h[k] = x;
                    next.push_back(std::move(h));
                }
            grid = std::move(next);
        }
    } else {
        throw std::invalid_argument("grid: expected a JSON list or object");
    }
    if (grid.empty()) throw std::invalid_argument("grid: no assignments");
    for (const auto& hp : grid)
        for (const auto& [k, v] : hp) {
            if (k != "select_top" && k != "standardize") throw std::invalid_argument("grid: unknown hyperparameter '" + k + "'");
            if (k == "select_top" && (v < 0 || v != std::floor(v)))
                throw std::invalid_argument("grid: select_top must be a non-negative integer");
        }
    return grid;
}

inline int cmd_nested_cv(const Options& o, Json manifest, std::ostream& out) {
    const auto d = load_input(o);
    std::vector<std::string> warnings;
    const MetricSpec spec{resolve_positive(d.label_names(), o.positive, warnings), o.select_metric};
    const auto grid = parse_grid(read_json_file(o.grid));
    const auto plan = make_plan(o, d);
    const std::string model = o.model;
    const bool standardize = o.standardize;
    const std::size_t select_top = o.select_top;
    PipelineFamily family = [=](const HyperParams& hp) {
        auto s = hp.find("standardize");
        auto k = hp.find("select_top");
        return build_pipeline(model, s != hp.end() ? s->second != 0.0 : standardize,
                              k != hp.end() ? static_cast<std::size_t>(k->second) : select_top);
    };
    EvalOptions eo;
    eo.threads = o.threads;
    const auto rep = nested_cv(d, family, grid, plan, o.inner_k, spec, eo);
    return finish_eval(rep, d, spec.positive, warnings, o, std::move(manifest), out);
}

inline int cmd_bootstrap(const Options& o, Json manifest, std::ostream& out) {
    const auto d = load_input(o);
    EvalOptions eo;
    eo.threads = o.threads;
    const auto res = bootstrap_oob(d, build_pipeline(o.model, o.standardize, o.select_top), o.m, o.seed, eo);
    Json r;
    r["manifest"] = std::move(manifest);
    r["n"] = d.size();
    r["pipeline"] = build_pipeline(o.model, o.standardize, o.select_top).describe();
    Json body = to_json(res);
    for (auto& [k, v] : body.items()) r[k] = v;
    double mean_distinct = 0.0;
    for (double f : res.distinct_fraction) mean_distinct += f;
    r["mean_distinct_fraction"] = mean_distinct / double(res.distinct_fraction.size());
    emit(r, o, out);
    return exit_ok;
}

// --- compare --------------------------------------------------------------

inline std::vector<double> difference_values(const Options& o) {
    if (!o.diffs.empty()) {
        const auto t = read_nonempty_table(o.diffs);
        if (t.header.size() == 1 && !t.column(o.diff_col)) return numeric_column(t, t.header.front(), o.diffs);
        return numeric_column(t, o.diff_col, o.diffs);
    }
    if (o.a.empty() || o.b.empty()) throw std::invalid_argument("compare: give --diffs, or --a and --b per-fold metric tables");
    const auto va = numeric_column(read_nonempty_table(o.a), o.metric_col, o.a);
    const auto vb = numeric_column(read_nonempty_table(o.b), o.metric_col, o.b);
    if (va.size() != vb.size())
        throw DataError("sample mismatch: '" + o.a + "' has " + std::to_string(va.size()) + " rows, '" + o.b + "' has " +
                        std::to_string(vb.size()));
    std::vector<double> d(va.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = va[i] - vb[i];
    return d;
}

inline int cmd_compare(const Options& o, Json manifest, std::ostream& out) {
    TestResult res;
    if (o.test == "mcnemar") {
        const auto ta = read_nonempty_table(o.a);
        const auto tb = read_nonempty_table(o.b);
        const auto truth_a = string_column(ta, o.truth_col, o.a);
        const auto truth_b = string_column(tb, o.truth_col, o.b);
        if (truth_a != truth_b) throw DataError("sample mismatch: truth columns of '" + o.a + "' and '" + o.b + "' differ");
        const auto pa = string_column(ta, o.pred_col, o.a);
        const auto pb = string_column(tb, o.pred_col, o.b);
        LabelEncoder enc;
        std::vector<int> t, a, b;
        for (std::size_t i = 0; i < truth_a.size(); ++i) {
            t.push_back(enc.encode(truth_a[i]));
            a.push_back(enc.encode(pa[i]));
            b.push_back(enc.encode(pb[i]));
        }
        res = mcnemar(t, a, b);
    } else if (o.test == "delong") {
        const auto sa = read_scores(o.a, o);
        const auto sb = read_scores(o.b, o);
        if (sa.size() != sb.size())
            throw DataError("sample mismatch: '" + o.a + "' and '" + o.b + "' have different numbers of rows");
        for (std::size_t i = 0; i < sa.size(); ++i)
            if (sa.records()[i].positive != sb.records()[i].positive)
                throw DataError("sample mismatch: truth differs at data row " + std::to_string(i + 1));
        res = delong_test(sa, sb);
    } else if (o.test == "corrected-t" || o.test == "repeated-kfold-t") {
        if (o.n_train == 0 || o.n_test == 0) throw std::invalid_argument("compare: --n-train and --n-test are required");
        const auto d = difference_values(o);
        res = o.test == "corrected-t" ? corrected_resampled_t(d, o.n_train, o.n_test)
                                      : corrected_repeated_kfold_t(d, o.repeats, o.k, o.n_train, o.n_test);
    } else if (o.test == "uncorrected-t") {
        res = uncorrected_resampled_t(difference_values(o));
    } else if (o.test == "5x2cv") {
        const auto d = difference_values(o);
        if (d.size() != 10) throw std::invalid_argument("compare: 5x2cv needs 10 differences (replication-major)");
        std::vector<std::vector<double>> m(5, std::vector<double>(2));
        for (std::size_t i = 0; i < 10; ++i) m[i / 2][i % 2] = d[i];
        res = five_by_two_cv_test(m);
    } else {
        throw std::invalid_argument("unknown test '" + o.test + "'");
    }
    Json r;
    r["manifest"] = std::move(manifest);
    Json body = to_json(res);
    for (auto& [k, v] : body.items()) r[k] = v;
    r["warnings"] = Json::array();
    emit(r, o, out);
    return exit_ok;
}

// --- simulate -------------------------------------------------------------

inline int cmd_simulate(const Options& o, Json manifest, std::ostream& out, std::ostream& err) {
    if (o.study != "fig4") throw std::invalid_argument("simulate: unknown study '" + o.study + "' (available: fig4)");
    SimConfig cfg = o.paper_scale ? SimConfig::paper_scale() : SimConfig{};
    if (!o.dims.empty()) cfg.dimensions = o.dims;
    if (!o.sizes.empty()) cfg.train_sizes = o.sizes;
    if (o.reps) cfg.repetitions = o.reps;
    if (o.test_size) cfg.test_size = o.test_size;
    cfg.bayes_error = o.bayes_error;
    cfg.k = o.k;
    cfg.holdout_fraction = o.holdout_fraction;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    manifest["effective"] = {{"dimensions", cfg.dimensions}, {"train_sizes", cfg.train_sizes},
                             {"repetitions", cfg.repetitions}, {"test_size", cfg.test_size},
                             {"bayes_error", cfg.bayes_error}, {"k", cfg.k},
                             {"holdout_fraction", cfg.holdout_fraction}};

    const auto res = run_estimator_study(cfg);
    std::ostringstream csv;
    write_sim_csv(csv, res);
    write_text(o.out, csv.str(), out);
    manifest["skipped_cells"] = res.skipped;
    manifest["output"] = o.out;
    write_text(o.out + ".manifest.json", manifest.dump(2) + "\n", out);
    for (const auto& s : res.skipped) err << "warning: skipped " << s << "\n";
    return exit_ok;
}

// --- driver ---------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

/// Re-runs the command recorded in a report's manifest (or a simulate
/// sidecar), after checking that the recorded inputs are unchanged.
inline int cmd_replay(const Options& o, std::ostream& out, std::ostream& err) {
    const auto j = read_json_file(o.report);
    const Json& m = j.contains("manifest") ? j["manifest"] : j;
    if (!m.contains("argv")) throw DataError("'" + o.report + "' contains no run manifest");
    for (const auto& in : m.value("inputs", Json::array())) {
        const auto path = in.at("path").get<std::string>();
        if (sha256_file(path) != in.at("sha256").get<std::string>())
            throw DataError("input '" + path + "' changed since the recorded run (sha256 mismatch)");
    }
    auto argv = m["argv"].get<std::vector<std::string>>();
    if (!argv.empty() && argv.front() == "replay") throw std::invalid_argument("replay: manifest records a replay");
    std::vector<std::string> next;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == "--out") {
            ++i;
            continue;
        }
        if (argv[i].starts_with("--out=")) continue;
        next.push_back(argv[i]);
    }
    if (!o.out.empty()) {
        next.push_back("--out");
        next.push_back(o.out);
    }
    return run(next, out, err);
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Auditable evaluation of classifiers: metrics, ROC, resampling, comparison tests, simulation.",
                 "evalkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    auto common = [&](CLI::App* s, bool seeded) {
        s->add_option("--input", o.input, "Input CSV")->required();
        s->add_option("--out", o.out, "Output file (stdout if omitted)");
        s->add_option("--positive", o.positive, "Positive class label");
        s->add_option("--threads", o.threads, "Worker threads (0 = hardware)")->capture_default_str();
        if (seeded) s->add_option("--seed", o.seed, "Master seed")->required();
    };
    auto dataset_flags = [&](CLI::App* s) {
        s->add_option("--label-col", o.label_col, "Label column")->capture_default_str();
        s->add_option("--group-col", o.group_col, "Independence-unit column (subject, patient, ...)");
        s->add_option("--model", o.model, "gnb | majority")->capture_default_str();
        s->add_flag("--standardize", o.standardize, "Standardize features (fitted per training set)");
        s->add_option("--select-top", o.select_top, "Keep the k features most correlated with the label");
    };
    auto split_flags = [&](CLI::App* s) {
        s->add_option("--k", o.k, "Number of folds")->capture_default_str();
        s->add_option("--repeats", o.repeats, "Repetitions of k-fold")->capture_default_str();
        s->add_flag("--no-stratify", o.no_stratify, "Disable stratification");
        s->add_option("--holdout", o.holdout, "Single holdout split with this test fraction instead of k-fold");
        s->add_option("--plan-in", o.plan_in, "Use a split plan from JSON");
        s->add_option("--plan-out", o.plan_out, "Write the split plan to JSON");
        s->add_option("--select-metric", o.select_metric, "Aggregate used for model selection")->capture_default_str();
        s->add_flag("--omit-scores", o.omit_scores, "Leave per-fold scores out of the report");
    };

    auto* metrics = app.add_subcommand("metrics", "Confusion-matrix measures from a prediction file");
    common(metrics, false);
    metrics->add_option("--truth-col", o.truth_col)->capture_default_str();
    metrics->add_option("--pred-col", o.pred_col)->capture_default_str();
    metrics->add_option("--count-col", o.count_col, "Optional per-row count (aggregated tables)");
    metrics->add_option("--ci-method", o.ci_method, "wald | wilson | clopper-pearson")->capture_default_str();
    metrics->add_option("--level", o.level)->capture_default_str();

    auto* roc = app.add_subcommand("roc", "ROC curve, AUC with intervals and optimal thresholds");
    common(roc, false);
    roc->add_option("--label-col", o.label_col)->capture_default_str();
    roc->add_option("--score-col", o.score_col)->capture_default_str();
    roc->add_flag("--invert-scores", o.invert_scores, "Treat lower scores as more positive");
    roc->add_option("--level", o.level)->capture_default_str();
    roc->add_option("--points-out", o.points_out, "ROC points CSV (default: <out>.points.csv)");
    roc->add_option("--cost-fp", o.cost_fp)->capture_default_str();
    roc->add_option("--cost-fn", o.cost_fn)->capture_default_str();
    roc->add_option("--prevalence", o.prevalence, "Prevalence for the min-cost threshold (default: observed)");

    auto* cv = app.add_subcommand("cv", "Cross-validation or holdout evaluation");
    common(cv, true);
    dataset_flags(cv);
    split_flags(cv);
    cv->add_flag("--unsafe-peeking", o.unsafe_peeking,
                 "Fit transformer stages on all data before splitting (report is marked INVALID)");

    auto* ncv = app.add_subcommand("nested-cv", "Nested cross-validation over a hyperparameter grid");
    common(ncv, true);
    dataset_flags(ncv);
    split_flags(ncv);
    ncv->add_option("--grid", o.grid, "Hyperparameter grid JSON")->required();
    ncv->add_option("--inner-k", o.inner_k)->capture_default_str();

    auto* boot = app.add_subcommand("bootstrap", "Out-of-bag and .632 bootstrap error");
    common(boot, true);
    dataset_flags(boot);
    boot->add_option("--m", o.m, "Bootstrap replicates")->capture_default_str();

    auto* cmp = app.add_subcommand("compare", "Significance test between two classifiers");
    cmp->add_option("--test", o.test, "mcnemar | delong | corrected-t | uncorrected-t | repeated-kfold-t | 5x2cv")
        ->required();
    cmp->add_option("--a", o.a, "First prediction/score/metric file");
    cmp->add_option("--b", o.b, "Second prediction/score/metric file");
    cmp->add_option("--diffs", o.diffs, "Per-resample differences CSV");
    cmp->add_option("--diff-col", o.diff_col)->capture_default_str();
    cmp->add_option("--metric-col", o.metric_col)->capture_default_str();
    cmp->add_option("--truth-col", o.truth_col)->capture_default_str();
    cmp->add_option("--pred-col", o.pred_col)->capture_default_str();
    cmp->add_option("--label-col", o.label_col)->capture_default_str();
    cmp->add_option("--score-col", o.score_col)->capture_default_str();
    cmp->add_option("--positive", o.positive);
    cmp->add_option("--n-train", o.n_train);
    cmp->add_option("--n-test", o.n_test);
    cmp->add_option("--repeats", o.repeats)->capture_default_str();
    cmp->add_option("--k", o.k)->capture_default_str();
    cmp->add_option("--out", o.out);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo study of CV vs. holdout accuracy estimates");
    sim->add_option("study", o.study, "Study name (fig4)")->required();
    sim->add_option("--seed", o.seed)->required();
    sim->add_option("--out", o.out, "Result CSV; the manifest goes to <out>.manifest.json")->required();
    sim->add_option("--threads", o.threads)->capture_default_str();
    sim->add_option("--dims", o.dims)->delimiter(',');
    sim->add_option("--sizes", o.sizes, "Total training sizes (balanced classes)")->delimiter(',');
    sim->add_option("--reps", o.reps, "Repetitions per cell (default 200)");
    sim->add_option("--test-size", o.test_size, "External test samples (default 100000)");
    sim->add_option("--bayes-error", o.bayes_error)->capture_default_str();
    sim->add_option("--k", o.k)->capture_default_str();
    sim->add_option("--holdout-fraction", o.holdout_fraction)->capture_default_str();
    sim->add_flag("--paper-scale", o.paper_scale, "1000 repetitions and 10^6 test samples");

    auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a report manifest");
    replay->add_option("--report", o.report, "Report JSON or manifest sidecar")->required();
    replay->add_option("--out", o.out);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        const CLI::App* sub = app.get_subcommands().front();
        if (sub == replay) return cmd_replay(o, out, err);

        std::vector<std::string> inputs;
        for (const auto* p : {&o.input, &o.plan_in, &o.grid, &o.a, &o.b, &o.diffs})
            if (!p->empty()) inputs.push_back(*p);
        const bool seeded = sub == cv || sub == ncv || sub == boot || sub == sim;
        auto manifest = make_manifest(*sub, args, seeded ? std::optional<std::uint64_t>(o.seed) : std::nullopt, inputs);

        if (sub == metrics) return cmd_metrics(o, std::move(manifest), out);
        if (sub == roc) return cmd_roc(o, std::move(manifest), out);
        if (sub == cv) return cmd_cv(o, std::move(manifest), out);
        if (sub == ncv) return cmd_nested_cv(o, std::move(manifest), out);
        if (sub == boot) return cmd_bootstrap(o, std::move(manifest), out);
        if (sub == cmp) return cmd_compare(o, std::move(manifest), out);
        if (sub == sim) return cmd_simulate(o, std::move(manifest), out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}

}  // namespace evalkit::cli
