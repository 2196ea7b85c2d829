#pragma once

// Monte Carlo study of accuracy estimators (k-fold CV vs. holdout) on
// two-class Gaussian problems with a prescribed Bayes error.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "models.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "resampling.hpp"
#include "rng.hpp"

namespace evalkit {

/// Two equiprobable unit-variance classes with means +-(delta / (2 sqrt(d)))
/// along every axis, so the mean separation is delta for any d and the
/// Bayes error is Phi(-delta / 2).
inline GaussianProblemSpec tune_separation(std::size_t d, double target_bayes_error) {
    if (d == 0) throw std::invalid_argument("tune_separation: d must be >= 1");
    if (!(target_bayes_error > 0.0 && target_bayes_error <= 0.5))
        throw std::invalid_argument("tune_separation: target Bayes error must be in (0, 0.5]");
    const double delta = 2.0 * numeric::normal_quantile(1.0 - target_bayes_error);
    const double offset = delta / (2.0 * std::sqrt(double(d)));
    GaussianProblemSpec p;
    p.means = {std::vector<double>(d, -offset), std::vector<double>(d, offset)};
    p.variances.assign(d, 1.0);
    p.priors = {0.5, 0.5};
    return p;
}

/// Mean separation (Mahalanobis distance) of a tuned problem.
inline double separation(const GaussianProblemSpec& p) {
    double s = 0.0;
    for (std::size_t k = 0; k < p.dimension(); ++k) {
        const double e = p.means[1][k] - p.means[0][k];
        s += e * e / p.variances[k];
    }
    return std::sqrt(s);
}

/// Closed-form Bayes error of a two-class, equal-prior problem.
inline double bayes_error(const GaussianProblemSpec& p) { return numeric::normal_cdf(-separation(p) / 2.0); }

struct SimConfig {
    std::vector<std::size_t> dimensions{1, 3, 5, 9};
    std::vector<std::size_t> train_sizes{50, 100, 200, 400};
    double bayes_error = 0.05;
    std::size_t repetitions = 200;
    std::size_t test_size = 100000;
    std::size_t k = 5;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    static SimConfig paper_scale() {
        SimConfig c;
        c.repetitions = 1000;
        c.test_size = 1000000;
        return c;
    }
};

struct SimRow {
    std::size_t dimension = 0;
    std::size_t train_size = 0;
    std::string estimator;
    double mae = 0.0;   // mean |estimate - external-test accuracy|
    double bias = 0.0;  // mean (estimate - external-test accuracy)
    double variance = 0.0;
    std::size_t repetitions = 0;
    double zero_error_fraction = 0.0;  // repetitions where the estimate was accuracy 1
    double mean_true_accuracy = 0.0;
};

struct SimResult {
    SimConfig config;
    std::vector<SimRow> rows;
    std::vector<std::string> skipped;  // infeasible (dimension, train size) cells

    const SimRow* find(std::size_t d, std::size_t n, const std::string& est) const {
        for (const auto& r : rows)
            if (r.dimension == d && r.train_size == n && r.estimator == est) return &r;
        return nullptr;
    }
};

inline std::string cv_estimator_name(std::size_t k) { return "cv" + std::to_string(k); }
inline std::string holdout_estimator_name(double fraction) {
    return "holdout" + std::to_string(static_cast<int>(std::lround(fraction * 100.0)));
}

/// Fraction of rows classified correctly.
inline double accuracy_on(const Model& model, const Dataset& data) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < data.size(); ++i) ok += model.predict(data.features().row(i)) == data.labels()[i];
    return double(ok) / double(data.size());
}

namespace detail {
inline SimRow summarise(std::size_t d, std::size_t n, std::string name, const std::vector<double>& err,
                        const std::vector<double>& est, const std::vector<double>& truth) {
    SimRow row;
    row.dimension = d;
    row.train_size = n;
    row.estimator = std::move(name);
    row.repetitions = err.size();
    double abs_sum = 0.0, sum = 0.0, zero = 0.0, tsum = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        abs_sum += std::fabs(err[i]);
        sum += err[i];
        zero += est[i] == 1.0 ? 1.0 : 0.0;
        tsum += truth[i];
    }
    const double r = double(err.size());
    row.mae = abs_sum / r;
    row.bias = sum / r;
    double ss = 0.0;
    for (double e : err) ss += (e - row.bias) * (e - row.bias);
    row.variance = err.size() > 1 ? ss / (r - 1.0) : 0.0;
    row.zero_error_fraction = zero / r;
    row.mean_true_accuracy = tsum / r;
    return row;
}
}  // namespace detail

/// For every (dimension, training size) cell and repetition: draw a balanced
/// training set, train GNB on all of it and measure its accuracy on a large
/// external test set; compare that with the stratified k-fold CV estimate
/// and with the stratified holdout estimate computed from the training set.
inline SimResult run_estimator_study(const SimConfig& cfg) {
    if (cfg.repetitions < 1) throw std::invalid_argument("run_estimator_study: repetitions must be >= 1");
    if (cfg.test_size < 2) throw std::invalid_argument("run_estimator_study: test size must be >= 2");
    if (cfg.k < 2) throw std::invalid_argument("run_estimator_study: k must be >= 2");
    SimResult result;
    result.config = cfg;
    const auto gnb = std::make_shared<GnbLearner>();
    const Pipeline pipeline(gnb);

    for (std::size_t d : cfg.dimensions) {
        const auto problem = tune_separation(d, cfg.bayes_error);
        Rng test_rng = make_rng(cfg.seed, {d, 0x7e57ULL});
        const std::size_t test_counts[2] = {cfg.test_size / 2, cfg.test_size - cfg.test_size / 2};
        const Dataset external = sample_problem(problem, test_counts, test_rng);

        for (std::size_t n : cfg.train_sizes) {
            const std::size_t per_class[2] = {n / 2, n - n / 2};
            const auto holdout_test_min = std::min(per_class[0], per_class[1]);
            if (n < 2 * cfg.k || per_class[0] < cfg.k ||
                detail::round_half_up(double(holdout_test_min) * cfg.holdout_fraction) < 1) {
                result.skipped.push_back("d=" + std::to_string(d) + " n=" + std::to_string(n) +
                                         ": training size too small for the requested estimators");
                continue;
            }
            std::vector<double> truth(cfg.repetitions), cv(cfg.repetitions), ho(cfg.repetitions);
            parallel_for(cfg.repetitions, cfg.threads, [&](std::size_t r) {
                Rng rng = make_rng(cfg.seed, {d, n, r});
                const Dataset train = sample_problem(problem, per_class, rng);
                const auto model = gnb_fit(train);
                truth[r] = accuracy_on(model, external);

                const auto cv_plan = kfold_split(train, cfg.k, true, false, 1, derive_seed(cfg.seed, {d, n, r, 1}));
                cv[r] = *cross_validate(train, pipeline, cv_plan).mean("accuracy");
                const auto ho_plan = holdout_split(train, cfg.holdout_fraction, true, derive_seed(cfg.seed, {d, n, r, 2}));
                ho[r] = *cross_validate(train, pipeline, ho_plan).mean("accuracy");
            });
            std::vector<double> cv_err(cfg.repetitions), ho_err(cfg.repetitions);
            for (std::size_t r = 0; r < cfg.repetitions; ++r) {
                cv_err[r] = cv[r] - truth[r];
                ho_err[r] = ho[r] - truth[r];
            }
            result.rows.push_back(detail::summarise(d, n, cv_estimator_name(cfg.k), cv_err, cv, truth));
            result.rows.push_back(detail::summarise(d, n, holdout_estimator_name(cfg.holdout_fraction), ho_err, ho, truth));
        }
    }
    return result;
}

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline void write_sim_csv(std::ostream& out, const SimResult& res) {
    out << "dimension,train_size,estimator,mae,bias,variance,repetitions,zero_error_fraction,mean_true_accuracy\n";
    for (const auto& r : res.rows)
        out << r.dimension << ',' << r.train_size << ',' << r.estimator << ',' << format_double(r.mae) << ','
            << format_double(r.bias) << ',' << format_double(r.variance) << ',' << r.repetitions << ','
            << format_double(r.zero_error_fraction) << ',' << format_double(r.mean_true_accuracy) << '\n';
}

}  // namespace evalkit
