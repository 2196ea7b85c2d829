#pragma once

// Built-in pipeline stages.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pipeline.hpp"

namespace evalkit {

/// z-scores each feature with the training mean and (population) sd.
class Standardizer : public Transformer {
public:
    std::string name() const override { return "standardize"; }

    class Fitted : public FittedTransform {
    public:
        Fitted(std::vector<double> mean, std::vector<double> scale) : mean_(std::move(mean)), scale_(std::move(scale)) {}
        Matrix transform(const Matrix& x) const override {
            if (x.cols() != mean_.size()) throw std::invalid_argument("standardize: feature count mismatch");
            Matrix out = x;
            for (std::size_t i = 0; i < out.rows(); ++i)
                for (std::size_t k = 0; k < out.cols(); ++k) out(i, k) = (out(i, k) - mean_[k]) / scale_[k];
            return out;
        }
        const std::vector<double>& mean() const { return mean_; }
        const std::vector<double>& scale() const { return scale_; }

    private:
        std::vector<double> mean_, scale_;
    };

    std::shared_ptr<const FittedTransform> fit(const Matrix& x, std::span<const int>, int) const override {
        if (x.rows() == 0) throw std::invalid_argument("standardize: no rows");
        std::vector<double> mean(x.cols(), 0.0), sd(x.cols(), 0.0);
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t k = 0; k < x.cols(); ++k) mean[k] += x(i, k);
        for (auto& m : mean) m /= double(x.rows());
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t k = 0; k < x.cols(); ++k) sd[k] += (x(i, k) - mean[k]) * (x(i, k) - mean[k]);
        for (auto& s : sd) {
            s = std::sqrt(s / double(x.rows()));
            if (!(s > 0.0)) s = 1.0;  // constant feature: centre only
        }
        return std::make_shared<Fitted>(std::move(mean), std::move(sd));
    }
};

/// Keeps the `k` features with the largest absolute Pearson correlation
/// with the class label (two-class: label index; more classes: label index
/// as a numeric code). Ties go to the lower feature index.
class CorrelationSelector : public Transformer {
public:
    explicit CorrelationSelector(std::size_t k) : k_(k) {
        if (k == 0) throw std::invalid_argument("CorrelationSelector: k must be >= 1");
    }
    std::string name() const override { return "select_top" + std::to_string(k_); }
    std::size_t k() const noexcept { return k_; }

    class Fitted : public FittedTransform {
    public:
        explicit Fitted(std::vector<std::size_t> cols) : cols_(std::move(cols)) {}
        Matrix transform(const Matrix& x) const override {
            for (auto c : cols_)
                if (c >= x.cols()) throw std::invalid_argument("select: feature count mismatch");
            return x.select_cols(cols_);
        }
        const std::vector<std::size_t>& columns() const { return cols_; }

    private:
        std::vector<std::size_t> cols_;
    };

    static std::vector<double> abs_correlations(const Matrix& x, std::span<const int> y) {
        const std::size_t n = x.rows(), d = x.cols();
        double ym = 0.0;
        for (int v : y) ym += v;
        ym /= double(n);
        double syy = 0.0;
        for (int v : y) syy += (v - ym) * (v - ym);
        std::vector<double> mean(d, 0.0), sxx(d, 0.0), sxy(d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < d; ++k) mean[k] += x(i, k);
        for (auto& m : mean) m /= double(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double dy = y[i] - ym;
            for (std::size_t k = 0; k < d; ++k) {
                const double dx = x(i, k) - mean[k];
                sxx[k] += dx * dx;
                sxy[k] += dx * dy;
            }
        }
        std::vector<double> r(d, 0.0);
        for (std::size_t k = 0; k < d; ++k)
            if (sxx[k] > 0.0 && syy > 0.0) r[k] = std::fabs(sxy[k] / std::sqrt(sxx[k] * syy));
        return r;
    }

    std::shared_ptr<const FittedTransform> fit(const Matrix& x, std::span<const int> y, int) const override {
        if (x.rows() != y.size() || x.rows() == 0) throw std::invalid_argument("select: bad training data");
        const auto r = abs_correlations(x, y);
        std::vector<std::size_t> idx(r.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        const std::size_t keep = std::min(k_, idx.size());
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
        idx.resize(keep);
        std::sort(idx.begin(), idx.end());
        return std::make_shared<Fitted>(std::move(idx));
    }

private:
    std::size_t k_;
};

/// Appends `copies` jittered copies of every training row (Gaussian noise
/// with sd `sigma` per feature). Training-only by construction.
class GaussianJitter : public Augmenter {
public:
    GaussianJitter(std::size_t copies, double sigma) : copies_(copies), sigma_(sigma) {
        if (!(sigma >= 0.0)) throw std::invalid_argument("GaussianJitter: sigma must be >= 0");
    }
    std::string name() const override { return "jitter"; }
    void augment(Matrix& x, std::vector<int>& y, Rng& rng) const override {
        const std::size_t n = x.rows();
        std::normal_distribution<double> z(0.0, sigma_);
        std::vector<double> buf(x.cols());
        for (std::size_t c = 0; c < copies_; ++c)
            for (std::size_t i = 0; i < n; ++i) {
                auto src = x.row(i);
                for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = src[k] + z(rng);
                x.append_row(buf);
                y.push_back(y[i]);
            }
    }

private:
    std::size_t copies_;
    double sigma_;
};

}  // namespace evalkit
