// GNB against the majority-class baseline on the bundled two-Gaussian data:
// repeated 10-fold CV, corrected repeated k-fold t-test, and DeLong on the
// pooled out-of-fold scores of one repetition.

#include <cstdio>
#include <memory>

#include "evalkit/evalkit.hpp"

using namespace evalkit;

int main(int argc, char** argv) {
    const std::string path = argc > 1 ? argv[1] : "example/data/two_gaussians.csv";
    const auto data = load_dataset(path, Schema{});
    const auto plan = kfold_split(data, 10, true, false, 5, 42);

    const auto gnb = cross_validate(data, Pipeline(std::make_shared<GnbLearner>()), plan);
    const auto base = cross_validate(data, Pipeline(std::make_shared<MajorityLearner>()), plan);
    std::vector<double> diffs;
    for (std::size_t i = 0; i < plan.folds.size(); ++i)
        diffs.push_back(*gnb.folds[i].values.at("accuracy") - *base.folds[i].values.at("accuracy"));
    const auto& f0 = plan.folds.front();
    const auto t = corrected_repeated_kfold_t(diffs, 5, 10, f0.train.size(), f0.test.size());
    std::printf("accuracy: gnb %.3f, majority %.3f\n", *gnb.mean("accuracy"), *base.mean("accuracy"));
    std::printf("corrected repeated k-fold t = %.2f, p = %.3g\n", t.statistic, t.p_value);
    std::printf("pooled AUC %.3f, fold-averaged AUC %.3f\n", *gnb.pooled_auc, *gnb.averaged_auc->mean);
}
