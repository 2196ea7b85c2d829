// Feature selection on pure noise: selecting features on all data before
// cross-validation looks better than chance, nested CV does not.

#include <cstdio>
#include <memory>

#include "evalkit/evalkit.hpp"

using namespace evalkit;

int main() {
    Rng rng = make_rng(11, {});
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix x(50, 1000);
    std::vector<int> y(50);
    for (std::size_t i = 0; i < 50; ++i) {
        y[i] = int(i % 2);
        for (std::size_t j = 0; j < 1000; ++j) x(i, j) = noise(rng);
    }
    const Dataset data(std::move(x), std::move(y), 2);
    const auto plan = kfold_split(data, 5, true, false, 1, 3);

    Pipeline top10(std::make_shared<GnbLearner>());
    top10.then(std::shared_ptr<const Transformer>(std::make_shared<CorrelationSelector>(10)));
    EvalOptions unsafe;
    unsafe.unsafe_fit_on_all_data = true;
    const auto peeked = cross_validate(data, top10, plan, {}, unsafe);

    PipelineFamily family = [](const HyperParams& hp) {
        Pipeline p(std::make_shared<GnbLearner>());
        p.then(std::shared_ptr<const Transformer>(
            std::make_shared<CorrelationSelector>(static_cast<std::size_t>(hp.at("select_top")))));
        return p;
    };
    const std::vector<HyperParams> grid = {{{"select_top", 5}}, {{"select_top", 10}}, {{"select_top", 20}}};
    const auto nested = nested_cv(data, family, grid, plan, 5);

    std::printf("selection on all data: accuracy %.3f (%s)\n", *peeked.mean("accuracy"), peeked.invalid_reason.c_str());
    std::printf("nested CV:             accuracy %.3f\n", *nested.mean("accuracy"));
}
