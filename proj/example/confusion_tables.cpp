// Summary measures for the example confusion matrices, and the screening
// posterior from Bayes' rule.

#include <cstdio>

#include "evalkit/evalkit.hpp"

using namespace evalkit;

static void show(const char* title, std::int64_t tn, std::int64_t fp, std::int64_t fn, std::int64_t tp) {
    const auto m = binary_metrics(BinaryCounts{tp, fp, tn, fn});
    std::printf("%-28s acc %.3f  sens %.3f  spec %.3f  PPV %.3f  NPV %.3f\n", title, *m.accuracy, *m.sensitivity,
                *m.specificity, *m.ppv, *m.npv);
}

int main() {
    show("121 healthy / 35 disease", 116, 5, 12, 23);
    show("100 healthy / 20 disease", 95, 5, 5, 15);
    show("100 healthy / 80 disease", 95, 5, 20, 60);

    const auto cm = ConfusionMatrix::from_counts({{95, 2, 3}, {9, 11, 19}, {11, 15, 15}});
    const auto mc = multiclass_metrics(cm);
    const char* names[] = {"healthy", "disease A", "disease B"};
    for (int j = 0; j < 3; ++j)
        std::printf("recall %-10s %lld/%lld = %.3f\n", names[j], static_cast<long long>(cm.at(j, j)),
                    static_cast<long long>(cm.row_sum(j)), *mc.recall[std::size_t(j)]);

    const PriorVector priors({0.01, 0.99});
    const double likelihood[] = {0.80, 0.096};
    const auto post = bayes_posterior(priors, likelihood);
    std::printf("P(cancer | positive test) = %.4f (evidence %.5f)\n", post.posterior.values()[0], post.evidence);
}
