// Writes the bundled two-class Gaussian dataset: d = 2, Bayes error 0.10,
// 500 samples per class.
//   make_two_gaussians <out.csv> [seed]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "evalkit/evalkit.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: make_two_gaussians <out.csv> [seed]\n";
        return 1;
    }
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 2024;
    const auto problem = evalkit::tune_separation(2, 0.10);
    evalkit::Rng rng = evalkit::make_rng(seed, {});
    const std::size_t counts[2] = {500, 500};
    auto data = evalkit::sample_problem(problem, counts, rng);
    data.set_metadata({"0", "1"}, {"x1", "x2"}, "label");
    std::ofstream out(argv[1]);
    evalkit::write_dataset_csv(out, data);
    std::cout << "wrote " << data.size() << " rows, Bayes error " << evalkit::bayes_error(problem) << "\n";
}
