#pragma once

#include <cstdint>
#include <vector>

#include "hl/score/logistic.hpp"

namespace hl {

struct CvReport {
    int fold_count = 0;
    int repeat_count = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population std over per_repeat
    std::vector<double> per_repeat;  // mean held-out fold accuracy per repeat
};

void to_json(Json& j, const CvReport& r);
void from_json(const Json& j, CvReport& r);

// Stratified fold index for every row of one repeat; each repeat shuffles with
// derive_seed(seed, "cv-repeat", repeat).
std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed, int repeat);

// Repeated stratified k-fold CV. Repeats run on up to `parallelism` threads;
// results do not depend on the thread count.
CvReport cross_validate(const Dataset& data, int folds, int repeats, const TrainConfig& cfg, std::uint64_t seed,
                        std::size_t parallelism = 1);

}  // namespace hl
