#include "hl/score/cross_validation.hpp"

#include <cmath>

#include "hl/error.hpp"
#include "hl/parallel.hpp"
#include "hl/random.hpp"

namespace hl {

void to_json(Json& j, const CvReport& r) {
    j = Json{{"fold_count", r.fold_count},
             {"repeat_count", r.repeat_count},
             {"mean_accuracy", r.mean_accuracy},
             {"std_accuracy", r.std_accuracy},
             {"per_repeat", r.per_repeat}};
}

void from_json(const Json& j, CvReport& r) {
    r.fold_count = j.at("fold_count").get<int>();
    r.repeat_count = j.at("repeat_count").get<int>();
    r.mean_accuracy = j.at("mean_accuracy").get<double>();
    r.std_accuracy = j.at("std_accuracy").get<double>();
    r.per_repeat = j.at("per_repeat").get<std::vector<double>>();
}

std::vector<int> stratified_folds(const std::vector<int>& labels, int folds, std::uint64_t seed, int repeat) {
    Rng rng(derive_seed(seed, "cv-repeat", static_cast<std::uint64_t>(repeat)));
    std::vector<std::size_t> order;
    for (int cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) members.push_back(i);
        rng.shuffle(members);
        order.insert(order.end(), members.begin(), members.end());
    }
    std::vector<int> fold(labels.size(), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) fold[order[pos]] = static_cast<int>(pos % folds);
    return fold;
}

CvReport cross_validate(const Dataset& data, int folds, int repeats, const TrainConfig& cfg, std::uint64_t seed,
                        std::size_t parallelism) {
    if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
    if (repeats < 1) throw ValidationError("cross-validation needs at least 1 repeat");
    validate(cfg);
    std::size_t pos = 0;
    for (int y : data.y) pos += y == 1;
    const std::size_t neg = data.rows() - pos;
    if (pos < static_cast<std::size_t>(folds) || neg < static_cast<std::size_t>(folds))
        throw ValidationError("each class needs at least " + std::to_string(folds) + " examples for " +
                              std::to_string(folds) + "-fold cross-validation");

    CvReport report;
    report.fold_count = folds;
    report.repeat_count = repeats;
    report.per_repeat.assign(static_cast<std::size_t>(repeats), 0.0);
    auto errors = parallel_for(static_cast<std::size_t>(repeats), parallelism, [&](std::size_t r) {
        const auto fold = stratified_folds(data.y, folds, seed, static_cast<int>(r));
        double acc_sum = 0.0;
        for (int k = 0; k < folds; ++k) {
            std::vector<std::size_t> train_rows, test_rows;
            for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == k ? test_rows : train_rows).push_back(i);
            auto fit = fit_logistic(subset(data, train_rows), cfg);
            acc_sum += accuracy(subset(data, test_rows), fit.weights, fit.bias);
        }
        report.per_repeat[r] = acc_sum / folds;
    });
    rethrow_first(errors);

    double sum = 0.0;
    for (double a : report.per_repeat) sum += a;
    report.mean_accuracy = sum / repeats;
    double ss = 0.0;
    for (double a : report.per_repeat) ss += (a - report.mean_accuracy) * (a - report.mean_accuracy);
    report.std_accuracy = std::sqrt(ss / repeats);
    return report;
}

}  // namespace hl
