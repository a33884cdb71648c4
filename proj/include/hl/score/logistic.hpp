#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hl/core/model.hpp"
#include "hl/score/scorer.hpp"

namespace hl {

struct TrainConfig {
    double learning_rate = 0.01;
    long max_iters = 10000;
    double tolerance = 1e-6;
    double l2_lambda = 0.0;
    std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

// Row-major design matrix with binary labels (1 = human).
struct Dataset {
    std::size_t features = 0;
    std::vector<double> x;
    std::vector<int> y;

    std::size_t rows() const { return y.size(); }
    std::span<const double> row(std::size_t i) const { return {x.data() + i * features, features}; }
};

// Builds a dataset from labeled vectors; all must share one inventory.
Dataset make_dataset(const std::vector<LikertVector>& vectors);
Dataset subset(const Dataset& data, std::span<const std::size_t> rows);

double sigmoid(double z);

// Mean cross-entropy plus 0.5 * l2_lambda * |W|^2. `params` holds the weights
// followed by the bias; `grad`, if non-null, receives the analytic gradient in
// the same layout.
double logistic_loss(const Dataset& data, std::span<const double> params, double l2_lambda,
                     std::vector<double>* grad = nullptr);

struct LogisticFit {
    std::vector<double> weights;
    double bias = 0.0;
    long iterations = 0;
    bool converged = false;
    std::vector<double> loss_history;  // loss before each update, then the final loss
};

// Full-batch gradient descent from zero until the gradient's max-abs entry
// falls below tolerance or max_iters is reached. p(human) = sigmoid(W.A + b).
LogisticFit fit_logistic(const Dataset& data, const TrainConfig& cfg);

LinearScorer train_logistic(const std::vector<LikertVector>& vectors, const TrainConfig& cfg);

double predict_probability(std::span<const double> features, std::span<const double> weights, double bias);

// Accuracy at threshold p = 0.5.
double accuracy(const Dataset& data, std::span<const double> weights, double bias);

}  // namespace hl
