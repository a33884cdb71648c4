#include "hl/score/logistic.hpp"

#include <algorithm>
#include <cmath>

#include "hl/error.hpp"

namespace hl {

void validate(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
    if (cfg.max_iters <= 0 || cfg.max_iters > 1'000'000) throw ValidationError("max_iters must be in [1, 1e6]");
    if (!(cfg.tolerance > 0.0) || !(cfg.tolerance < 1.0)) throw ValidationError("tolerance must be in (0, 1)");
    if (!(cfg.l2_lambda >= 0.0)) throw ValidationError("l2_lambda must be non-negative");
}

Dataset make_dataset(const std::vector<LikertVector>& vectors) {
    if (vectors.empty()) throw ValidationError("no training vectors");
    Dataset d;
    d.features = vectors.front().ratings.size();
    for (const auto& v : vectors) {
        if (v.inventory_name != vectors.front().inventory_name)
            throw ValidationError("training vectors come from different inventories");
        if (v.ratings.size() != d.features) throw ValidationError("training vectors have different lengths");
        if (!v.label) throw ValidationError("training vector '" + v.dialogue_id + "' has no label");
        d.x.insert(d.x.end(), v.ratings.begin(), v.ratings.end());
        d.y.push_back(*v.label);
    }
    return d;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
    Dataset out;
    out.features = data.features;
    out.x.reserve(rows.size() * data.features);
    for (auto r : rows) {
        auto src = data.row(r);
        out.x.insert(out.x.end(), src.begin(), src.end());
        out.y.push_back(data.y[r]);
    }
    return out;
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double logistic_loss(const Dataset& data, std::span<const double> params, double l2_lambda, std::vector<double>* grad) {
    const std::size_t f = data.features;
    const std::size_t n = data.rows();
    if (params.size() != f + 1) throw ValidationError("parameter vector has wrong length");
    if (grad) grad->assign(f + 1, 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = data.row(i);
        double z = params[f];
        for (std::size_t k = 0; k < f; ++k) z += params[k] * xi[k];
        const double y = data.y[i];
        // -[y log p + (1-y) log(1-p)] with p = sigmoid(z)
        loss += softplus(z) - y * z;
        if (grad) {
            const double r = sigmoid(z) - y;
            for (std::size_t k = 0; k < f; ++k) (*grad)[k] += r * xi[k];
            (*grad)[f] += r;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    double reg = 0.0;
    for (std::size_t k = 0; k < f; ++k) reg += params[k] * params[k];
    loss += 0.5 * l2_lambda * reg;
    if (grad) {
        for (auto& g : *grad) g *= inv_n;
        for (std::size_t k = 0; k < f; ++k) (*grad)[k] += l2_lambda * params[k];
    }
    return loss;
}

LogisticFit fit_logistic(const Dataset& data, const TrainConfig& cfg) {
    validate(cfg);
    if (data.rows() == 0) throw ValidationError("no training rows");
    const bool has_pos = std::find(data.y.begin(), data.y.end(), 1) != data.y.end();
    const bool has_neg = std::find(data.y.begin(), data.y.end(), 0) != data.y.end();
    if (!has_pos || !has_neg) throw ValidationError("training data must contain both human and ai examples");

    std::vector<double> params(data.features + 1, 0.0);
    std::vector<double> grad;
    LogisticFit fit;
    long iter = 0;
    for (;; ++iter) {
        const double loss = logistic_loss(data, params, cfg.l2_lambda, &grad);
        if (!std::isfinite(loss)) throw NumericalError("loss became non-finite at iteration " + std::to_string(iter), iter);
        fit.loss_history.push_back(loss);
        double gmax = 0.0;
        for (double g : grad) {
            if (!std::isfinite(g))
                throw NumericalError("gradient became non-finite at iteration " + std::to_string(iter), iter);
            gmax = std::max(gmax, std::abs(g));
        }
        if (gmax < cfg.tolerance) {
            fit.converged = true;
            break;
        }
        if (iter >= cfg.max_iters) break;
        for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg.learning_rate * grad[k];
    }
    fit.iterations = iter;
    fit.bias = params.back();
    params.pop_back();
    fit.weights = std::move(params);
    return fit;
}

LinearScorer train_logistic(const std::vector<LikertVector>& vectors, const TrainConfig& cfg) {
    auto fit = fit_logistic(make_dataset(vectors), cfg);
    return LinearScorer{vectors.front().inventory_name, std::move(fit.weights), fit.bias};
}

double predict_probability(std::span<const double> features, std::span<const double> weights, double bias) {
    double z = bias;
    for (std::size_t k = 0; k < features.size(); ++k) z += features[k] * weights[k];
    return sigmoid(z);
}

double accuracy(const Dataset& data, std::span<const double> weights, double bias) {
    if (data.rows() == 0) throw ValidationError("accuracy on an empty dataset");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        const int pred = predict_probability(data.row(i), weights, bias) >= 0.5 ? 1 : 0;
        correct += pred == data.y[i];
    }
    return static_cast<double>(correct) / static_cast<double>(data.rows());
}

}  // namespace hl
