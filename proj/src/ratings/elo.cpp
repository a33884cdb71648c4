#include "hl/ratings/elo.hpp"

#include <cmath>
#include <numeric>

#include "hl/error.hpp"
#include "hl/random.hpp"

namespace hl {

double expected_score(double r_a, double r_b) { return 1.0 / (1.0 + std::pow(10.0, (r_b - r_a) / 400.0)); }

std::pair<double, double> elo_update(double r_a, double r_b, double s_a, double k) {
    if (!is_valid_score(s_a))
        throw ValidationError("score " + std::to_string(s_a) + " is not one of {1, 0.75, 0.5, 0.25, 0}");
    const double e_a = expected_score(r_a, r_b);
    const double e_b = 1.0 - e_a;
    const double s_b = 1.0 - s_a;
    return {r_a + k * (s_a - e_a), r_b + k * (s_b - e_b)};
}

std::map<std::string, double> elo_sequential(const std::vector<ComparisonRecord>& comparisons,
                                             std::span<const std::size_t> order, double initial_rating, double k) {
    std::map<std::string, double> ratings;
    for (const auto& c : comparisons) {
        ratings.try_emplace(c.model_a, initial_rating);
        ratings.try_emplace(c.model_b, initial_rating);
    }
    for (auto idx : order) {
        const auto& c = comparisons.at(idx);
        auto& ra = ratings[c.model_a];
        auto& rb = ratings[c.model_b];
        std::tie(ra, rb) = elo_update(ra, rb, c.s_a, k);
    }
    return ratings;
}

std::vector<std::size_t> shuffle_order(std::size_t n, std::uint64_t seed, int shuffle) {
    Rng rng(derive_seed(seed, "elo-shuffle", static_cast<std::uint64_t>(shuffle)));
    return rng.permutation(n);
}

std::map<std::string, ModelRating> elo_ratings(const std::vector<ComparisonRecord>& comparisons,
                                               const EloParams& params) {
    if (comparisons.empty()) throw ValidationError("elo_ratings needs at least one comparison");
    if (params.shuffles < 1) throw ValidationError("elo_ratings needs at least one shuffle");
    for (const auto& c : comparisons) validate(c);

    std::map<std::string, std::vector<double>> finals;
    for (int s = 0; s < params.shuffles; ++s) {
        const auto order = shuffle_order(comparisons.size(), params.seed, s);
        for (const auto& [model, r] : elo_sequential(comparisons, order, params.initial_rating, params.k))
            finals[model].push_back(r);
    }
    std::map<std::string, ModelRating> out;
    for (const auto& [model, values] : finals) {
        ModelRating mr;
        for (double v : values) mr.mean += v;
        mr.mean /= static_cast<double>(values.size());
        for (double v : values) mr.std += (v - mr.mean) * (v - mr.mean);
        mr.std = std::sqrt(mr.std / static_cast<double>(values.size()));
        out[model] = mr;
    }
    for (const auto& c : comparisons) {
        ++out[c.model_a].comparisons;
        ++out[c.model_b].comparisons;
    }
    return out;
}

std::map<std::string, double> win_rate(const std::vector<ComparisonRecord>& comparisons) {
    // Scores are multiples of 1/4, so integer quarter-point sums are exact and
    // the result cannot depend on input order.
    std::map<std::string, std::pair<long long, long long>> acc;  // quarters, appearances
    for (const auto& c : comparisons) {
        validate(c);
        const auto qa = std::llround(c.s_a * 4.0);
        auto& a = acc[c.model_a];
        a.first += qa;
        ++a.second;
        auto& b = acc[c.model_b];
        b.first += 4 - qa;
        ++b.second;
    }
    std::map<std::string, double> out;
    for (const auto& [model, v] : acc) out[model] = static_cast<double>(v.first) / 4.0 / static_cast<double>(v.second);
    return out;
}

Json ratings_report(const std::vector<ComparisonRecord>& comparisons, const EloParams& params) {
    Json report;
    report["elo"] = Json::object();
    for (const auto& [model, r] : elo_ratings(comparisons, params))
        report["elo"][model] = {{"mean", r.mean}, {"std", r.std}, {"comparisons", r.comparisons}};
    report["win_rate"] = win_rate(comparisons);
    report["n_comparisons"] = comparisons.size();
    report["params"] = {{"r0", params.initial_rating},
                        {"k", params.k},
                        {"shuffles", params.shuffles},
                        {"seed", params.seed},
                        {"rng", std::string(Rng::kName)}};
    return report;
}

}  // namespace hl
