#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hl/ratings/comparison.hpp"

namespace hl {

inline constexpr double kDefaultInitialRating = 1500.0;
inline constexpr double kDefaultK = 32.0;
inline constexpr int kDefaultShuffles = 500;

// E_A = 1 / (1 + 10^((r_b - r_a) / 400)).
double expected_score(double r_a, double r_b);

// One partial-win update; s_a must be one of the five admissible scores.
std::pair<double, double> elo_update(double r_a, double r_b, double s_a, double k = kDefaultK);

struct EloParams {
    double initial_rating = kDefaultInitialRating;
    double k = kDefaultK;
    int shuffles = kDefaultShuffles;
    std::uint64_t seed = 0;
};

struct ModelRating {
    double mean = 0.0;
    double std = 0.0;  // population std across shuffles
    std::size_t comparisons = 0;
};

// Final ratings after applying the comparisons in the given order.
std::map<std::string, double> elo_sequential(const std::vector<ComparisonRecord>& comparisons,
                                             std::span<const std::size_t> order, double initial_rating, double k);

// Order used by shuffle number `shuffle` (0-based) for a given seed.
std::vector<std::size_t> shuffle_order(std::size_t n, std::uint64_t seed, int shuffle);

// Mean and std of final ratings over `shuffles` seeded permutations.
std::map<std::string, ModelRating> elo_ratings(const std::vector<ComparisonRecord>& comparisons,
                                               const EloParams& params);

// Mean observed score per model over its appearances; order invariant.
std::map<std::string, double> win_rate(const std::vector<ComparisonRecord>& comparisons);

Json ratings_report(const std::vector<ComparisonRecord>& comparisons, const EloParams& params);

}  // namespace hl
