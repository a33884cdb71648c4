#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "hl/core/model.hpp"

namespace hl {

// Histogram of ratings 1..5 for one statement.
struct StatementDistribution {
    std::array<std::size_t, 5> counts{};

    std::size_t total() const;
    // Both throw ValidationError when the histogram is empty.
    double mean() const;
    double variance() const;  // population
};

// One histogram per statement. Empty input gives an empty result.
std::vector<StatementDistribution> question_distributions(const std::vector<LikertVector>& vectors);

Json distributions_json(const std::vector<StatementDistribution>& dists, const TraitInventory* inventory = nullptr);

}  // namespace hl
