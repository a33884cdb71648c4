#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hl/core/model.hpp"

namespace hl {

// Linear human-likeness model: score = sum_i A_i * W_i + b.
struct LinearScorer {
    std::string inventory_name;
    std::vector<double> weights;
    double bias = 0.0;
};

void validate(const LinearScorer& s);
void to_json(Json& j, const LinearScorer& s);
void from_json(const Json& j, LinearScorer& s);

// Raw linear score, no sigmoid. Accepts any real-valued features so callers
// can probe the model outside the 1..5 rating domain.
double hl_score(std::span<const double> features, const LinearScorer& scorer);
double hl_score(const LikertVector& vector, const LinearScorer& scorer);

// The published 16-trait model and its inventories, parsed from assets that
// are embedded at build time and checked against a SHA-256 on first use.
const LinearScorer& published_hl16q();
const TraitInventory& hl16q_inventory();
const TraitInventory& hl32q_inventory();

// Exact embedded text of the published scorer file.
std::string_view published_hl16q_json();
inline constexpr std::string_view kPublishedHl16qSha256 =
    "b322398a30c55c41cb5d8150ed35ac44f4b3c9b0e199a9162e24e714842fa10a";

struct FeatureSelection {
    std::vector<std::size_t> indices;  // ascending, original inventory order
    TraitInventory inventory;
};

// Keeps the m traits with the largest |W_i| (ties to the lower index).
FeatureSelection select_top_features(const LinearScorer& scorer, const TraitInventory& inventory, long long m,
                                     const std::string& reduced_name);

LikertVector project(const LikertVector& v, std::span<const std::size_t> indices, const std::string& inventory_name);

}  // namespace hl
