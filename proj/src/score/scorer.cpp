#include "hl/score/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hl/digest.hpp"
#include "hl/error.hpp"

namespace hl {

namespace detail {
extern const std::string_view kHl16qScorerJson;
extern const std::string_view kHl16qInventoryJson;
extern const std::string_view kHl32qInventoryJson;
}  // namespace detail

void validate(const LinearScorer& s) {
    if (s.inventory_name.empty()) throw ValidationError("scorer has no inventory name");
    if (s.weights.empty()) throw ValidationError("scorer has no weights");
    for (double w : s.weights)
        if (!std::isfinite(w)) throw ValidationError("scorer weight is not finite");
    if (!std::isfinite(s.bias)) throw ValidationError("scorer bias is not finite");
}

void to_json(Json& j, const LinearScorer& s) {
    j = Json{{"inventory", s.inventory_name}, {"weights", s.weights}, {"bias", s.bias}};
}

void from_json(const Json& j, LinearScorer& s) {
    s.inventory_name = j.at("inventory").get<std::string>();
    s.weights = j.at("weights").get<std::vector<double>>();
    s.bias = j.at("bias").get<double>();
    validate(s);
}

double hl_score(std::span<const double> features, const LinearScorer& scorer) {
    if (features.size() != scorer.weights.size())
        throw ValidationError("feature vector has " + std::to_string(features.size()) + " entries, scorer '" +
                              scorer.inventory_name + "' expects " + std::to_string(scorer.weights.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) s += features[i] * scorer.weights[i];
    return s + scorer.bias;
}

double hl_score(const LikertVector& vector, const LinearScorer& scorer) {
    if (vector.inventory_name != scorer.inventory_name)
        throw ValidationError("vector '" + vector.dialogue_id + "' is rated against '" + vector.inventory_name +
                              "' but the scorer uses '" + scorer.inventory_name + "'");
    std::vector<double> features(vector.ratings.begin(), vector.ratings.end());
    return hl_score(features, scorer);
}

std::string_view published_hl16q_json() { return detail::kHl16qScorerJson; }

const LinearScorer& published_hl16q() {
    static const LinearScorer scorer = [] {
        if (sha256_hex(detail::kHl16qScorerJson) != kPublishedHl16qSha256)
            throw ValidationError("embedded HL16Q scorer failed its checksum");
        auto s = Json::parse(detail::kHl16qScorerJson).get<LinearScorer>();
        if (s.weights.size() != 16) throw ValidationError("embedded HL16Q scorer does not have 16 weights");
        return s;
    }();
    return scorer;
}

const TraitInventory& hl16q_inventory() {
    static const TraitInventory inv = Json::parse(detail::kHl16qInventoryJson).get<TraitInventory>();
    return inv;
}

const TraitInventory& hl32q_inventory() {
    static const TraitInventory inv = Json::parse(detail::kHl32qInventoryJson).get<TraitInventory>();
    return inv;
}

FeatureSelection select_top_features(const LinearScorer& scorer, const TraitInventory& inventory, long long m,
                                     const std::string& reduced_name) {
    if (m <= 0) throw ValidationError("number of selected features must be positive");
    if (static_cast<std::size_t>(m) > scorer.weights.size())
        throw ValidationError("cannot select " + std::to_string(m) + " of " + std::to_string(scorer.weights.size()) +
                              " features");
    if (inventory.size() != scorer.weights.size())
        throw ValidationError("inventory '" + inventory.name + "' size does not match scorer weights");
    std::vector<std::size_t> order(scorer.weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(scorer.weights[a]) > std::abs(scorer.weights[b]);
    });
    FeatureSelection sel;
    sel.indices.assign(order.begin(), order.begin() + m);
    std::sort(sel.indices.begin(), sel.indices.end());
    sel.inventory.name = reduced_name;
    for (auto i : sel.indices) sel.inventory.statements.push_back(inventory.statements[i]);
    return sel;
}

LikertVector project(const LikertVector& v, std::span<const std::size_t> indices, const std::string& inventory_name) {
    LikertVector out;
    out.dialogue_id = v.dialogue_id;
    out.inventory_name = inventory_name;
    out.label = v.label;
    for (auto i : indices) out.ratings.push_back(v.ratings.at(i));
    return out;
}

}  // namespace hl
