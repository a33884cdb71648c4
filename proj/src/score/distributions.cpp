#include "hl/score/distributions.hpp"

#include "hl/error.hpp"

namespace hl {

std::size_t StatementDistribution::total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

double StatementDistribution::mean() const {
    const auto n = total();
    if (n == 0) throw ValidationError("mean of an empty rating histogram");
    double s = 0.0;
    for (std::size_t r = 0; r < 5; ++r) s += static_cast<double>(counts[r]) * static_cast<double>(r + 1);
    return s / static_cast<double>(n);
}

double StatementDistribution::variance() const {
    const double m = mean();
    double s = 0.0;
    for (std::size_t r = 0; r < 5; ++r) {
        const double d = static_cast<double>(r + 1) - m;
        s += static_cast<double>(counts[r]) * d * d;
    }
    return s / static_cast<double>(total());
}

std::vector<StatementDistribution> question_distributions(const std::vector<LikertVector>& vectors) {
    if (vectors.empty()) return {};
    const auto& first = vectors.front();
    std::vector<StatementDistribution> out(first.ratings.size());
    for (const auto& v : vectors) {
        if (v.inventory_name != first.inventory_name || v.ratings.size() != first.ratings.size())
            throw ValidationError("vector '" + v.dialogue_id + "' mixes inventories ('" + v.inventory_name +
                                  "' vs '" + first.inventory_name + "')");
        validate(v);
        for (std::size_t i = 0; i < v.ratings.size(); ++i) ++out[i].counts[static_cast<std::size_t>(v.ratings[i] - 1)];
    }
    return out;
}

Json distributions_json(const std::vector<StatementDistribution>& dists, const TraitInventory* inventory) {
    Json out = Json::array();
    for (std::size_t i = 0; i < dists.size(); ++i) {
        Json row;
        row["index"] = i;
        if (inventory && i < inventory->size()) row["statement"] = inventory->statements[i];
        Json hist = Json::object();
        for (std::size_t r = 0; r < 5; ++r) hist[std::to_string(r + 1)] = dists[i].counts[r];
        row["histogram"] = hist;
        row["count"] = dists[i].total();
        if (dists[i].total() > 0) {
            row["mean"] = dists[i].mean();
            row["variance"] = dists[i].variance();
        }
        out.push_back(row);
    }
    return Json{{"statements", out}};
}

}  // namespace hl
