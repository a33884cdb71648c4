#pragma once

#include <optional>
#include <vector>

#include "hl/core/model.hpp"
#include "hl/gateway/backend.hpp"

namespace hl {

ChatRequest likert_request(const std::string& witness, const TraitInventory& inventory, const Judge& judge);

// Rates one dialogue, from its witness turns only, against every statement.
LikertVector rate_likert(const Dialogue& dialogue, const TraitInventory& inventory, const Judge& judge);

// Rates many dialogues independently and concurrently; output order follows
// input order. `labels`, when given, is copied onto each vector.
std::vector<LikertVector> rate_dialogues(const std::vector<Dialogue>& dialogues, const TraitInventory& inventory,
                                         const Judge& judge, const std::vector<std::optional<int>>& labels = {});

// Rates both sides of every game, labeling the human side 1 and the other 0.
std::vector<LikertVector> rate_games(const std::vector<TuringGame>& games, const TraitInventory& inventory,
                                     const Judge& judge);

}  // namespace hl
