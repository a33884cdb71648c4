#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hl/core/model.hpp"
#include "hl/gateway/backend.hpp"

namespace hl {

struct TuringJudgment {
    Side verdict = Side::A;  // in the game's own A/B labels
    std::vector<std::string> reasons;
    std::uint64_t presentation_seed = 0;
    Side presented_first = Side::A;
};

// Which game side is shown first for a given presentation seed.
Side presented_first(std::uint64_t presentation_seed);

// Prompt shown to the judge; `first` is presented as "Conversation A".
ChatRequest turing_judge_request(const TuringGame& game, const Judge& judge, Side first);

// Asks the judge which witness is human, shown in a seeded random order, and
// maps the answer back to the game's labels. Throws ValidationError when the
// judge's output is still invalid after one re-prompt.
TuringJudgment judge_turing_pair(const TuringGame& game, const Judge& judge, std::uint64_t presentation_seed);

// Judges every game concurrently (bounded by judge.parallelism); returns copies
// carrying verdict, reasons, and the recorded presentation seed.
std::vector<TuringGame> judge_games(const std::vector<TuringGame>& games, const Judge& judge, std::uint64_t seed);

// Fraction of games whose verdict matches the ground truth.
double judge_accuracy(const std::vector<TuringGame>& games);

}  // namespace hl
