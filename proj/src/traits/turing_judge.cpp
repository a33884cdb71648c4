#include "hl/traits/turing_judge.hpp"

#include <sstream>

#include "hl/error.hpp"
#include "hl/gateway/structured.hpp"
#include "hl/gateway/tasks.hpp"
#include "hl/parallel.hpp"
#include "hl/random.hpp"

namespace hl {

namespace {

constexpr const char* kSystemPrompt =
    "You are an expert judge in a Turing test. An investigator chatted with two witnesses; one witness is a "
    "human and the other is an AI. Decide which witness is human and explain which conversational cues "
    "helped you decide.";

std::string render(const Dialogue& d) {
    std::ostringstream os;
    for (const auto& t : d.turns)
        os << (t.speaker == Speaker::Investigator ? "Investigator: " : "Witness: ") << t.text << '\n';
    return os.str();
}

Side other(Side s) { return s == Side::A ? Side::B : Side::A; }

const Shape& judgment_shape() {
    static const Shape shape{{
        FieldShape{.name = "verdict", .type = FieldType::String, .one_of = {"A", "B"}},
        FieldShape{.name = "reasons", .type = FieldType::StringArray, .min_items = 3, .max_items = 5},
    }};
    return shape;
}

}  // namespace

Side presented_first(std::uint64_t presentation_seed) {
    return Rng(presentation_seed).below(2) == 0 ? Side::A : Side::B;
}

ChatRequest turing_judge_request(const TuringGame& game, const Judge& judge, Side first) {
    std::ostringstream user;
    user << "Conversation A:\n" << render(game.side(first)) << "\nConversation B:\n" << render(game.side(other(first)))
         << "\n(1) Predict which conversation's witness is human. (2) Give 3-5 Likert-style statements describing "
            "the witness behaviours that helped you decide on this specific pair of dialogues.\n"
            "Reply with a JSON object: {\"verdict\": \"A\" or \"B\", \"reasons\": [\"...\", ...]}";
    ChatRequest req;
    req.model = judge.model;
    req.messages = {{Role::System, kSystemPrompt}, {Role::User, user.str()}};
    req.temperature = judge.temperature;
    req.max_tokens = judge.max_tokens;
    req.reasoning_effort = judge.reasoning_effort;
    req.task = std::string(task::kTuringJudge);
    return req;
}

TuringJudgment judge_turing_pair(const TuringGame& game, const Judge& judge, std::uint64_t presentation_seed) {
    if (judge.backend == nullptr) throw ConfigError("judge has no backend");
    if (game.conversation_a.turns.empty() || game.conversation_b.turns.empty())
        throw ValidationError("game '" + game.id + "' has an empty conversation");
    const Side first = presented_first(presentation_seed);
    auto value = ask_structured(*judge.backend, turing_judge_request(game, judge, first), judgment_shape());
    TuringJudgment out;
    out.presentation_seed = presentation_seed;
    out.presented_first = first;
    out.verdict = value["verdict"] == "A" ? first : other(first);
    out.reasons = value["reasons"].get<std::vector<std::string>>();
    return out;
}

std::vector<TuringGame> judge_games(const std::vector<TuringGame>& games, const Judge& judge, std::uint64_t seed) {
    std::vector<TuringGame> out = games;
    auto errors = parallel_for(games.size(), judge.parallelism, [&](std::size_t i) {
        auto j = judge_turing_pair(games[i], judge, derive_seed(seed, "presentation:" + games[i].id));
        out[i].verdict = j.verdict;
        out[i].reasons = std::move(j.reasons);
        out[i].presentation_seed = j.presentation_seed;
    });
    rethrow_first_labeled(errors, [&](std::size_t i) { return "game '" + games[i].id + "'"; });
    return out;
}

double judge_accuracy(const std::vector<TuringGame>& games) {
    if (games.empty()) throw ValidationError("judge_accuracy needs at least one game");
    std::size_t correct = 0;
    for (const auto& g : games) {
        if (!g.verdict) throw ValidationError("game '" + g.id + "' has no verdict");
        correct += *g.verdict == g.human_side;
    }
    return static_cast<double>(correct) / static_cast<double>(games.size());
}

}  // namespace hl
