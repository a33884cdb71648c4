#include "hl/score/rating.hpp"

#include "hl/error.hpp"
#include "hl/gateway/structured.hpp"
#include "hl/gateway/tasks.hpp"
#include "hl/parallel.hpp"

namespace hl {

ChatRequest likert_request(const std::string& witness, const TraitInventory& inventory, const Judge& judge) {
    ChatRequest req;
    req.model = judge.model;
    req.temperature = judge.temperature;
    req.max_tokens = judge.max_tokens;
    req.reasoning_effort = judge.reasoning_effort;
    req.task = std::string(task::kLikertRating);
    req.messages = {
        {Role::System,
         "You rate the conversational behaviour of a chat participant. You only see that participant's own "
         "messages. For each statement, rate how much you agree that it describes the participant, on a scale "
         "from 1 (strongly disagree) to 5 (strongly agree)."},
        {Role::User, "```json\n" +
                         Json{{"witness_responses", witness}, {"statements", inventory.statements}}.dump(2) +
                         "\n```\nReply with a JSON object {\"ratings\": [...]} holding one integer from 1 to 5 per "
                         "statement, in the order given (" +
                         std::to_string(inventory.size()) + " ratings)."},
    };
    return req;
}

LikertVector rate_likert(const Dialogue& dialogue, const TraitInventory& inventory, const Judge& judge) {
    if (judge.backend == nullptr) throw ConfigError("judge has no backend");
    const auto witness = witness_text(dialogue);
    const Shape shape{{FieldShape{.name = "ratings",
                                  .type = FieldType::IntegerArray,
                                  .min_value = 1,
                                  .max_value = 5,
                                  .min_items = inventory.size(),
                                  .max_items = inventory.size()}}};
    auto value = ask_structured(*judge.backend, likert_request(witness, inventory, judge), shape);
    LikertVector v;
    v.dialogue_id = dialogue.id;
    v.inventory_name = inventory.name;
    v.ratings = value["ratings"].get<std::vector<int>>();
    return v;
}

std::vector<LikertVector> rate_dialogues(const std::vector<Dialogue>& dialogues, const TraitInventory& inventory,
                                         const Judge& judge, const std::vector<std::optional<int>>& labels) {
    if (!labels.empty() && labels.size() != dialogues.size())
        throw ValidationError("labels must match dialogues one to one");
    std::vector<LikertVector> out(dialogues.size());
    auto errors = parallel_for(dialogues.size(), judge.parallelism, [&](std::size_t i) {
        out[i] = rate_likert(dialogues[i], inventory, judge);
        if (!labels.empty()) out[i].label = labels[i];
    });
    rethrow_first_labeled(errors, [&](std::size_t i) { return "dialogue '" + dialogues[i].id + "'"; });
    return out;
}

std::vector<LikertVector> rate_games(const std::vector<TuringGame>& games, const TraitInventory& inventory,
                                     const Judge& judge) {
    std::vector<Dialogue> dialogues;
    std::vector<std::optional<int>> labels;
    for (const auto& g : games) {
        for (Side s : {Side::A, Side::B}) {
            dialogues.push_back(g.side(s));
            labels.emplace_back(s == g.human_side ? kHumanLabel : kAiLabel);
        }
    }
    return rate_dialogues(dialogues, inventory, judge, labels);
}

}  // namespace hl
