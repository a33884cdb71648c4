#include "hl/traits/summarize.hpp"

#include <set>

#include "hl/error.hpp"
#include "hl/gateway/structured.hpp"
#include "hl/gateway/tasks.hpp"

namespace hl {

ChatRequest summarize_request(const std::vector<std::string>& medoid_statements, const Judge& judge) {
    ChatRequest req;
    req.model = judge.model;
    req.temperature = judge.temperature;
    req.max_tokens = judge.max_tokens;
    req.reasoning_effort = judge.reasoning_effort;
    req.task = std::string(task::kClusterSummary);
    req.messages = {
        {Role::System,
         "You consolidate descriptions of human-like conversational behaviour into a compact inventory of "
         "Likert-style statements. Each statement describes one observable trait of a conversation partner, is "
         "written in the third person present tense, and can be rated from 1 (strongly disagree) to 5 (strongly "
         "agree)."},
        {Role::User,
         "Merge redundant items and rewrite the following cluster representatives as distinct Likert-style "
         "statements. Return at most as many statements as you are given.\n```json\n" +
             Json{{"statements", medoid_statements}}.dump(2) +
             "\n```\nReply with a JSON object: {\"statements\": [\"...\", ...]}"},
    };
    return req;
}

TraitInventory summarize_clusters(const std::vector<std::string>& medoid_statements, const Judge& judge,
                                  const std::string& inventory_name) {
    if (medoid_statements.empty()) throw ValidationError("summarize_clusters needs at least one statement");
    if (judge.backend == nullptr) throw ConfigError("judge has no backend");
    const Shape shape{{FieldShape{.name = "statements",
                                  .type = FieldType::StringArray,
                                  .min_items = 1,
                                  .max_items = medoid_statements.size()}}};
    auto check_distinct = [](const Json& v) {
        std::set<std::string> seen;
        for (const auto& s : v["statements"])
            if (!seen.insert(trim(s.get<std::string>())).second)
                throw ValidationError("duplicate statement '" + s.get<std::string>() + "'");
    };
    auto value = ask_structured(*judge.backend, summarize_request(medoid_statements, judge), shape, check_distinct);
    TraitInventory inv;
    inv.name = inventory_name;
    for (const auto& s : value["statements"]) inv.statements.push_back(trim(s.get<std::string>()));
    validate(inv);
    return inv;
}

}  // namespace hl
