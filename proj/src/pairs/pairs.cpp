#include "hl/pairs/pairs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hl/core/jsonl.hpp"
#include "hl/error.hpp"
#include "hl/gateway/tasks.hpp"
#include "hl/parallel.hpp"

namespace hl {

std::vector<ModelPoolEntry> read_model_pool(const std::filesystem::path& path) {
    auto j = read_json(path);
    if (!j.is_array() || j.empty()) throw ValidationError(path.string() + ": model pool must be a non-empty array");
    std::vector<ModelPoolEntry> pool;
    for (std::size_t i = 0; i < j.size(); ++i) {
        try {
            ModelPoolEntry e;
            e.model = j[i].at("model").get<std::string>();
            e.weight = j[i].value("weight", 1.0);
            if (!(e.weight > 0.0)) throw ValidationError("weight must be positive");
            e.backend = backend_config_from_json(j[i]);
            pool.push_back(std::move(e));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path.string() + ": entry " + std::to_string(i) + ": " + e.what());
        } catch (const Error& e) {
            throw ValidationError(path.string() + ": entry " + std::to_string(i) + ": " + e.what());
        }
    }
    return pool;
}

std::size_t sample_generator(Rng& rng, const std::vector<Generator>& pool) {
    if (pool.empty()) throw ValidationError("model pool is empty");
    const bool uniform = std::all_of(pool.begin(), pool.end(), [&](const auto& g) { return g.weight == pool[0].weight; });
    if (uniform) return static_cast<std::size_t>(rng.below(pool.size()));
    double total = 0.0;
    for (const auto& g : pool) total += g.weight;
    double u = rng.uniform01() * total;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (u < pool[i].weight) return i;
        u -= pool[i].weight;
    }
    return pool.size() - 1;
}

const std::vector<std::string>& default_investigator_script() {
    static const std::vector<std::string> script{
        "Hi, I'm the doctor seeing you today. What brings you in?",
        "How long has this been going on?",
        "Have you tried anything for it so far?",
        "Is there anything else going on in your life that might be related?",
        "Do you have any questions for me before we wrap up?",
    };
    return script;
}

Dialogue generate_dialogue(const Persona& persona, const Generator& generator, const std::vector<std::string>& script,
                           const std::string& dialogue_id, double temperature) {
    if (generator.backend == nullptr) throw ConfigError("generator has no backend");
    if (script.empty()) throw ValidationError("investigator script is empty");
    Dialogue d;
    d.id = dialogue_id;
    d.persona_id = persona.id;
    d.source_model = generator.model;
    ChatRequest req;
    req.model = generator.model;
    req.temperature = temperature;
    req.max_tokens = 512;
    req.task = std::string(task::kDialogueTurn);
    req.messages.push_back({Role::System, persona_system_prompt(persona)});
    for (const auto& question : script) {
        d.add_turn(Speaker::Investigator, question);
        req.messages.push_back({Role::User, question});
        auto reply = trim(generator.backend->chat(req));
        if (reply.empty()) throw MalformedResponseError("generator returned an empty reply");
        d.add_turn(Speaker::Witness, reply);
        req.messages.push_back({Role::Assistant, reply});
    }
    return d;
}

std::vector<Dialogue> generate_candidates(const Persona& persona, const std::vector<Generator>& pool,
                                          const GenerationOptions& options, std::uint64_t rng_seed) {
    if (pool.empty()) throw ValidationError("model pool is empty");
    if (options.candidates <= 0) throw ValidationError("candidate count must be positive");
    Rng rng(derive_seed(rng_seed, "generate:" + persona.id));
    std::vector<std::size_t> picks;
    for (int i = 0; i < options.candidates; ++i) picks.push_back(sample_generator(rng, pool));

    std::vector<Dialogue> out(picks.size());
    auto errors = parallel_for(picks.size(), options.parallelism, [&](std::size_t i) {
        out[i] = generate_dialogue(persona, pool[picks[i]], options.script, persona.id + "-c" + std::to_string(i + 1),
                                   options.temperature);
    });
    std::string failed;
    std::optional<ErrorKind> kind;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const Error& e) {
            if (!kind) kind = e.kind();
            failed += (failed.empty() ? "" : "; ") + std::to_string(i) + " (" + e.what() + ")";
        } catch (const std::exception& e) {
            if (!kind) kind = ErrorKind::Transport;
            failed += (failed.empty() ? "" : "; ") + std::to_string(i) + " (" + e.what() + ")";
        }
    }
    if (kind) throw Error(*kind, "persona '" + persona.id + "': failed candidate slots: " + failed);
    return out;
}

ScoredDialogue score_dialogue(Dialogue dialogue, LikertVector vector, const LinearScorer& scorer) {
    if (vector.dialogue_id != dialogue.id)
        throw ValidationError("vector '" + vector.dialogue_id + "' does not belong to dialogue '" + dialogue.id + "'");
    ScoredDialogue s;
    s.hl_score = hl_score(vector, scorer);
    s.dialogue = std::move(dialogue);
    s.vector = std::move(vector);
    return s;
}

void to_json(Json& j, const PreferencePair& p) {
    j = Json{{"persona_id", p.persona_id},       {"prompt", p.prompt},
             {"chosen", p.chosen},               {"rejected", p.rejected},
             {"score_chosen", p.score_chosen},   {"score_rejected", p.score_rejected}};
}

void from_json(const Json& j, PreferencePair& p) {
    p.persona_id = j.at("persona_id").get<std::string>();
    p.prompt = j.at("prompt").get<std::string>();
    p.chosen = j.at("chosen").get<Dialogue>();
    p.rejected = j.at("rejected").get<Dialogue>();
    p.score_chosen = j.at("score_chosen").get<double>();
    p.score_rejected = j.at("score_rejected").get<double>();
    if (!(p.score_chosen > p.score_rejected))
        throw ValidationError("pair for persona '" + p.persona_id + "' has score_chosen <= score_rejected");
}

double population_std(std::vector<double> scores) {
    if (scores.empty()) return 0.0;
    // Sorting fixes the summation order, so sigma is independent of input order.
    std::sort(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores) sum += s;
    const double m = sum / static_cast<double>(scores.size());
    double ss = 0.0;
    for (double s : scores) ss += (s - m) * (s - m);
    return std::sqrt(ss / static_cast<double>(scores.size()));
}

std::string pair_prompt(const Dialogue& dialogue, const Persona* persona) {
    std::string prompt = persona ? persona_system_prompt(*persona) + "\n" : std::string{};
    for (const auto& t : dialogue.turns) {
        if (t.speaker == Speaker::Investigator) {
            prompt += "Doctor: " + t.text;
            break;
        }
    }
    return prompt;
}

PairBuildResult build_pairs(const std::vector<ScoredDialogue>& scored, double threshold_factor,
                            const std::map<std::string, Persona>& personas) {
    if (!(threshold_factor >= 0.0)) throw ValidationError("threshold factor must be non-negative");
    std::map<std::string, std::vector<const ScoredDialogue*>> by_persona;
    std::vector<double> all_scores;
    for (const auto& s : scored) {
        if (!s.dialogue.persona_id) throw ValidationError("dialogue '" + s.dialogue.id + "' has no persona_id");
        if (!std::isfinite(s.hl_score)) throw ValidationError("dialogue '" + s.dialogue.id + "' has a non-finite score");
        by_persona[*s.dialogue.persona_id].push_back(&s);
        all_scores.push_back(s.hl_score);
    }
    PairBuildResult result;
    result.sigma = population_std(all_scores);
    result.threshold = threshold_factor * result.sigma;
    if (result.sigma == 0.0) {
        result.warning = "all scores are identical (sigma = 0); no pairs built";
        return result;
    }
    for (auto& [persona_id, group] : by_persona) {
        std::sort(group.begin(), group.end(), [](auto* a, auto* b) { return a->dialogue.id < b->dialogue.id; });
        for (std::size_t i = 1; i < group.size(); ++i)
            if (group[i]->dialogue.id == group[i - 1]->dialogue.id)
                throw ValidationError("duplicate dialogue id '" + group[i]->dialogue.id + "'");
        auto pit = personas.find(persona_id);
        const Persona* persona = pit == personas.end() ? nullptr : &pit->second;
        for (std::size_t i = 0; i < group.size(); ++i) {
            for (std::size_t j = i + 1; j < group.size(); ++j) {
                const auto* x = group[i];
                const auto* y = group[j];
                const double diff = std::abs(x->hl_score - y->hl_score);
                if (diff == 0.0 || diff < result.threshold) continue;
                if (y->hl_score > x->hl_score) std::swap(x, y);
                PreferencePair p;
                p.persona_id = persona_id;
                p.prompt = pair_prompt(x->dialogue, persona);
                p.chosen = x->dialogue;
                p.rejected = y->dialogue;
                p.score_chosen = x->hl_score;
                p.score_rejected = y->hl_score;
                result.pairs.push_back(std::move(p));
            }
        }
    }
    return result;
}

Json export_record(const PreferencePair& pair) {
    return Json{{"prompt", pair.prompt},
                {"chosen", witness_text(pair.chosen)},
                {"rejected", witness_text(pair.rejected)},
                {"meta",
                 {{"persona_id", pair.persona_id},
                  {"score_chosen", pair.score_chosen},
                  {"score_rejected", pair.score_rejected},
                  {"chosen_dialogue", pair.chosen},
                  {"rejected_dialogue", pair.rejected}}}};
}

void export_pairs(const std::vector<PreferencePair>& pairs, const std::filesystem::path& path) {
    std::vector<Json> rows;
    rows.reserve(pairs.size());
    for (const auto& p : pairs) rows.push_back(export_record(p));
    try {
        write_jsonl(path, rows);
    } catch (const IoError& e) {
        throw IoError("exporting pairs to " + path.string() + ": " + e.what());
    }
}

}  // namespace hl
