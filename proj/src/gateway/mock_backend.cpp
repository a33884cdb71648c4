#include "hl/gateway/mock_backend.hpp"

#include <array>
#include <cctype>

#include "hl/error.hpp"
#include "hl/gateway/structured.hpp"
#include "hl/gateway/tasks.hpp"
#include "hl/random.hpp"

namespace hl {

namespace {

// Paraphrase families; reasons drawn from one family embed close together.
constexpr std::array<std::array<std::string_view, 3>, 8> kReasonFamilies{{
    {"Witness keeps replies brief and casual.", "Witness keeps replies short and casual.",
     "Keeps replies brief and casual without over explaining."},
    {"Witness uses lowercase texting style.", "Uses lowercase texting style throughout.",
     "Witness writes in a lowercase texting style."},
    {"Witness shows small typos and informal grammar.", "Small typos and informal grammar appear in replies.",
     "Shows small typos, uneven punctuation and informal grammar."},
    {"Witness gives overly polished formal answers.", "Answers are overly polished and formal.",
     "Gives polished formal answers with structured formatting."},
    {"Witness asks natural follow up questions.", "Asks natural context aware follow up questions.",
     "Witness shows reciprocity with natural follow up questions."},
    {"Witness admits not knowing instead of inventing details.", "Admits not knowing rather than inventing details.",
     "Witness admits not knowing details."},
    {"Witness shares concrete personal details from daily life.", "Shares concrete personal details from daily life.",
     "Gives concrete personal details about daily life."},
    {"Witness ends the chat quickly with impatience.", "Shows impatience and ends the chat quickly.",
     "Witness is impatient and ends the chat quickly."},
}};

constexpr std::array<std::string_view, 12> kReplyFragments{
    "honestly not sure, it's been a rough week.",
    "yeah the pain started a few days ago.",
    "I would describe it as a dull ache in my lower back.",
    "It gets worse when I sit for a long time at work.",
    "lol sorry, typing on my phone.",
    "My sister said I should get it checked out.",
    "I have tried ibuprofen but it only helps a little.",
    "Thank you for asking, I appreciate your thoroughness.",
    "no meds other than vitamins i think",
    "It started after I moved apartments last month.",
    "Can I ask whether this is something serious?",
    "ok gotta go soon, thanks doc",
};

constexpr std::array<std::string_view, 6> kConditions{
    "persistent lower back pain", "seasonal allergies with sinus pressure", "mild hypertension",
    "recurring migraines", "type 2 diabetes follow-up", "sprained ankle that is slow to heal",
};

// The task payload is the first JSON object sent by the user; later user
// messages are corrections.
std::optional<Json> user_payload(const ChatRequest& req) {
    for (const auto& m : req.messages) {
        if (m.role != Role::User) continue;
        if (auto j = extract_json(m.content); j && j->is_object()) return j;
    }
    return std::nullopt;
}

std::string reply_text(std::uint64_t h) {
    Rng rng(h);
    const auto n = 1 + rng.below(3);
    std::string out;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (!out.empty()) out.push_back(' ');
        out += kReplyFragments[rng.below(kReplyFragments.size())];
    }
    return out;
}

std::vector<std::string> tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

void add_random_direction(std::vector<double>& acc, std::uint64_t seed, double weight) {
    Rng rng(seed);
    for (auto& x : acc) x += weight * rng.uniform(-1.0, 1.0);
}

}  // namespace

std::uint64_t MockBackend::request_hash(const ChatRequest& req) const {
    auto canonical = to_wire(req).dump();
    return fnv1a(req.task, fnv1a(canonical, splitmix64(seed_)));
}

std::string MockBackend::chat(const ChatRequest& req) {
    validate(req);
    const auto h = request_hash(req);
    Rng rng(h);
    const auto payload = user_payload(req);

    if (req.task == task::kTuringJudge) {
        Json out;
        out["verdict"] = rng.below(2) == 0 ? "A" : "B";
        const auto n = 3 + rng.below(3);
        auto families = rng.permutation(kReasonFamilies.size());
        out["reasons"] = Json::array();
        for (std::uint64_t i = 0; i < n; ++i)
            out["reasons"].push_back(std::string(kReasonFamilies[families[i]][rng.below(3)]));
        return "```json\n" + out.dump() + "\n```";
    }
    if (req.task == task::kLikertRating) {
        if (!payload || !payload->contains("statements")) throw ValidationError("mock likert request has no statements");
        const std::string witness = payload->value("witness_responses", std::string{});
        Json ratings = Json::array();
        for (const auto& s : (*payload)["statements"]) {
            const auto sh = fnv1a(witness, fnv1a(s.get<std::string>(), splitmix64(seed_)));
            ratings.push_back(1 + static_cast<int>(sh % 5));
        }
        return Json{{"ratings", ratings}}.dump();
    }
    if (req.task == task::kClusterSummary) {
        if (!payload || !payload->contains("statements")) throw ValidationError("mock summary request has no statements");
        return "Here is the inventory:\n" + Json{{"statements", (*payload)["statements"]}}.dump();
    }
    if (req.task == task::kPersonaEnrich) {
        const std::string id = payload ? payload->value("id", std::string("unknown")) : std::string("unknown");
        const auto cond = std::string(kConditions[rng.below(kConditions.size())]);
        Json out{{"biography", "Synthetic biography for persona " + id + ", who lives and works in a mid-sized city."},
                 {"medical_condition", cond},
                 {"reason_for_visit", "Persona " + id + " wants a check-up about " + cond + "."}};
        return out.dump();
    }
    return reply_text(h);
}

std::vector<std::vector<double>> MockBackend::embed(const std::string& model, const std::vector<std::string>& texts) {
    if (texts.empty()) throw ValidationError("embed called with no texts");
    const auto base = fnv1a(model, splitmix64(seed_));
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        std::vector<double> v(kMockEmbeddingDim, 0.0);
        for (const auto& tok : tokens(text)) add_random_direction(v, fnv1a(tok, base), 1.0);
        // Whole-text component keeps distinct texts distinct even with equal token bags.
        add_random_direction(v, fnv1a(text, base ^ 0x5bd1e995ULL), 0.1);
        out.push_back(std::move(v));
    }
    check_embeddings(out, texts.size());
    return out;
}

}  // namespace hl
