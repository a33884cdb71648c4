#include "hl/core/model.hpp"

#include <set>

#include "hl/error.hpp"

namespace hl {

const char* to_string(Speaker s) noexcept { return s == Speaker::Investigator ? "investigator" : "witness"; }
const char* to_string(Side s) noexcept { return s == Side::A ? "A" : "B"; }

Speaker speaker_from_string(const std::string& s) {
    if (s == "investigator") return Speaker::Investigator;
    if (s == "witness") return Speaker::Witness;
    throw ValidationError("unknown speaker '" + s + "'");
}

Side side_from_string(const std::string& s) {
    if (s == "A") return Side::A;
    if (s == "B") return Side::B;
    throw ValidationError("side must be \"A\" or \"B\", got '" + s + "'");
}

void Dialogue::add_turn(Speaker speaker, std::string text) {
    turns.push_back(Turn{speaker, std::move(text), turns.size()});
}

std::size_t Dialogue::count(Speaker speaker) const {
    std::size_t n = 0;
    for (const auto& t : turns) n += t.speaker == speaker;
    return n;
}

namespace {

// Length of a UTF-8 encoded Unicode whitespace code point at s[i], or 0.
std::size_t whitespace_len(std::string_view s, std::size_t i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c == ' ' || (c >= '\t' && c <= '\r')) return 1;
    auto at = [&](std::size_t k) { return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0; };
    if (c == 0xC2 && (at(1) == 0x85 || at(1) == 0xA0)) return 2;
    if (c == 0xE1 && at(1) == 0x9A && at(2) == 0x80) return 3;  // U+1680
    if (c == 0xE2 && at(1) == 0x80) {
        const auto c2 = at(2);
        if ((c2 >= 0x80 && c2 <= 0x8A) || c2 == 0xA8 || c2 == 0xA9 || c2 == 0xAF) return 3;
    }
    if (c == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;  // U+205F
    if (c == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;  // U+3000
    return 0;
}

}  // namespace

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    while (begin < s.size()) {
        auto n = whitespace_len(s, begin);
        if (n == 0) break;
        begin += n;
    }
    std::size_t end = begin;
    for (std::size_t i = begin; i < s.size();) {
        auto n = whitespace_len(s, i);
        if (n == 0) {
            ++i;
            end = i;
        } else {
            i += n;
        }
    }
    return std::string(s.substr(begin, end - begin));
}

std::size_t word_count(std::string_view text) {
    std::size_t words = 0;
    bool in_word = false;
    for (std::size_t i = 0; i < text.size();) {
        auto n = whitespace_len(text, i);
        if (n > 0) {
            in_word = false;
            i += n;
        } else {
            if (!in_word) ++words;
            in_word = true;
            ++i;
        }
    }
    return words;
}

std::size_t word_count(const Dialogue& dialogue) {
    std::size_t n = 0;
    for (const auto& t : dialogue.turns) n += word_count(t.text);
    return n;
}

std::vector<TuringGame> filter_games(const std::vector<TuringGame>& games, std::size_t min_words) {
    std::vector<TuringGame> kept;
    for (const auto& g : games)
        if (word_count(g.conversation_a) >= min_words && word_count(g.conversation_b) >= min_words)
            kept.push_back(g);
    return kept;
}

std::string witness_text(const Dialogue& dialogue) {
    std::string out;
    bool any = false;
    for (const auto& t : dialogue.turns) {
        if (t.speaker != Speaker::Witness) continue;
        if (any) out.push_back('\n');
        out += t.text;
        any = true;
    }
    if (!any) throw ValidationError("dialogue '" + dialogue.id + "' has no witness turns and cannot be rated");
    return out;
}

void validate(const Dialogue& d) {
    if (d.id.empty()) throw ValidationError("dialogue id is empty");
    for (std::size_t i = 0; i < d.turns.size(); ++i) {
        if (d.turns[i].index != i)
            throw ValidationError("dialogue '" + d.id + "': turn indices are not contiguous at " + std::to_string(i));
        if (trim(d.turns[i].text).empty())
            throw ValidationError("dialogue '" + d.id + "': turn " + std::to_string(i) + " has empty text");
    }
}

void validate(const TuringGame& g) {
    if (g.id.empty()) throw ValidationError("game id is empty");
    validate(g.conversation_a);
    validate(g.conversation_b);
    if (g.reasons && (g.reasons->size() < 3 || g.reasons->size() > 5))
        throw ValidationError("game '" + g.id + "': reasons must contain 3-5 entries, got " +
                              std::to_string(g.reasons->size()));
}

void validate(const TraitInventory& inv) {
    if (inv.name.empty()) throw ValidationError("inventory name is empty");
    std::set<std::string> seen;
    for (const auto& s : inv.statements) {
        if (trim(s).empty()) throw ValidationError("inventory '" + inv.name + "' has an empty statement");
        if (!seen.insert(s).second)
            throw ValidationError("inventory '" + inv.name + "' has duplicate statement: " + s);
    }
}

void validate(const LikertVector& v) {
    for (std::size_t i = 0; i < v.ratings.size(); ++i)
        if (v.ratings[i] < 1 || v.ratings[i] > 5)
            throw ValidationError("vector '" + v.dialogue_id + "': rating " + std::to_string(i) + " = " +
                                  std::to_string(v.ratings[i]) + " is outside 1..5");
    if (v.label && *v.label != kHumanLabel && *v.label != kAiLabel)
        throw ValidationError("vector '" + v.dialogue_id + "': label must be 0 or 1");
}

void validate(const LikertVector& v, const TraitInventory& inv) {
    validate(v);
    if (v.inventory_name != inv.name)
        throw ValidationError("vector '" + v.dialogue_id + "' belongs to inventory '" + v.inventory_name +
                              "', expected '" + inv.name + "'");
    if (v.ratings.size() != inv.size())
        throw ValidationError("vector '" + v.dialogue_id + "' has " + std::to_string(v.ratings.size()) +
                              " ratings, inventory '" + inv.name + "' has " + std::to_string(inv.size()));
}

void to_json(Json& j, const Turn& t) { j = Json{{"speaker", to_string(t.speaker)}, {"text", t.text}}; }

void to_json(Json& j, const Dialogue& d) {
    j = Json::object();
    j["id"] = d.id;
    if (d.persona_id) j["persona_id"] = *d.persona_id;
    if (d.source_model) j["source_model"] = *d.source_model;
    j["turns"] = Json::array();
    for (const auto& t : d.turns) j["turns"].push_back(t);
}

void from_json(const Json& j, Dialogue& d) {
    d = Dialogue{};
    d.id = j.at("id").get<std::string>();
    if (j.contains("persona_id") && !j["persona_id"].is_null()) d.persona_id = j["persona_id"].get<std::string>();
    if (j.contains("source_model") && !j["source_model"].is_null())
        d.source_model = j["source_model"].get<std::string>();
    for (const auto& t : j.at("turns"))
        d.add_turn(speaker_from_string(t.at("speaker").get<std::string>()), t.at("text").get<std::string>());
    validate(d);
}

void to_json(Json& j, const TuringGame& g) {
    j = Json::object();
    j["id"] = g.id;
    j["a"] = g.conversation_a;
    j["b"] = g.conversation_b;
    j["human_side"] = to_string(g.human_side);
    if (g.verdict) j["verdict"] = to_string(*g.verdict);
    if (g.reasons) j["reasons"] = *g.reasons;
    if (g.presentation_seed) j["presentation_seed"] = *g.presentation_seed;
}

void from_json(const Json& j, TuringGame& g) {
    g = TuringGame{};
    g.id = j.at("id").get<std::string>();
    g.conversation_a = j.at("a").get<Dialogue>();
    g.conversation_b = j.at("b").get<Dialogue>();
    g.human_side = side_from_string(j.at("human_side").get<std::string>());
    if (j.contains("verdict") && !j["verdict"].is_null()) g.verdict = side_from_string(j["verdict"].get<std::string>());
    if (j.contains("reasons") && !j["reasons"].is_null()) g.reasons = j["reasons"].get<std::vector<std::string>>();
    if (j.contains("presentation_seed") && !j["presentation_seed"].is_null())
        g.presentation_seed = j["presentation_seed"].get<std::uint64_t>();
    validate(g);
}

void to_json(Json& j, const TraitInventory& inv) { j = Json{{"name", inv.name}, {"statements", inv.statements}}; }

void from_json(const Json& j, TraitInventory& inv) {
    inv.name = j.at("name").get<std::string>();
    inv.statements = j.at("statements").get<std::vector<std::string>>();
    validate(inv);
}

void to_json(Json& j, const LikertVector& v) {
    j = Json{{"dialogue_id", v.dialogue_id}, {"inventory", v.inventory_name}, {"ratings", v.ratings}};
    if (v.label) j["label"] = *v.label;
}

void from_json(const Json& j, LikertVector& v) {
    v = LikertVector{};
    v.dialogue_id = j.at("dialogue_id").get<std::string>();
    v.inventory_name = j.at("inventory").get<std::string>();
    v.ratings = j.at("ratings").get<std::vector<int>>();
    if (j.contains("label") && !j["label"].is_null()) v.label = j["label"].get<int>();
    validate(v);
}

}  // namespace hl
