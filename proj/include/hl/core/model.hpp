#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hl {

using Json = nlohmann::json;

enum class Speaker { Investigator, Witness };
enum class Side { A, B };

const char* to_string(Speaker s) noexcept;
const char* to_string(Side s) noexcept;
Speaker speaker_from_string(const std::string& s);
Side side_from_string(const std::string& s);

struct Turn {
    Speaker speaker = Speaker::Witness;
    std::string text;
    std::size_t index = 0;
};

struct Dialogue {
    std::string id;
    std::vector<Turn> turns;
    std::optional<std::string> source_model;
    std::optional<std::string> persona_id;

    // Appends a turn with the next contiguous index.
    void add_turn(Speaker speaker, std::string text);
    std::size_t count(Speaker speaker) const;
};

struct TuringGame {
    std::string id;
    Dialogue conversation_a;
    Dialogue conversation_b;
    Side human_side = Side::A;
    std::optional<Side> verdict;
    std::optional<std::vector<std::string>> reasons;
    // Seed used to randomize presentation order when a judge produced the verdict.
    std::optional<std::uint64_t> presentation_seed;

    const Dialogue& side(Side s) const { return s == Side::A ? conversation_a : conversation_b; }
};

struct TraitInventory {
    std::string name;
    std::vector<std::string> statements;

    std::size_t size() const { return statements.size(); }
};

// Per-dialogue agreement ratings, one per inventory statement.
struct LikertVector {
    std::string dialogue_id;
    std::string inventory_name;
    std::vector<int> ratings;
    std::optional<int> label;  // 1 = human, 0 = ai
};

inline constexpr int kHumanLabel = 1;
inline constexpr int kAiLabel = 0;

// Invariant checks; each throws ValidationError describing the first violation.
void validate(const Dialogue& d);
void validate(const TuringGame& g);
void validate(const TraitInventory& inv);
void validate(const LikertVector& v);
void validate(const LikertVector& v, const TraitInventory& inv);

std::size_t word_count(const Dialogue& dialogue);
std::size_t word_count(std::string_view text);

// Keeps games where both conversations have at least min_words words.
std::vector<TuringGame> filter_games(const std::vector<TuringGame>& games, std::size_t min_words = 50);

// Witness turns joined by '\n'. Throws ValidationError if there are none.
std::string witness_text(const Dialogue& dialogue);

// Whitespace trim (ASCII plus the common Unicode spaces encoded in UTF-8).
std::string trim(std::string_view s);

void to_json(Json& j, const Turn& t);
void to_json(Json& j, const Dialogue& d);
void from_json(const Json& j, Dialogue& d);
void to_json(Json& j, const TuringGame& g);
void from_json(const Json& j, TuringGame& g);
void to_json(Json& j, const TraitInventory& inv);
void from_json(const Json& j, TraitInventory& inv);
void to_json(Json& j, const LikertVector& v);
void from_json(const Json& j, LikertVector& v);

}  // namespace hl
