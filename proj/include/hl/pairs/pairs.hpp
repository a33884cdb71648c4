#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hl/core/model.hpp"
#include "hl/gateway/backend.hpp"
#include "hl/persona/persona.hpp"
#include "hl/random.hpp"
#include "hl/score/scorer.hpp"

namespace hl {

struct ModelPoolEntry {
    std::string model;
    BackendConfig backend;
    double weight = 1.0;
};

// Reads a JSON array of {base_url, model, weight?, api_key_env?, ...}.
std::vector<ModelPoolEntry> read_model_pool(const std::filesystem::path& path);

// A pool entry bound to a live backend.
struct Generator {
    ChatBackend* backend = nullptr;
    std::string model;
    double weight = 1.0;
};

// Index drawn with probability proportional to weight (uniform when all equal).
std::size_t sample_generator(Rng& rng, const std::vector<Generator>& pool);

// Doctor-side questions used to drive generated conversations.
const std::vector<std::string>& default_investigator_script();

// The generator plays the persona (witness); the script supplies the
// investigator turns.
Dialogue generate_dialogue(const Persona& persona, const Generator& generator, const std::vector<std::string>& script,
                           const std::string& dialogue_id, double temperature = kGenerationTemperature);

struct GenerationOptions {
    int candidates = 7;
    std::vector<std::string> script = default_investigator_script();
    double temperature = kGenerationTemperature;
    std::size_t parallelism = 8;
};

// Samples a generator `candidates` times (with replacement) and produces one
// dialogue per draw. Failed slots are reported together in one error.
std::vector<Dialogue> generate_candidates(const Persona& persona, const std::vector<Generator>& pool,
                                          const GenerationOptions& options, std::uint64_t rng_seed);

struct ScoredDialogue {
    Dialogue dialogue;
    double hl_score = 0.0;
    std::optional<LikertVector> vector;
};

ScoredDialogue score_dialogue(Dialogue dialogue, LikertVector vector, const LinearScorer& scorer);

struct PreferencePair {
    std::string persona_id;
    std::string prompt;
    Dialogue chosen;
    Dialogue rejected;
    double score_chosen = 0.0;
    double score_rejected = 0.0;
};

void to_json(Json& j, const PreferencePair& p);
void from_json(const Json& j, PreferencePair& p);

// Population standard deviation of the scores.
double population_std(std::vector<double> scores);

// Persona system prompt plus the opening investigator turn.
std::string pair_prompt(const Dialogue& dialogue, const Persona* persona);

struct PairBuildResult {
    std::vector<PreferencePair> pairs;
    double sigma = 0.0;
    double threshold = 0.0;
    std::optional<std::string> warning;
};

// Within each persona, every unordered pair of candidates whose scores differ
// by at least threshold_factor * sigma (sigma over all candidates in the run)
// becomes a pair with the higher score as chosen. Candidates are paired in
// dialogue-id order, so the output does not depend on input order.
PairBuildResult build_pairs(const std::vector<ScoredDialogue>& scored, double threshold_factor = 0.5,
                            const std::map<std::string, Persona>& personas = {});

// Trainer-ready record: {prompt, chosen, rejected, meta}.
Json export_record(const PreferencePair& pair);
void export_pairs(const std::vector<PreferencePair>& pairs, const std::filesystem::path& path);

}  // namespace hl
