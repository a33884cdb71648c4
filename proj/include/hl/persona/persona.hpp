#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hl/core/model.hpp"
#include "hl/gateway/backend.hpp"

namespace hl {

struct Persona {
    std::string id;
    std::string seed_id;
    int age = 0;
    std::string gender;
    std::vector<std::string> traits;
    std::optional<std::string> negative_trait;
    std::optional<std::string> biography;
    std::optional<std::string> medical_condition;
    std::optional<std::string> reason_for_visit;
    std::optional<std::string> split;  // train | test | eval
};

void validate(const Persona& p);
void to_json(Json& j, const Persona& p);
void from_json(const Json& j, Persona& p);

inline constexpr double kAgePerturbation = 0.05;
inline constexpr double kDefaultNegativeFraction = 0.05;

const std::vector<std::string>& default_negative_traits();

// n related personas: same gender, age scaled by a uniform factor in
// [0.95, 1.05] and rounded (min 1), a non-empty subset of the seed's traits.
std::vector<Persona> expand_seed(const Persona& seed, int n, std::uint64_t rng_seed);

// Tags exactly round(p * N) personas (half away from zero), chosen uniformly
// without replacement, with a trait drawn uniformly from the pool.
std::vector<Persona> assign_negative_traits(std::vector<Persona> personas, double p,
                                            const std::vector<std::string>& trait_pool, std::uint64_t rng_seed);

// Expands every seed and assigns negative traits over the whole batch.
std::vector<Persona> expand_all(const std::vector<Persona>& seeds, int n, double negative_fraction,
                                const std::vector<std::string>& trait_pool, std::uint64_t rng_seed);

// Throws ValidationError when a seed_id appears under more than one split.
void check_split_hygiene(const std::vector<Persona>& personas);

ChatRequest enrichment_request(const Persona& persona, const Judge& judge, const std::string& domain);

// Fills biography, medical_condition and reason_for_visit, replacing any
// existing values.
Persona enrich_persona(const Persona& persona, const Judge& judge, const std::string& domain = "medical visit");

std::vector<Persona> enrich_all(const std::vector<Persona>& personas, const Judge& judge, const std::string& domain);

// System prompt for a model role-playing the persona as the patient/witness.
std::string persona_system_prompt(const Persona& persona);

}  // namespace hl
