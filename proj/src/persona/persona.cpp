#include "hl/persona/persona.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "hl/error.hpp"
#include "hl/gateway/structured.hpp"
#include "hl/gateway/tasks.hpp"
#include "hl/parallel.hpp"
#include "hl/random.hpp"

namespace hl {

void validate(const Persona& p) {
    if (p.id.empty()) throw ValidationError("persona id is empty");
    if (p.age < 1) throw ValidationError("persona '" + p.id + "' has age < 1");
    if (p.gender.empty()) throw ValidationError("persona '" + p.id + "' has no gender");
    if (p.split && *p.split != "train" && *p.split != "test" && *p.split != "eval")
        throw ValidationError("persona '" + p.id + "' has unknown split '" + *p.split + "'");
}

void to_json(Json& j, const Persona& p) {
    j = Json{{"id", p.id}, {"seed_id", p.seed_id}, {"age", p.age}, {"gender", p.gender}, {"traits", p.traits}};
    auto put = [&](const char* key, const std::optional<std::string>& v) {
        if (v) j[key] = *v;
    };
    put("negative_trait", p.negative_trait);
    put("biography", p.biography);
    put("medical_condition", p.medical_condition);
    put("reason_for_visit", p.reason_for_visit);
    put("split", p.split);
}

void from_json(const Json& j, Persona& p) {
    p = Persona{};
    p.id = j.at("id").get<std::string>();
    p.seed_id = j.value("seed_id", p.id);
    p.age = j.at("age").get<int>();
    p.gender = j.at("gender").get<std::string>();
    p.traits = j.value("traits", std::vector<std::string>{});
    auto get = [&](const char* key, std::optional<std::string>& v) {
        if (j.contains(key) && !j[key].is_null()) v = j[key].get<std::string>();
    };
    get("negative_trait", p.negative_trait);
    get("biography", p.biography);
    get("medical_condition", p.medical_condition);
    get("reason_for_visit", p.reason_for_visit);
    get("split", p.split);
    validate(p);
}

const std::vector<std::string>& default_negative_traits() {
    static const std::vector<std::string> pool{"anxious", "hostile", "arrogant", "impatient", "dismissive"};
    return pool;
}

std::vector<Persona> expand_seed(const Persona& seed, int n, std::uint64_t rng_seed) {
    if (n <= 0) throw ValidationError("expansion count must be positive");
    validate(seed);
    Rng rng(derive_seed(rng_seed, "expand:" + seed.id));
    std::vector<Persona> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Persona p;
        p.id = seed.id + "-" + std::to_string(i + 1);
        p.seed_id = seed.id;
        p.gender = seed.gender;
        p.split = seed.split;
        const double delta = rng.uniform(-kAgePerturbation, kAgePerturbation);
        p.age = static_cast<int>(std::max<long long>(1, round_half_away(seed.age * (1.0 + delta))));
        if (!seed.traits.empty()) {
            // Keep a random non-empty subset, preserving the seed's trait order.
            auto order = rng.permutation(seed.traits.size());
            const auto keep = 1 + rng.below(seed.traits.size());
            order.resize(keep);
            std::sort(order.begin(), order.end());
            for (auto k : order) p.traits.push_back(seed.traits[k]);
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Persona> assign_negative_traits(std::vector<Persona> personas, double p,
                                            const std::vector<std::string>& trait_pool, std::uint64_t rng_seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("negative-trait fraction must be in [0, 1]");
    if (trait_pool.empty()) throw ValidationError("negative-trait pool is empty");
    const auto count = static_cast<std::size_t>(round_half_away(p * static_cast<double>(personas.size())));
    Rng rng(derive_seed(rng_seed, "negative-traits"));
    auto order = rng.permutation(personas.size());
    for (std::size_t i = 0; i < count; ++i)
        personas[order[i]].negative_trait = trait_pool[rng.below(trait_pool.size())];
    return personas;
}

std::vector<Persona> expand_all(const std::vector<Persona>& seeds, int n, double negative_fraction,
                                const std::vector<std::string>& trait_pool, std::uint64_t rng_seed) {
    check_split_hygiene(seeds);
    std::vector<Persona> out;
    for (const auto& s : seeds) {
        auto e = expand_seed(s, n, rng_seed);
        out.insert(out.end(), e.begin(), e.end());
    }
    return assign_negative_traits(std::move(out), negative_fraction, trait_pool, rng_seed);
}

void check_split_hygiene(const std::vector<Persona>& personas) {
    std::map<std::string, std::string> split_of;
    for (const auto& p : personas) {
        const std::string split = p.split.value_or("");
        auto [it, inserted] = split_of.emplace(p.seed_id, split);
        if (!inserted && it->second != split)
            throw ValidationError("seed '" + p.seed_id + "' appears in splits '" + it->second + "' and '" + split + "'");
    }
}

ChatRequest enrichment_request(const Persona& persona, const Judge& judge, const std::string& domain) {
    Json brief{{"id", persona.id}, {"age", persona.age}, {"gender", persona.gender}, {"traits", persona.traits}};
    if (persona.negative_trait) brief["negative_trait"] = *persona.negative_trait;
    ChatRequest req;
    req.model = judge.model;
    req.temperature = judge.temperature;
    req.max_tokens = judge.max_tokens;
    req.reasoning_effort = judge.reasoning_effort;
    req.task = std::string(task::kPersonaEnrich);
    req.messages = {
        {Role::System, "You write realistic, detailed synthetic personas for conversation simulations."},
        {Role::User, "Persona:\n```json\n" + brief.dump(2) +
                         "\n```\nWrite a short biography for this person consistent with the details above. The "
                         "setting is a " +
                         domain +
                         ", so also invent a plausible medical condition and a reason for the visit.\nReply with a "
                         "JSON object: {\"biography\": \"...\", \"medical_condition\": \"...\", "
                         "\"reason_for_visit\": \"...\"}"},
    };
    return req;
}

Persona enrich_persona(const Persona& persona, const Judge& judge, const std::string& domain) {
    if (judge.backend == nullptr) throw ConfigError("judge has no backend");
    validate(persona);
    static const Shape shape{{
        FieldShape{.name = "biography"},
        FieldShape{.name = "medical_condition"},
        FieldShape{.name = "reason_for_visit"},
    }};
    auto value = ask_structured(*judge.backend, enrichment_request(persona, judge, domain), shape);
    Persona out = persona;
    out.biography = value["biography"].get<std::string>();
    out.medical_condition = value["medical_condition"].get<std::string>();
    out.reason_for_visit = value["reason_for_visit"].get<std::string>();
    return out;
}

std::vector<Persona> enrich_all(const std::vector<Persona>& personas, const Judge& judge, const std::string& domain) {
    std::vector<Persona> out(personas.size());
    auto errors = parallel_for(personas.size(), judge.parallelism,
                               [&](std::size_t i) { out[i] = enrich_persona(personas[i], judge, domain); });
    rethrow_first_labeled(errors, [&](std::size_t i) { return "persona '" + personas[i].id + "'"; });
    return out;
}

std::string persona_system_prompt(const Persona& persona) {
    std::ostringstream os;
    os << "You are role-playing a patient talking to a doctor. Stay in character and answer as this person "
          "would in a text chat.\n"
       << "Age: " << persona.age << "\nGender: " << persona.gender << '\n';
    if (!persona.traits.empty()) {
        os << "Traits: ";
        for (std::size_t i = 0; i < persona.traits.size(); ++i) os << (i ? ", " : "") << persona.traits[i];
        os << '\n';
    }
    if (persona.negative_trait) os << "Personality: " << *persona.negative_trait << '\n';
    if (persona.biography) os << "Biography: " << *persona.biography << '\n';
    if (persona.medical_condition) os << "Medical condition: " << *persona.medical_condition << '\n';
    if (persona.reason_for_visit) os << "Reason for visit: " << *persona.reason_for_visit << '\n';
    return os.str();
}

}  // namespace hl
