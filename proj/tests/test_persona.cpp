#include <doctest.h>

#include <map>
#include <set>

#include "hl/error.hpp"
#include "hl/gateway/mock_backend.hpp"
#include "hl/persona/persona.hpp"

using namespace hl;

namespace {

Persona seed_persona(const std::string& id = "s1") {
    Persona p;
    p.id = id;
    p.seed_id = id;
    p.age = 40;
    p.gender = "female";
    p.traits = {"talkative", "anxious", "curious", "sarcastic"};
    return p;
}

std::vector<Persona> plain(int n) {
    std::vector<Persona> out;
    for (int i = 0; i < n; ++i) {
        auto p = seed_persona("p" + std::to_string(i));
        out.push_back(p);
    }
    return out;
}

std::size_t tagged(const std::vector<Persona>& ps) {
    std::size_t n = 0;
    for (const auto& p : ps) n += p.negative_trait.has_value();
    return n;
}

}  // namespace

TEST_CASE("expand_seed perturbs age and keeps gender") {
    auto seed = seed_persona();
    auto out = expand_seed(seed, 200, 17);
    REQUIRE(out.size() == 200);
    std::set<std::string> ids;
    std::set<int> ages;
    for (const auto& p : out) {
        CHECK(p.age >= 38);
        CHECK(p.age <= 42);
        CHECK(p.gender == "female");
        CHECK(p.seed_id == "s1");
        CHECK_FALSE(p.traits.empty());
        for (const auto& t : p.traits)
            CHECK(std::find(seed.traits.begin(), seed.traits.end(), t) != seed.traits.end());
        ids.insert(p.id);
        ages.insert(p.age);
    }
    CHECK(ids.size() == 200);
    CHECK(ages.size() > 1);

    auto again = expand_seed(seed, 200, 17);
    CHECK(Json(again) == Json(out));
    CHECK(Json(expand_seed(seed, 200, 18)) != Json(out));

    auto young = seed;
    young.age = 1;
    for (const auto& p : expand_seed(young, 50, 3)) CHECK(p.age >= 1);

    CHECK_THROWS_AS(expand_seed(seed, 0, 1), ValidationError);
    CHECK_THROWS_AS(expand_seed(seed, -3, 1), ValidationError);
}

TEST_CASE("negative trait counts") {
    const auto& pool = default_negative_traits();
    CHECK(tagged(assign_negative_traits(plain(100), 0.05, pool, 1)) == 5);
    CHECK(tagged(assign_negative_traits(plain(100), 0.0, pool, 1)) == 0);
    CHECK(tagged(assign_negative_traits(plain(10), 0.05, pool, 1)) == 1);  // 0.5 rounds up
    CHECK(tagged(assign_negative_traits(plain(10), 1.0, pool, 1)) == 10);
    CHECK(tagged(assign_negative_traits(plain(7), 0.5, pool, 1)) == 4);
    CHECK_THROWS_AS(assign_negative_traits(plain(10), -0.1, pool, 1), ValidationError);
    CHECK_THROWS_AS(assign_negative_traits(plain(10), 1.1, pool, 1), ValidationError);
    CHECK_THROWS_AS(assign_negative_traits(plain(10), 0.5, {}, 1), ValidationError);

    for (const auto& p : assign_negative_traits(plain(100), 0.2, pool, 9))
        if (p.negative_trait) CHECK(std::find(pool.begin(), pool.end(), *p.negative_trait) != pool.end());

    // Every persona should be picked at some point across seeds.
    std::map<std::string, int> hits;
    for (std::uint64_t s = 0; s < 400; ++s)
        for (const auto& p : assign_negative_traits(plain(10), 0.1, pool, s))
            if (p.negative_trait) ++hits[p.id];
    CHECK(hits.size() == 10);
    for (auto& [id, n] : hits) {
        CHECK(n > 15);
        CHECK(n < 70);
    }
}

TEST_CASE("expand_all tags across the batch") {
    std::vector<Persona> seeds{seed_persona("a"), seed_persona("b")};
    auto out = expand_all(seeds, 10, 0.05, default_negative_traits(), 4);
    CHECK(out.size() == 20);
    CHECK(tagged(out) == 1);
    CHECK(Json(expand_all(seeds, 10, 0.05, default_negative_traits(), 4)) == Json(out));
}

TEST_CASE("split hygiene") {
    auto ps = expand_seed(seed_persona("a"), 3, 1);
    auto other = expand_seed(seed_persona("b"), 3, 1);
    for (auto& p : ps) p.split = "train";
    for (auto& p : other) p.split = "test";
    ps.insert(ps.end(), other.begin(), other.end());
    CHECK_NOTHROW(check_split_hygiene(ps));
    ps[1].split = "test";
    CHECK_THROWS_AS(check_split_hygiene(ps), ValidationError);
}

TEST_CASE("persona json") {
    auto p = seed_persona();
    p.negative_trait = "rude";
    Json j = p;
    CHECK(j["negative_trait"] == "rude");
    CHECK_FALSE(j.contains("biography"));
    CHECK(Json(j.get<Persona>()) == j);
    p.age = 0;
    CHECK_THROWS_AS(validate(p), ValidationError);
}

TEST_CASE("enrichment fills three distinct fields") {
    MockBackend mock(5);
    Judge judge{&mock, "mock-writer"};
    auto p = seed_persona();
    auto e = enrich_persona(p, judge);
    REQUIRE(e.biography);
    REQUIRE(e.medical_condition);
    REQUIRE(e.reason_for_visit);
    CHECK_FALSE(e.biography->empty());
    CHECK_FALSE(e.medical_condition->empty());
    CHECK_FALSE(e.reason_for_visit->empty());
    CHECK(*e.biography != *e.medical_condition);
    CHECK(*e.medical_condition != *e.reason_for_visit);
    CHECK(e.age == p.age);
    CHECK(e.traits == p.traits);

    auto stale = p;
    stale.biography = "old text";
    auto replaced = enrich_persona(stale, judge);
    CHECK(*replaced.biography != "old text");

    auto bare = p;
    bare.traits.clear();
    auto eb = enrich_persona(bare, judge);
    CHECK(eb.biography);

    auto all = enrich_all(plain(6), judge, "medical visit");
    REQUIRE(all.size() == 6);
    CHECK(all[3].id == "p3");
    for (const auto& x : all) CHECK(x.reason_for_visit);

    CHECK(persona_system_prompt(e).find(*e.biography) != std::string::npos);
}
