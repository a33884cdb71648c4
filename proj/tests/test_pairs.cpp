#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "hl/core/jsonl.hpp"
#include "hl/error.hpp"
#include "hl/gateway/mock_backend.hpp"
#include "hl/pairs/pairs.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hl;
using hl::test::make_dialogue;
using hl::test::TempDir;

namespace {

ScoredDialogue scored(const std::string& id, const std::string& persona, double score) {
    ScoredDialogue s;
    s.dialogue = make_dialogue(id, {{Speaker::Investigator, "what brings you in"}, {Speaker::Witness, "reply " + id}});
    s.dialogue.persona_id = persona;
    s.hl_score = score;
    return s;
}

std::vector<oracle::PairKey> keys(const PairBuildResult& r) {
    std::vector<oracle::PairKey> out;
    for (const auto& p : r.pairs) out.emplace_back(p.persona_id, p.chosen.id, p.rejected.id);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("three candidates, one persona") {
    std::vector<ScoredDialogue> s{scored("a", "p", 0.0), scored("b", "p", 1.0), scored("c", "p", 2.0)};
    auto r = build_pairs(s, 0.5);
    CHECK(r.sigma == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(r.threshold == doctest::Approx(0.5 * std::sqrt(2.0 / 3.0)).epsilon(1e-12));
    CHECK(r.pairs.size() == 3);
    for (const auto& p : r.pairs) CHECK(p.score_chosen > p.score_rejected);
    CHECK_FALSE(r.warning);

    // 1 - 0 = 1 < 1.5 * sigma ~ 1.22: only the outer pair survives.
    auto strict = build_pairs(s, 1.5);
    REQUIRE(strict.pairs.size() == 1);
    CHECK(strict.pairs[0].chosen.id == "c");
    CHECK(strict.pairs[0].rejected.id == "a");
}

TEST_CASE("identical scores give no pairs and a warning") {
    std::vector<ScoredDialogue> s{scored("a", "p", 0.3), scored("b", "p", 0.3), scored("c", "q", 0.3)};
    auto r = build_pairs(s, 0.5);
    CHECK(r.pairs.empty());
    CHECK(r.sigma == 0.0);
    CHECK(r.warning);
}

TEST_CASE("pairs never cross personas") {
    std::vector<ScoredDialogue> s{scored("a", "p", 0.0), scored("b", "q", 5.0)};
    CHECK(build_pairs(s, 0.0).pairs.empty());
}

TEST_CASE("pair builder errors") {
    auto bad = scored("a", "p", 1.0);
    bad.dialogue.persona_id.reset();
    CHECK_THROWS_AS(build_pairs({bad}, 0.5), ValidationError);
    CHECK_THROWS_AS(build_pairs({scored("a", "p", std::nan(""))}, 0.5), ValidationError);
    CHECK_THROWS_AS(build_pairs({scored("a", "p", 1.0)}, -1.0), ValidationError);
    CHECK_THROWS_AS(build_pairs({scored("a", "p", 1.0), scored("a", "p", 2.0)}, 0.5), ValidationError);
}

TEST_CASE("pair builder agrees with the oracle") {
    Rng rng(321);
    for (int trial = 0; trial < 40; ++trial) {
        const int personas = 1 + static_cast<int>(rng.below(5));
        const int per = 2 + static_cast<int>(rng.below(7));
        const double factor = rng.uniform(0.0, 1.5);
        std::vector<ScoredDialogue> s;
        std::vector<oracle::Candidate> c;
        for (int p = 0; p < personas; ++p)
            for (int i = 0; i < per; ++i) {
                const std::string id = "p" + std::to_string(p) + "-c" + std::to_string(i);
                // Coarse grid so ties and near-threshold differences occur.
                const double score = static_cast<double>(rng.below(9)) * 0.25 - 1.0;
                s.push_back(scored(id, "p" + std::to_string(p), score));
                c.push_back({id, "p" + std::to_string(p), score});
            }
        auto r = build_pairs(s, factor);
        CHECK(keys(r) == oracle::pairs(c, factor));

        // No pair in both directions.
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& p : r.pairs) {
            CHECK_FALSE(seen.count({p.rejected.id, p.chosen.id}));
            seen.insert({p.chosen.id, p.rejected.id});
        }

        // Input order does not matter.
        auto shuffled = s;
        rng.shuffle(shuffled);
        auto r2 = build_pairs(shuffled, factor);
        REQUIRE(r2.pairs.size() == r.pairs.size());
        for (std::size_t i = 0; i < r.pairs.size(); ++i) CHECK(Json(r2.pairs[i]) == Json(r.pairs[i]));
    }
}

TEST_CASE("export") {
    TempDir dir;
    export_pairs({}, dir / "empty.jsonl");
    CHECK(std::filesystem::file_size(dir / "empty.jsonl") == 0);

    std::vector<ScoredDialogue> s;
    for (int i = 0; i < 7; ++i) s.push_back(scored("c" + std::to_string(i), "p", static_cast<double>(i)));
    std::map<std::string, Persona> personas;
    Persona p;
    p.id = "p";
    p.seed_id = "p";
    p.age = 30;
    p.gender = "male";
    p.biography = "Retired sailor.";
    personas["p"] = p;
    auto r = build_pairs(s, 0.0, personas);
    CHECK(r.pairs.size() == 21);
    export_pairs(r.pairs, dir / "pairs.jsonl");
    auto rows = read_jsonl(dir / "pairs.jsonl");
    REQUIRE(rows.size() == 21);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i]["chosen"] == witness_text(r.pairs[i].chosen));
        CHECK(rows[i]["rejected"] == witness_text(r.pairs[i].rejected));
        CHECK(rows[i]["prompt"].get<std::string>().find("Retired sailor.") != std::string::npos);
        CHECK(rows[i]["meta"]["score_chosen"].get<double>() > rows[i]["meta"]["score_rejected"].get<double>());
    }

    Json j = r.pairs[0];
    CHECK(Json(j.get<PreferencePair>()) == j);
}

TEST_CASE("population_std") {
    CHECK(population_std({1, 1, 1}) == 0.0);
    CHECK(population_std({0, 2}) == doctest::Approx(1.0));
    CHECK(population_std({}) == 0.0);
}

TEST_CASE("candidate generation") {
    MockBackend mock(2);
    Persona p;
    p.id = "p1";
    p.seed_id = "p1";
    p.age = 50;
    p.gender = "female";
    p.traits = {"chatty"};

    GenerationOptions opts;
    opts.script = {"Hello, what brings you in?", "How long has this been going on?"};
    auto one = generate_candidates(p, {{&mock, "only", 1.0}}, opts, 3);
    REQUIRE(one.size() == 7);
    for (const auto& d : one) {
        CHECK(d.source_model == "only");
        CHECK(d.persona_id == "p1");
        CHECK(d.turns.size() == 4);
        CHECK(d.turns[0].speaker == Speaker::Investigator);
        CHECK(d.turns[1].speaker == Speaker::Witness);
    }
    CHECK(Json(generate_candidates(p, {{&mock, "only", 1.0}}, opts, 3)) == Json(one));

    std::vector<Generator> pool;
    for (int i = 0; i < 8; ++i) pool.push_back({&mock, "m" + std::to_string(i), 1.0});
    Rng rng(8);
    std::vector<int> counts(8, 0);
    for (int i = 0; i < 8000; ++i) ++counts[sample_generator(rng, pool)];
    for (int c : counts) {
        CHECK(c > 850);
        CHECK(c < 1150);
    }

    std::vector<Generator> weighted{{&mock, "a", 3.0}, {&mock, "b", 1.0}};
    int a = 0;
    for (int i = 0; i < 4000; ++i) a += sample_generator(rng, weighted) == 0;
    CHECK(a > 2800);
    CHECK(a < 3200);

    CHECK_THROWS_AS(generate_candidates(p, {}, opts, 3), ValidationError);
    opts.candidates = 0;
    CHECK_THROWS_AS(generate_candidates(p, pool, opts, 3), ValidationError);
}

TEST_CASE("model pool file") {
    TempDir dir;
    {
        std::ofstream f(dir / "pool.json");
        f << R"([{"base_url":"http://localhost:8000/v1","model":"x"},
                 {"base_url":"https://api.example.com/v1","model":"y","weight":2,"api_key_env":"KEY"}])";
    }
    auto pool = read_model_pool(dir / "pool.json");
    REQUIRE(pool.size() == 2);
    CHECK(pool[0].weight == 1.0);
    CHECK(pool[1].weight == 2.0);
    CHECK(pool[1].backend.api_key_env == "KEY");

    {
        std::ofstream f(dir / "bad.json");
        f << R"([{"base_url":"http://localhost:8000/v1","model":"x","weight":0}])";
    }
    CHECK_THROWS_AS(read_model_pool(dir / "bad.json"), ValidationError);
    {
        std::ofstream f(dir / "empty.json");
        f << "[]";
    }
    CHECK_THROWS_AS(read_model_pool(dir / "empty.json"), ValidationError);
}
