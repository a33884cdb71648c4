#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

#include "hl/core/jsonl.hpp"
#include "hl/core/model.hpp"
#include "hl/digest.hpp"
#include "hl/error.hpp"
#include "hl/parallel.hpp"
#include "hl/random.hpp"
#include "support.hpp"

using namespace hl;
using hl::test::make_dialogue;
using hl::test::TempDir;
using hl::test::words;

namespace {

TuringGame game(const std::string& id, std::size_t words_a, std::size_t words_b) {
    TuringGame g;
    g.id = id;
    g.conversation_a = make_dialogue(id + "-a", {{Speaker::Witness, words(words_a)}});
    g.conversation_b = make_dialogue(id + "-b", {{Speaker::Witness, words(words_b)}});
    return g;
}

}  // namespace

TEST_CASE("word_count") {
    CHECK(word_count(make_dialogue("d", {{Speaker::Investigator, "hi there"}, {Speaker::Witness, "hello"}})) == 3);
    CHECK(word_count(Dialogue{"empty", {}, {}, {}}) == 0);

    const std::string fifty =
        "the quick brown fox jumps over the lazy dog while seven small birds sing on a wire above the old red barn "
        "and a farmer in a wide straw hat walks slowly toward the gate carrying two heavy buckets of water for the "
        "thirsty horses waiting in the field beyond";
    // Counted independently: split on single spaces.
    std::size_t spaces = 0;
    for (char ch : fifty) spaces += ch == ' ';
    REQUIRE(spaces + 1 == 50);
    CHECK(word_count(make_dialogue("d", {{Speaker::Witness, fifty}})) == 50);

    CHECK(word_count("  tabs\tand\nnewlines  ") == 3);
    CHECK(word_count("non\xC2\xA0" "breaking") == 2);
    CHECK(word_count("ideographic\xE3\x80\x80space") == 2);
}

TEST_CASE("filter_games drops games with a short side") {
    CHECK(filter_games({game("g", 49, 200)}).empty());
    CHECK(filter_games({game("g", 50, 50)}).size() == 1);
    CHECK(filter_games({}).empty());

    auto kept = filter_games({game("a", 60, 60), game("b", 10, 60), game("c", 70, 80)});
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == "a");
    CHECK(kept[1].id == "c");
    CHECK(filter_games({game("g", 5, 5)}, 5).size() == 1);
}

TEST_CASE("witness_text") {
    CHECK(witness_text(make_dialogue("d", {{Speaker::Investigator, "hi"}, {Speaker::Witness, "hey"},
                                           {Speaker::Witness, "u?"}})) == "hey\nu?");
    CHECK(witness_text(make_dialogue("d", {{Speaker::Witness, "ok"}})) == "ok");
    CHECK_THROWS_AS(witness_text(make_dialogue("d", {{Speaker::Investigator, "anyone?"}})), ValidationError);
}

TEST_CASE("trim handles unicode spaces") {
    CHECK(trim("  x  ") == "x");
    CHECK(trim("\xE2\x80\x83x y\xE3\x80\x80") == "x y");
    CHECK(trim(" \t\n").empty());
}

TEST_CASE("validation") {
    Dialogue d = make_dialogue("d", {{Speaker::Witness, "ok"}});
    CHECK_NOTHROW(validate(d));
    d.turns[0].text = "   ";
    CHECK_THROWS_AS(validate(d), ValidationError);
    d = make_dialogue("d", {{Speaker::Witness, "ok"}});
    d.turns[0].index = 3;
    CHECK_THROWS_AS(validate(d), ValidationError);

    TuringGame g = game("g", 3, 3);
    g.reasons = std::vector<std::string>{"one", "two"};
    CHECK_THROWS_AS(validate(g), ValidationError);
    g.reasons->push_back("three");
    CHECK_NOTHROW(validate(g));

    CHECK_THROWS_AS(validate(TraitInventory{"x", {"a", "a"}}), ValidationError);
    CHECK_THROWS_AS(validate(TraitInventory{"", {"a"}}), ValidationError);

    LikertVector v{"d", "inv", {1, 5, 3}, 1};
    CHECK_NOTHROW(validate(v));
    v.ratings[1] = 6;
    CHECK_THROWS_AS(validate(v), ValidationError);
    v.ratings[1] = 0;
    CHECK_THROWS_AS(validate(v), ValidationError);
    v.ratings[1] = 2;
    v.label = 2;
    CHECK_THROWS_AS(validate(v), ValidationError);
    v.label = 0;
    CHECK_THROWS_AS(validate(v, TraitInventory{"inv", {"a", "b"}}), ValidationError);
    CHECK_THROWS_AS(validate(v, TraitInventory{"other", {"a", "b", "c"}}), ValidationError);
    CHECK_NOTHROW(validate(v, TraitInventory{"inv", {"a", "b", "c"}}));
}

TEST_CASE("json round trips") {
    TuringGame g = game("g1", 3, 4);
    g.conversation_a.persona_id = "p1";
    g.conversation_b.source_model = "m";
    g.human_side = Side::B;
    g.verdict = Side::A;
    g.reasons = std::vector<std::string>{"r1", "r2", "r3"};
    g.presentation_seed = 42;
    Json j = g;
    CHECK(j["human_side"] == "B");
    CHECK(j["a"]["persona_id"] == "p1");
    CHECK(j["b"]["turns"][0]["speaker"] == "witness");
    auto back = j.get<TuringGame>();
    CHECK(Json(back) == j);

    LikertVector v{"d", "HL16Q", {1, 2, 3}, std::nullopt};
    Json jv = v;
    CHECK_FALSE(jv.contains("label"));
    CHECK(jv["inventory"] == "HL16Q");
    CHECK(Json(jv.get<LikertVector>()) == jv);

    CHECK_THROWS(Json::parse(R"({"id":"x","turns":[{"speaker":"narrator","text":"t"}]})").get<Dialogue>());
}

TEST_CASE("jsonl errors name file and line") {
    TempDir dir;
    auto path = dir / "games.jsonl";
    {
        std::ofstream f(path);
        f << R"({"id":"d1","turns":[{"speaker":"witness","text":"hi"}]})" << "\n\n";
        f << R"({"id":"d2","turns":[{"speaker":"witness","text":""}]})" << "\n";
    }
    try {
        read_records<Dialogue>(path);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("games.jsonl:2:") != std::string::npos);
    }

    {
        std::ofstream f(path);
        f << "{\"id\":\"d1\"\n";
    }
    CHECK_THROWS_AS(read_jsonl(path), ValidationError);
    CHECK_THROWS_AS(read_jsonl(dir / "missing.jsonl"), IoError);

    std::vector<Dialogue> rows{make_dialogue("a", {{Speaker::Witness, "x"}}), make_dialogue("b", {{Speaker::Witness, "y"}})};
    write_records(dir / "out.jsonl", rows);
    auto back = read_records<Dialogue>(dir / "out.jsonl");
    REQUIRE(back.size() == 2);
    CHECK(back[1].id == "b");

    write_records(dir / "empty.jsonl", std::vector<Dialogue>{});
    CHECK(std::filesystem::file_size(dir / "empty.jsonl") == 0);
}

TEST_CASE("rng is reproducible and bounded") {
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng r(1);
    std::map<std::uint64_t, int> hist;
    for (int i = 0; i < 6000; ++i) {
        auto x = r.below(6);
        REQUIRE(x < 6);
        ++hist[x];
    }
    CHECK(hist.size() == 6);
    for (auto& [k, n] : hist) CHECK(n > 850);

    for (int i = 0; i < 1000; ++i) {
        double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }

    auto p = Rng(5).permutation(10);
    std::set<std::size_t> seen(p.begin(), p.end());
    CHECK(seen.size() == 10);
    CHECK(*seen.rbegin() == 9);
    CHECK(Rng(5).permutation(10) == p);

    // mt19937_64 reference value: the 10000th output for the default seed.
    std::mt19937_64 ref;
    ref.discard(9999);
    CHECK(ref() == 9981545732273789042ULL);
}

TEST_CASE("derived seeds separate purposes") {
    CHECK(derive_seed(7, "cv") == derive_seed(7, "cv"));
    CHECK(derive_seed(7, "cv") != derive_seed(7, "elo"));
    CHECK(derive_seed(7, "cv") != derive_seed(8, "cv"));
    CHECK(derive_seed(7, "cv", 0) != derive_seed(7, "cv", 1));
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("round_half_away") {
    CHECK(round_half_away(0.5) == 1);
    CHECK(round_half_away(1.5) == 2);
    CHECK(round_half_away(2.5) == 3);
    CHECK(round_half_away(-0.5) == -1);
    CHECK(round_half_away(0.49) == 0);
}

TEST_CASE("sha256") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("parallel_for keeps order and reports failures per slot") {
    std::vector<int> out(50);
    auto errors = parallel_for(out.size(), 4, [&](std::size_t i) {
        if (i == 17) throw ValidationError("slot 17");
        out[i] = static_cast<int>(i * i);
    });
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i == 17) {
            CHECK(errors[i] != nullptr);
        } else {
            CHECK(errors[i] == nullptr);
            CHECK(out[i] == static_cast<int>(i * i));
        }
    }
    try {
        rethrow_first_labeled(errors, [](std::size_t i) { return "item " + std::to_string(i); });
        FAIL("expected rethrow");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("item 17") != std::string::npos);
    }
}
