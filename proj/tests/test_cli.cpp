#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hl/core/jsonl.hpp"
#include "hl/score/scorer.hpp"
#include "support.hpp"

using namespace hl;
using hl::test::TempDir;

namespace {

// Runs hlkit with the given arguments inside `dir`; returns the exit status.
int hlkit(const TempDir& dir, const std::string& args) {
    const std::string cmd = "cd '" + dir.path().string() + "' && SOURCE_DATE_EPOCH=1700000000 '" HL_HLKIT "' " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const std::string kGames = HL_FIXTURE_DIR "/games.jsonl";

}  // namespace

TEST_CASE("exit codes") {
    TempDir dir;
    CHECK(hlkit(dir, "") == 64);
    CHECK(hlkit(dir, "filter-games --games '" + kGames + "' --out x.jsonl --bogus") == 64);
    CHECK(hlkit(dir, "filter-games --out x.jsonl") == 64);
    CHECK(hlkit(dir, "--help") == 0);

    std::ofstream(dir / "bad.jsonl") << "{\"id\": 1}\n";
    CHECK(hlkit(dir, "filter-games --games bad.jsonl --out x.jsonl") == 1);
    CHECK(slurp(dir / "stderr.txt").find("bad.jsonl:1:") != std::string::npos);
}

TEST_CASE("filter-games writes output and a manifest") {
    TempDir dir;
    REQUIRE(hlkit(dir, "filter-games --games '" + kGames + "' --out kept.jsonl") == 0);
    CHECK(read_jsonl(dir / "kept.jsonl").size() == 26);
    auto m = read_json(dir / "kept.jsonl.manifest.json");
    CHECK(m["command"] == "filter-games");
    CHECK(m["params"]["min-words"] == "50");
    CHECK(m["output_hashes"].size() == 1);
    CHECK(m["started_at"] == "2023-11-14T22:13:20.000Z");
}

TEST_CASE("score with the published model") {
    TempDir dir;
    write_jsonl(dir / "v.jsonl", {Json{{"dialogue_id", "zero"}, {"inventory", "HL16Q"}, {"ratings", std::vector<int>(16, 0)}},
                                  Json{{"dialogue_id", "one"}, {"inventory", "HL16Q"}, {"ratings", std::vector<int>(16, 1)}}});
    REQUIRE(hlkit(dir, "score --scorer builtin:hl16q --vectors v.jsonl --out s.jsonl") == 0);
    auto rows = read_jsonl(dir / "s.jsonl");
    REQUIRE(rows.size() == 2);
    CHECK(std::abs(rows[0]["hl_score"].get<double>() - (-2.662)) <= 1e-12);
    CHECK(rows[1]["hl_score"].get<double>() == doctest::Approx(-2.2376).epsilon(1e-12));
    CHECK(slurp(dir / "stdout.txt").find("\"zero\"") != std::string::npos);

    write_jsonl(dir / "short.jsonl", {Json{{"dialogue_id", "x"}, {"inventory", "HL16Q"}, {"ratings", {1, 2}}}});
    CHECK(hlkit(dir, "score --scorer builtin:hl16q --vectors short.jsonl --out s2.jsonl") == 1);
}

TEST_CASE("cv is byte-identical across runs") {
    TempDir a, b;
    for (auto* d : {&a, &b}) {
        REQUIRE(hlkit(*d, "filter-games --games '" + kGames + "' --out kept.jsonl") == 0);
        REQUIRE(hlkit(*d, "rate --inventory builtin:hl16q --games kept.jsonl --out v.jsonl --seed 3") == 0);
        REQUIRE(hlkit(*d, "cv --vectors v.jsonl --out cv.json --folds 5 --repeats 3 --max-iters 200 --seed 3") == 0);
    }
    CHECK(slurp(a / "cv.json") == slurp(b / "cv.json"));
    CHECK(slurp(a / "cv.json.manifest.json") == slurp(b / "cv.json.manifest.json"));
    auto report = read_json(a / "cv.json");
    CHECK(report["fold_count"] == 5);
    CHECK(report["per_repeat"].size() == 3);
}

TEST_CASE("pairs build from precomputed scores") {
    TempDir dir;
    std::vector<Json> dialogues;
    for (const char* id : {"c1", "c2", "c3"})
        dialogues.push_back(Json{{"id", id},
                                 {"persona_id", "p"},
                                 {"turns", {{{"speaker", "investigator"}, {"text", "hi"}},
                                            {{"speaker", "witness"}, {"text", std::string("reply ") + id}}}}});
    write_jsonl(dir / "d.jsonl", dialogues);
    write_jsonl(dir / "s.jsonl", {Json{{"dialogue_id", "c1"}, {"hl_score", 0.0}},
                                  Json{{"dialogue_id", "c2"}, {"hl_score", 1.0}},
                                  Json{{"dialogue_id", "c3"}, {"hl_score", 2.0}}});
    REQUIRE(hlkit(dir, "pairs build --dialogues d.jsonl --scores s.jsonl --out pairs.jsonl") == 0);
    CHECK(read_jsonl(dir / "pairs.jsonl").size() == 3);
    REQUIRE(hlkit(dir, "pairs export --pairs pairs.jsonl --out export.jsonl") == 0);
    auto rows = read_jsonl(dir / "export.jsonl");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].contains("prompt"));

    // The export manifest's input hash is the build manifest's output hash.
    auto build = read_json(dir / "pairs.jsonl.manifest.json");
    auto exp = read_json(dir / "export.jsonl.manifest.json");
    CHECK(build["output_hashes"]["pairs.jsonl"] == exp["input_hashes"]["pairs.jsonl"]);

    CHECK(hlkit(dir, "pairs build --dialogues d.jsonl --out p2.jsonl") == 1);
}

TEST_CASE("rate-arena and ood-test") {
    TempDir dir;
    std::vector<Json> cmps;
    for (int i = 0; i < 6; ++i)
        cmps.push_back(Json{{"model_a", "x"}, {"model_b", "y"}, {"s_a", i % 3 == 0 ? 0.5 : 1.0},
                            {"decided_at", "2024-01-01T00:00:00Z"}, {"decision_seconds", 10.0 * i}});
    write_jsonl(dir / "c.jsonl", cmps);
    REQUIRE(hlkit(dir, "rate-arena --comparisons c.jsonl --out r.json --shuffles 20 --min-decision-seconds 15") == 0);
    auto r = read_json(dir / "r.json");
    CHECK(r["n_comparisons"] == 4);
    CHECK(r["elo"]["x"]["mean"].get<double>() > r["elo"]["y"]["mean"].get<double>());

    write_jsonl(dir / "a.jsonl", {Json{{"dialogue_id", "a1"}, {"hl_score", 3.0}}, Json{{"dialogue_id", "a2"}, {"hl_score", 4.0}},
                                  Json{{"dialogue_id", "a3"}, {"hl_score", 5.0}}});
    write_jsonl(dir / "b.jsonl", {Json{{"dialogue_id", "b1"}, {"hl_score", 1.0}}, Json{{"dialogue_id", "b2"}, {"hl_score", 2.0}}});
    REQUIRE(hlkit(dir, "ood-test --a a.jsonl --b b.jsonl --out t.json --n-boot 200") == 0);
    auto t = read_json(dir / "t.json");
    CHECK(t["statistic"] == 6.0);
    CHECK(t["p_value"].get<double>() == doctest::Approx(0.1));
    CHECK(t["n_a"] == 3);
}
