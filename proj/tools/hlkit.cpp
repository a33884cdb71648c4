// hlkit: command-line driver for the human-likeness pipeline.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hl/arena/arena.hpp"
#include "hl/arena/server.hpp"
#include "hl/core/jsonl.hpp"
#include "hl/core/model.hpp"
#include "hl/error.hpp"
#include "hl/gateway/http_backend.hpp"
#include "hl/gateway/mock_backend.hpp"
#include "hl/pairs/pairs.hpp"
#include "hl/parallel.hpp"
#include "hl/persona/persona.hpp"
#include "hl/random.hpp"
#include "hl/ratings/elo.hpp"
#include "hl/ratings/stats.hpp"
#include "hl/score/cross_validation.hpp"
#include "hl/score/distributions.hpp"
#include "hl/score/logistic.hpp"
#include "hl/score/rating.hpp"
#include "hl/score/scorer.hpp"
#include "hl/traits/clustering.hpp"
#include "hl/traits/summarize.hpp"
#include "hl/traits/turing_judge.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace hl;
using hl::cli::RunManifest;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitTransport = 2;
constexpr int kExitUsage = 64;

struct Common {
    std::uint64_t seed = 0;
    std::string backend = "mock";
    std::string config;
    std::size_t parallelism = kDefaultParallelism;
    std::string judge_model;
    std::string reasoning_effort;
};

void add_common(CLI::App* sub, Common& c, bool judge = false) {
    sub->add_option("--seed", c.seed, "Master seed; every random choice derives from it");
    sub->add_option("--backend", c.backend, "Model backend")->check(CLI::IsMember({"mock", "http"}));
    sub->add_option("--config", c.config, "Backend configuration file (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--parallelism", c.parallelism, "Maximum in-flight requests")->check(CLI::PositiveNumber);
    if (judge) {
        sub->add_option("--judge-model", c.judge_model, "Model id for judge calls");
        sub->add_option("--reasoning-effort", c.reasoning_effort, "low | medium | high")
            ->check(CLI::IsMember({"low", "medium", "high"}));
    }
}

Json load_config(const Common& c) {
    if (c.config.empty()) return Json::object();
    auto j = read_json(c.config);
    if (!j.is_object()) throw ConfigError(c.config + ": configuration must be a JSON object");
    return j;
}

// Backend shared by every call in one run.
std::unique_ptr<ChatBackend> make_backend(const Common& c) {
    if (c.backend == "mock") return std::make_unique<MockBackend>(derive_seed(c.seed, "mock-backend"));
    auto cfg = load_config(c);
    if (!cfg.contains("backend"))
        throw ConfigError("--backend http needs --config with a \"backend\" section (base_url, api_key_env, ...)");
    return std::make_unique<HttpBackend>(backend_config_from_json(cfg.at("backend")));
}

std::string config_string(const Common& c, const char* key) {
    auto cfg = load_config(c);
    if (cfg.contains(key)) return cfg.at(key).get<std::string>();
    return {};
}

std::string pick_model(const Common& c, const std::string& flag, const char* key, const char* mock_default) {
    if (!flag.empty()) return flag;
    if (auto v = config_string(c, key); !v.empty()) return v;
    if (c.backend == "mock") return mock_default;
    throw ConfigError(std::string("no model configured: pass a flag or set \"") + key + "\" in --config");
}

Judge make_judge(const Common& c, ChatBackend* backend) {
    Judge j;
    j.backend = backend;
    j.model = pick_model(c, c.judge_model, "judge_model", "mock-judge");
    std::string effort = c.reasoning_effort.empty() ? config_string(c, "reasoning_effort") : c.reasoning_effort;
    if (!effort.empty()) j.reasoning_effort = reasoning_effort_from_string(effort);
    j.parallelism = c.parallelism;
    return j;
}

TraitInventory load_inventory(const std::string& spec) {
    if (spec == "builtin:hl16q") return hl16q_inventory();
    if (spec == "builtin:hl32q") return hl32q_inventory();
    auto inv = read_object<TraitInventory>(spec);
    validate(inv);
    return inv;
}

LinearScorer load_scorer(const std::string& spec) {
    if (spec == "builtin:hl16q") return published_hl16q();
    auto s = read_object<LinearScorer>(spec);
    validate(s);
    return s;
}

bool is_builtin(const std::string& spec) { return spec.rfind("builtin:", 0) == 0; }

void hash_input(RunManifest& m, const std::string& spec) {
    if (!spec.empty() && !is_builtin(spec)) m.input(spec);
}

// Ratings for scoring are read without the 1..5 range check so the model can
// be probed at arbitrary points (e.g. the zero vector).
struct RawVector {
    std::string dialogue_id;
    std::optional<std::string> inventory;
    std::vector<double> ratings;
};

std::vector<RawVector> read_raw_vectors(const fs::path& path) {
    std::vector<RawVector> out;
    std::size_t line = 0;
    for (const auto& j : read_jsonl(path)) {
        ++line;
        try {
            RawVector v;
            v.dialogue_id = j.at("dialogue_id").get<std::string>();
            if (j.contains("inventory")) v.inventory = j.at("inventory").get<std::string>();
            v.ratings = j.at("ratings").get<std::vector<double>>();
            out.push_back(std::move(v));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

std::map<std::string, double> read_scores(const fs::path& path) {
    std::map<std::string, double> out;
    std::size_t line = 0;
    for (const auto& j : read_jsonl(path)) {
        ++line;
        try {
            auto id = j.at("dialogue_id").get<std::string>();
            if (!out.emplace(id, j.at("hl_score").get<double>()).second)
                throw ValidationError("duplicate dialogue_id '" + id + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

std::vector<double> score_values(const fs::path& path) {
    std::vector<double> v;
    for (const auto& [id, s] : read_scores(path)) v.push_back(s);
    return v;
}

void add_train_flags(CLI::App* sub, TrainConfig& cfg) {
    sub->add_option("--lr", cfg.learning_rate, "Gradient-descent step size");
    sub->add_option("--max-iters", cfg.max_iters, "Iteration cap");
    sub->add_option("--tolerance", cfg.tolerance, "Stop when max |gradient| falls below this");
    sub->add_option("--l2", cfg.l2_lambda, "L2 penalty on the weights");
}

void note_fit(RunManifest& m, const LogisticFit& fit) {
    m.note("iterations", fit.iterations);
    m.note("converged", fit.converged);
    if (!fit.converged) std::cerr << "warning: training stopped at --max-iters before converging\n";
}

// Records every option of the running subcommand (given or default) as a
// manifest param.
void record_params(RunManifest& m, const CLI::App* sub) {
    for (const CLI::Option* opt : sub->get_options()) {
        auto names = opt->get_lnames();
        if (names.empty() || names.front() == "help") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
        }
        m.param(names.front(), value);
    }
}

using Body = std::function<fs::path(RunManifest&)>;

void on_run(CLI::App* sub, std::string command, const Common& c, Body body) {
    sub->callback([sub, command = std::move(command), &c, body = std::move(body)] {
        RunManifest m(command);
        record_params(m, sub);
        m.seed("seed", c.seed);
        m.note("rng", std::string(Rng::kName));
        fs::path primary = body(m);
        m.finish(primary);
    });
}

ArenaServer* g_server = nullptr;

extern "C" void handle_signal(int) {
    if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Human-likeness scoring, preference pairs, and arena ratings"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    Common c;

    // filter-games
    {
        auto* sub = app.add_subcommand("filter-games", "Drop games where either conversation is too short");
        auto games = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto min_words = std::make_shared<std::size_t>(50);
        sub->add_option("--games", *games, "Input games.jsonl")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", *out, "Filtered games.jsonl")->required();
        sub->add_option("--min-words", *min_words, "Minimum words per conversation");
        add_common(sub, c);
        on_run(sub, "filter-games", c, [=](RunManifest& m) {
            m.input(*games);
            auto all = read_records<TuringGame>(*games);
            auto kept = filter_games(all, *min_words);
            write_records(*out, kept);
            m.output(*out);
            m.note("games_in", all.size());
            m.note("games_kept", kept.size());
            std::cerr << "kept " << kept.size() << " of " << all.size() << " games\n";
            return fs::path(*out);
        });
    }

    // judge-pairs
    {
        auto* sub = app.add_subcommand("judge-pairs", "Ask the judge which witness is human and collect its reasons");
        auto games = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto reasons = std::make_shared<std::string>();
        sub->add_option("--games", *games, "Input games.jsonl")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", *out, "Judged games.jsonl")->required();
        sub->add_option("--reasons", *reasons, "Write reasons.jsonl here");
        add_common(sub, c, true);
        on_run(sub, "judge-pairs", c, [=](RunManifest& m) {
            m.input(*games);
            auto backend = make_backend(c);
            auto judge = make_judge(c, backend.get());
            auto seed = derive_seed(c.seed, "judge-pairs");
            m.seed("presentation", seed);
            auto judged = judge_games(read_records<TuringGame>(*games), judge, seed);
            write_records(*out, judged);
            m.output(*out);
            if (!reasons->empty()) {
                write_records(*reasons, collect_reasons(judged));
                m.output(*reasons);
            }
            double acc = judge_accuracy(judged);
            m.note("judge_accuracy", acc);
            std::cerr << "judge accuracy " << acc << " over " << judged.size() << " games\n";
            return fs::path(*out);
        });
    }

    // mine-traits
    {
        auto* sub = app.add_subcommand("mine-traits", "Embed, cluster and summarize judge reasons into an inventory");
        auto reasons = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto embedded_out = std::make_shared<std::string>();
        auto clusters_out = std::make_shared<std::string>();
        auto name = std::make_shared<std::string>("HL32Q");
        auto embed_model = std::make_shared<std::string>();
        auto params = std::make_shared<ClusterParams>();
        auto batch = std::make_shared<std::size_t>(64);
        sub->add_option("--reasons", *reasons, "reasons.jsonl (embeddings are reused when present)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", *out, "Inventory JSON")->required();
        sub->add_option("--embedded-out", *embedded_out, "Write reasons with embeddings here");
        sub->add_option("--clusters", *clusters_out, "Write clusters.json here");
        sub->add_option("--name", *name, "Inventory name");
        sub->add_option("--embed-model", *embed_model, "Embedding model id");
        sub->add_option("--min-cluster-size", params->min_cluster_size)->check(CLI::PositiveNumber);
        sub->add_option("--min-samples", params->min_samples)->check(CLI::PositiveNumber);
        sub->add_option("--batch-size", *batch, "Texts per embedding request")->check(CLI::PositiveNumber);
        add_common(sub, c, true);
        on_run(sub, "mine-traits", c, [=](RunManifest& m) {
            m.input(*reasons);
            auto records = read_records<ReasonRecord>(*reasons);
            if (records.empty()) throw ValidationError(*reasons + ": no reasons to mine");
            auto backend = make_backend(c);

            std::vector<std::size_t> missing;
            for (std::size_t i = 0; i < records.size(); ++i)
                if (!records[i].embedding) missing.push_back(i);
            if (!missing.empty()) {
                auto model = pick_model(c, *embed_model, "embedding_model", "mock-embed");
                std::size_t batches = (missing.size() + *batch - 1) / *batch;
                std::vector<std::vector<std::vector<double>>> vecs(batches);
                auto errors = parallel_for(batches, c.parallelism, [&](std::size_t b) {
                    std::vector<std::string> texts;
                    for (std::size_t k = b * *batch; k < std::min(missing.size(), (b + 1) * *batch); ++k)
                        texts.push_back(records[missing[k]].statement);
                    vecs[b] = backend->embed(model, texts);
                });
                rethrow_first_labeled(errors, [](std::size_t b) { return "embedding batch " + std::to_string(b); });
                for (std::size_t b = 0; b < batches; ++b)
                    for (std::size_t k = 0; k < vecs[b].size(); ++k)
                        records[missing[b * *batch + k]].embedding = std::move(vecs[b][k]);
            }
            if (!embedded_out->empty()) {
                write_records(*embedded_out, records);
                m.output(*embedded_out);
            }

            auto result = cluster_reasons(records, *params);
            if (!clusters_out->empty()) {
                write_json(*clusters_out, to_json(result));
                m.output(*clusters_out);
            }
            if (result.clusters.empty())
                throw ValidationError("no clusters found among " + std::to_string(records.size()) +
                                      " reasons; try a smaller --min-cluster-size");
            std::vector<std::string> medoids;
            for (const auto& cl : result.clusters) medoids.push_back(records[cl.medoid].statement);
            auto inventory = summarize_clusters(medoids, make_judge(c, backend.get()), *name);
            write_json(*out, inventory);
            m.output(*out);
            m.note("clusters", result.clusters.size());
            m.note("noise", result.noise().size());
            std::cerr << result.clusters.size() << " clusters, " << result.noise().size() << " noise, "
                      << inventory.size() << " statements\n";
            return fs::path(*out);
        });
    }

    // rate
    {
        auto* sub = app.add_subcommand("rate", "Rate witness turns against a trait inventory");
        auto inventory = std::make_shared<std::string>();
        auto games = std::make_shared<std::string>();
        auto dialogues = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        sub->add_option("--inventory", *inventory, "Inventory JSON, builtin:hl16q or builtin:hl32q")->required();
        auto* g = sub->add_option("--games", *games, "Labeled games.jsonl (both sides rated)")
                      ->check(CLI::ExistingFile);
        auto* d = sub->add_option("--dialogues", *dialogues, "Unlabeled dialogues.jsonl")->check(CLI::ExistingFile);
        g->excludes(d);
        sub->add_option("--out", *out, "vectors.jsonl")->required();
        add_common(sub, c, true);
        on_run(sub, "rate", c, [=](RunManifest& m) {
            if (games->empty() == dialogues->empty()) throw ValidationError("pass exactly one of --games, --dialogues");
            hash_input(m, *inventory);
            hash_input(m, *games);
            hash_input(m, *dialogues);
            auto inv = load_inventory(*inventory);
            auto backend = make_backend(c);
            auto judge = make_judge(c, backend.get());
            std::vector<LikertVector> vectors;
            if (!games->empty())
                vectors = rate_games(read_records<TuringGame>(*games), inv, judge);
            else
                vectors = rate_dialogues(read_records<Dialogue>(*dialogues), inv, judge);
            write_records(*out, vectors);
            m.output(*out);
            std::cerr << "rated " << vectors.size() << " dialogues on " << inv.size() << " statements\n";
            return fs::path(*out);
        });
    }

    // train
    {
        auto* sub = app.add_subcommand("train", "Fit the logistic human-likeness model");
        auto vectors = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto cfg = std::make_shared<TrainConfig>();
        sub->add_option("--vectors", *vectors, "Labeled vectors.jsonl")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", *out, "scorer.json")->required();
        add_train_flags(sub, *cfg);
        add_common(sub, c);
        on_run(sub, "train", c, [=](RunManifest& m) {
            m.input(*vectors);
            auto rows = read_records<LikertVector>(*vectors);
            auto data = make_dataset(rows);
            auto fit = fit_logistic(data, *cfg);
            LinearScorer scorer{rows.front().inventory_name, fit.weights, fit.bias};
            write_json(*out, scorer);
            m.output(*out);
            note_fit(m, fit);
            m.note("train_accuracy", accuracy(data, fit.weights, fit.bias));
            return fs::path(*out);
        });
    }

    // cv
    {
        auto* sub = app.add_subcommand("cv", "Repeated stratified k-fold cross-validation");
        auto vectors = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto folds = std::make_shared<int>(10);
        auto repeats = std::make_shared<int>(20);
        auto cfg = std::make_shared<TrainConfig>();
        sub->add_option("--vectors", *vectors, "Labeled vectors.jsonl")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", *out, "cv_report.json")->required();
        sub->add_option("--folds", *folds)->check(CLI::Range(2, 1000));
        sub->add_option("--repeats", *repeats)->check(CLI::PositiveNumber);
        add_train_flags(sub, *cfg);
        add_common(sub, c);
        on_run(sub, "cv", c, [=](RunManifest& m) {
            m.input(*vectors);
            auto data = make_dataset(read_records<LikertVector>(*vectors));
            auto seed = derive_seed(c.seed, "cv");
            m.seed("cv", seed);
            auto report = cross_validate(data, *folds, *repeats, *cfg, seed, c.parallelism);
            write_json(*out, report);
            m.output(*out);
            std::cerr << "accuracy " << report.mean_accuracy << " +/- " << report.std_accuracy << "\n";
            return fs::path(*out);
        });
    }

    // reduce
    {
        auto* sub = app.add_subcommand("reduce", "Keep the top-m traits by |weight| and retrain");
        auto scorer = std::make_shared<std::string>();
        auto inventory = std::make_shared<std::string>();
        auto vectors = std::make_shared<std::string>();
        auto m_keep = std::make_shared<long long>(16);
        auto name = std::make_shared<std::string>("HL16Q");
        auto out = std::make_shared<std::string>();
        auto inventory_out = std::make_shared<std::string>();
        auto vectors_out = std::make_shared<std::string>();
        auto cfg = std::make_shared<TrainConfig>();
        sub->add_option("--scorer", *scorer, "Full scorer.json")->required()->check(CLI::ExistingFile);
        sub->add_option("--inventory", *inventory, "Full inventory JSON or builtin:hl32q")->required();
        sub->add_option("--vectors", *vectors, "Labeled vectors.jsonl on the full inventory")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("-m,--m", *m_keep, "Number of traits to keep");
        sub->add_option("--name", *name, "Reduced inventory name");
        sub->add_option("--out", *out, "Reduced scorer.json")->required();
        sub->add_option("--inventory-out", *inventory_out, "Reduced inventory JSON")->required();
        sub->add_option("--vectors-out", *vectors_out, "Projected vectors.jsonl");
        add_train_flags(sub, *cfg);
        add_common(sub, c);
        on_run(sub, "reduce", c, [=](RunManifest& m) {
            m.input(*scorer);
            hash_input(m, *inventory);
            m.input(*vectors);
            auto full = load_scorer(*scorer);
            auto inv = load_inventory(*inventory);
            auto sel = select_top_features(full, inv, *m_keep, *name);
            std::vector<LikertVector> projected;
            for (const auto& v : read_records<LikertVector>(*vectors)) {
                validate(v, inv);
                projected.push_back(project(v, sel.indices, *name));
            }
            auto fit = fit_logistic(make_dataset(projected), *cfg);
            write_json(*out, LinearScorer{*name, fit.weights, fit.bias});
            m.output(*out);
            write_json(*inventory_out, sel.inventory);
            m.output(*inventory_out);
            if (!vectors_out->empty()) {
                write_records(*vectors_out, projected);
                m.output(*vectors_out);
            }
            m.note("selected_indices", sel.indices);
            note_fit(m, fit);
            return fs::path(*out);
        });
    }

    // score
    {
        auto* sub = app.add_subcommand("score", "Apply a linear scorer to rating vectors");
        auto scorer = std::make_shared<std::string>();
        auto vectors = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>("scores.jsonl");
        auto quiet = std::make_shared<bool>(false);
        sub->add_option("--scorer", *scorer, "scorer.json or builtin:hl16q")->required();
        sub->add_option("--vectors", *vectors, "vectors.jsonl")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", *out, "scores.jsonl");
        sub->add_flag("--quiet", *quiet, "Do not echo scores to stdout");
        add_common(sub, c);
        on_run(sub, "score", c, [=](RunManifest& m) {
            hash_input(m, *scorer);
            m.input(*vectors);
            auto s = load_scorer(*scorer);
            std::vector<Json> rows;
            for (const auto& v : read_raw_vectors(*vectors)) {
                if (v.inventory && *v.inventory != s.inventory_name)
                    throw ValidationError("vector '" + v.dialogue_id + "' is on inventory '" + *v.inventory +
                                          "' but the scorer expects '" + s.inventory_name + "'");
                if (v.ratings.size() != s.weights.size())
                    throw ValidationError("vector '" + v.dialogue_id + "' has " + std::to_string(v.ratings.size()) +
                                          " ratings, scorer has " + std::to_string(s.weights.size()) + " weights");
                rows.push_back({{"dialogue_id", v.dialogue_id}, {"hl_score", hl_score(v.ratings, s)}});
            }
            write_jsonl(*out, rows);
            m.output(*out);
            if (!*quiet)
                for (const auto& r : rows) std::cout << r.dump() << "\n";
            return fs::path(*out);
        });
    }

    // distributions
    {
        auto* sub = app.add_subcommand("distributions", "Per-statement rating histograms");
        auto vectors = std::make_shared<std::string>();
        auto inventory = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        sub->add_option("--vectors", *vectors, "vectors.jsonl")->required()->check(CLI::ExistingFile);
        sub->add_option("--inventory", *inventory, "Inventory for statement text");
        sub->add_option("--out", *out, "distributions.json")->required();
        add_common(sub, c);
        on_run(sub, "distributions", c, [=](RunManifest& m) {
            m.input(*vectors);
            hash_input(m, *inventory);
            auto rows = read_records<LikertVector>(*vectors);
            std::optional<TraitInventory> inv;
            if (!inventory->empty()) {
                inv = load_inventory(*inventory);
                for (const auto& v : rows) validate(v, *inv);
            }
            write_json(*out, distributions_json(question_distributions(rows), inv ? &*inv : nullptr));
            m.output(*out);
            return fs::path(*out);
        });
    }

    // personas expand | enrich
    {
        auto* personas = app.add_subcommand("personas", "Synthesize personas");
        personas->require_subcommand(1);

        auto* expand = personas->add_subcommand("expand", "Derive related personas from seeds");
        auto seeds = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto n = std::make_shared<int>(4);
        auto fraction = std::make_shared<double>(kDefaultNegativeFraction);
        auto pool = std::make_shared<std::vector<std::string>>(default_negative_traits());
        auto split = std::make_shared<std::string>();
        expand->add_option("--seeds", *seeds, "Seed personas.jsonl")->required()->check(CLI::ExistingFile);
        expand->add_option("--out", *out, "personas.jsonl")->required();
        expand->add_option("-n,--per-seed", *n, "Personas per seed")->check(CLI::PositiveNumber);
        expand->add_option("--negative-fraction", *fraction)->check(CLI::Range(0.0, 1.0));
        expand->add_option("--negative-traits", *pool, "Negative-trait pool")->delimiter(',');
        expand->add_option("--split", *split, "Tag every record")->check(CLI::IsMember({"train", "test", "eval"}));
        add_common(expand, c);
        on_run(expand, "personas expand", c, [=](RunManifest& m) {
            m.input(*seeds);
            auto seed_rows = read_records<Persona>(*seeds);
            auto rng_seed = derive_seed(c.seed, "personas-expand");
            m.seed("expand", rng_seed);
            auto rows = expand_all(seed_rows, *n, *fraction, *pool, rng_seed);
            if (!split->empty())
                for (auto& p : rows) p.split = *split;
            check_split_hygiene(rows);
            write_records(*out, rows);
            m.output(*out);
            return fs::path(*out);
        });

        auto* enrich = personas->add_subcommand("enrich", "Fill biography, condition and visit reason");
        auto in = std::make_shared<std::string>();
        auto eout = std::make_shared<std::string>();
        auto domain = std::make_shared<std::string>("medical visit");
        enrich->add_option("--personas", *in, "personas.jsonl")->required()->check(CLI::ExistingFile);
        enrich->add_option("--out", *eout, "Enriched personas.jsonl")->required();
        enrich->add_option("--domain", *domain, "Scenario the persona is placed in");
        add_common(enrich, c, true);
        on_run(enrich, "personas enrich", c, [=](RunManifest& m) {
            m.input(*in);
            auto backend = make_backend(c);
            auto rows = enrich_all(read_records<Persona>(*in), make_judge(c, backend.get()), *domain);
            write_records(*eout, rows);
            m.output(*eout);
            return fs::path(*eout);
        });
    }

    // pairs generate | build | export
    {
        auto* pairs = app.add_subcommand("pairs", "Build preference pairs");
        pairs->require_subcommand(1);

        auto* gen = pairs->add_subcommand("generate", "Generate candidate dialogues per persona");
        auto personas = std::make_shared<std::string>();
        auto pool_file = std::make_shared<std::string>();
        auto script_file = std::make_shared<std::string>();
        auto opts = std::make_shared<GenerationOptions>();
        auto gout = std::make_shared<std::string>();
        gen->add_option("--personas", *personas, "Enriched personas.jsonl")->required()->check(CLI::ExistingFile);
        gen->add_option("--model-pool", *pool_file, "JSON array of {base_url, model, weight?}")
            ->check(CLI::ExistingFile);
        gen->add_option("--script", *script_file, "JSON array of investigator questions")->check(CLI::ExistingFile);
        gen->add_option("--candidates-per-persona", opts->candidates)->check(CLI::PositiveNumber);
        gen->add_option("--out", *gout, "dialogues.jsonl")->required();
        add_common(gen, c);
        on_run(gen, "pairs generate", c, [=](RunManifest& m) {
            m.input(*personas);
            hash_input(m, *pool_file);
            hash_input(m, *script_file);
            GenerationOptions o = *opts;
            o.parallelism = c.parallelism;
            if (!script_file->empty()) o.script = read_json(*script_file).get<std::vector<std::string>>();

            std::vector<std::unique_ptr<ChatBackend>> backends;
            std::vector<Generator> pool;
            if (c.backend == "mock") {
                backends.push_back(make_backend(c));
                if (pool_file->empty()) {
                    for (const char* name : {"mock-gen-a", "mock-gen-b", "mock-gen-c"})
                        pool.push_back({backends.front().get(), name, 1.0});
                } else {
                    for (const auto& e : read_model_pool(*pool_file))
                        pool.push_back({backends.front().get(), e.model, e.weight});
                }
            } else {
                if (pool_file->empty()) throw ConfigError("--backend http needs --model-pool");
                for (const auto& e : read_model_pool(*pool_file)) {
                    backends.push_back(std::make_unique<HttpBackend>(e.backend));
                    pool.push_back({backends.back().get(), e.model, e.weight});
                }
            }

            std::vector<Json> rows;
            for (const auto& p : read_records<Persona>(*personas)) {
                auto seed = derive_seed(c.seed, "generate:" + p.id);
                for (auto& d : generate_candidates(p, pool, o, seed)) rows.push_back(Json(d));
            }
            write_jsonl(*gout, rows);
            m.output(*gout);
            return fs::path(*gout);
        });

        auto* build = pairs->add_subcommand("build", "Pair candidates whose scores differ enough");
        auto dialogues = std::make_shared<std::string>();
        auto games = std::make_shared<std::string>();
        auto vectors = std::make_shared<std::string>();
        auto scorer = std::make_shared<std::string>();
        auto scores = std::make_shared<std::string>();
        auto bpersonas = std::make_shared<std::string>();
        auto factor = std::make_shared<double>(0.5);
        auto bout = std::make_shared<std::string>();
        auto* d = build->add_option("--dialogues", *dialogues, "Candidate dialogues.jsonl")->check(CLI::ExistingFile);
        auto* g = build->add_option("--games", *games, "Take candidates from both sides of games.jsonl")
                      ->check(CLI::ExistingFile);
        d->excludes(g);
        auto* v = build->add_option("--vectors", *vectors, "vectors.jsonl to score")->check(CLI::ExistingFile);
        auto* s = build->add_option("--scorer", *scorer, "scorer.json or builtin:hl16q");
        auto* sc = build->add_option("--scores", *scores, "Precomputed scores.jsonl")->check(CLI::ExistingFile);
        v->needs(s);
        sc->excludes(v);
        build->add_option("--personas", *bpersonas, "personas.jsonl for prompts")->check(CLI::ExistingFile);
        build->add_option("--threshold-factor", *factor, "Keep pairs with |delta| >= factor * sigma")
            ->check(CLI::NonNegativeNumber);
        build->add_option("--out", *bout, "pairs.jsonl")->required();
        add_common(build, c);
        on_run(build, "pairs build", c, [=](RunManifest& m) {
            if (dialogues->empty() == games->empty()) throw ValidationError("pass exactly one of --dialogues, --games");
            if (vectors->empty() == scores->empty()) throw ValidationError("pass either --vectors with --scorer, or --scores");
            hash_input(m, *dialogues);
            hash_input(m, *games);
            hash_input(m, *vectors);
            hash_input(m, *scorer);
            hash_input(m, *scores);
            hash_input(m, *bpersonas);

            std::vector<Dialogue> candidates;
            if (!dialogues->empty()) {
                candidates = read_records<Dialogue>(*dialogues);
            } else {
                for (auto& game : read_records<TuringGame>(*games)) {
                    candidates.push_back(std::move(game.conversation_a));
                    candidates.push_back(std::move(game.conversation_b));
                }
            }

            std::vector<ScoredDialogue> scored;
            if (!vectors->empty()) {
                auto sc_model = load_scorer(*scorer);
                std::map<std::string, LikertVector> by_id;
                for (auto& vec : read_records<LikertVector>(*vectors)) by_id.emplace(vec.dialogue_id, std::move(vec));
                for (auto& dlg : candidates) {
                    auto it = by_id.find(dlg.id);
                    if (it == by_id.end()) throw ValidationError("dialogue '" + dlg.id + "' has no rating vector");
                    scored.push_back(score_dialogue(std::move(dlg), it->second, sc_model));
                }
            } else {
                auto table = read_scores(*scores);
                for (auto& dlg : candidates) {
                    auto it = table.find(dlg.id);
                    if (it == table.end()) throw ValidationError("dialogue '" + dlg.id + "' has no score");
                    scored.push_back({std::move(dlg), it->second, std::nullopt});
                }
            }

            std::map<std::string, Persona> persona_map;
            if (!bpersonas->empty())
                for (auto& p : read_records<Persona>(*bpersonas)) persona_map.emplace(p.id, std::move(p));

            auto result = build_pairs(scored, *factor, persona_map);
            if (result.warning) std::cerr << "warning: " << *result.warning << "\n";
            write_records(*bout, result.pairs);
            m.output(*bout);
            m.note("sigma", result.sigma);
            m.note("threshold", result.threshold);
            m.note("pairs", result.pairs.size());
            std::cerr << result.pairs.size() << " pairs (sigma " << result.sigma << ", threshold " << result.threshold
                      << ")\n";
            return fs::path(*bout);
        });

        auto* exp = pairs->add_subcommand("export", "Write trainer-ready prompt/chosen/rejected records");
        auto pin = std::make_shared<std::string>();
        auto eout = std::make_shared<std::string>();
        exp->add_option("--pairs", *pin, "pairs.jsonl")->required()->check(CLI::ExistingFile);
        exp->add_option("--out", *eout, "Export JSONL")->required();
        add_common(exp, c);
        on_run(exp, "pairs export", c, [=](RunManifest& m) {
            m.input(*pin);
            export_pairs(read_records<PreferencePair>(*pin), *eout);
            m.output(*eout);
            return fs::path(*eout);
        });
    }

    // arena serve
    {
        auto* arena = app.add_subcommand("arena", "Blind side-by-side evaluation service");
        arena->require_subcommand(1);
        auto* serve = arena->add_subcommand("serve", "Run the arena HTTP service");
        auto config = std::make_shared<std::string>();
        auto port = std::make_shared<int>(-1);
        serve->add_option("--config", *config, "Arena config JSON")->required()->check(CLI::ExistingFile);
        serve->add_option("--port", *port, "Override the configured port (0 = ephemeral)");
        serve->add_option("--seed", c.seed, "Seed for the mock backend");
        on_run(serve, "arena serve", c, [=](RunManifest& m) {
            m.input(*config);
            auto cfg = read_arena_config(*config);
            if (*port >= 0) cfg.port = *port;
            m.input(cfg.personas);

            std::vector<std::unique_ptr<ChatBackend>> backends;
            ChatBackend* mock = nullptr;
            std::vector<ArenaModel> models;
            for (const auto& entry : cfg.models) {
                if (entry.backend) {
                    backends.push_back(std::make_unique<HttpBackend>(*entry.backend));
                    models.push_back({entry.name, backends.back().get(), entry.model});
                } else {
                    if (mock == nullptr) {
                        backends.push_back(std::make_unique<MockBackend>(derive_seed(c.seed, "mock-backend")));
                        mock = backends.back().get();
                    }
                    models.push_back({entry.name, mock, entry.model});
                }
            }
            fs::create_directories(cfg.data_dir);
            ArenaService service(std::move(models), read_records<Persona>(cfg.personas), cfg.data_dir, cfg.options);
            ArenaServer server(service, cfg.static_dir);
            int bound = server.bind(cfg.bind, cfg.port);
            fs::path primary = cfg.data_dir / "serve";
            m.note("port", bound);
            m.finish(primary);  // written at startup; the service runs until interrupted
            std::cout << "listening on http://" << cfg.bind << ":" << bound << std::endl;
            g_server = &server;
            std::signal(SIGINT, handle_signal);
            std::signal(SIGTERM, handle_signal);
            server.listen();
            g_server = nullptr;
            return primary;
        });
    }

    // rate-arena
    {
        auto* sub = app.add_subcommand("rate-arena", "Elo and win-rate from arena comparisons");
        auto comparisons = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto params = std::make_shared<EloParams>();
        auto min_decision = std::make_shared<double>(0.0);
        sub->add_option("--comparisons", *comparisons, "comparisons.jsonl")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", *out, "ratings_report.json")->required();
        sub->add_option("--shuffles", params->shuffles)->check(CLI::PositiveNumber);
        sub->add_option("--k", params->k)->check(CLI::PositiveNumber);
        sub->add_option("--r0", params->initial_rating, "Initial rating");
        sub->add_option("--min-decision-seconds", *min_decision, "Drop votes decided faster than this");
        add_common(sub, c);
        on_run(sub, "rate-arena", c, [=](RunManifest& m) {
            m.input(*comparisons);
            ComparisonFilter filter;
            if (*min_decision > 0) filter.min_decision_seconds = *min_decision;
            auto rows = filter_comparisons(read_records<ComparisonRecord>(*comparisons), filter);
            EloParams p = *params;
            p.seed = derive_seed(c.seed, "rate-arena");
            m.seed("elo-shuffle", p.seed);
            write_json(*out, ratings_report(rows, p));
            m.output(*out);
            return fs::path(*out);
        });
    }

    // ood-test
    {
        auto* sub = app.add_subcommand("ood-test", "One-sided Mann-Whitney U plus bootstrap CI of the mean gap");
        auto a = std::make_shared<std::string>();
        auto b = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        auto n_boot = std::make_shared<int>(10000);
        auto confidence = std::make_shared<double>(0.95);
        sub->add_option("--a", *a, "scores.jsonl expected to score higher")->required()->check(CLI::ExistingFile);
        sub->add_option("--b", *b, "Comparison scores.jsonl")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", *out, "Test result JSON")->required();
        sub->add_option("--n-boot", *n_boot)->check(CLI::PositiveNumber);
        sub->add_option("--confidence", *confidence)->check(CLI::Range(0.0, 1.0));
        add_common(sub, c);
        on_run(sub, "ood-test", c, [=](RunManifest& m) {
            m.input(*a);
            m.input(*b);
            auto xa = score_values(*a);
            auto xb = score_values(*b);
            auto mw = mann_whitney_one_sided(xa, xb);
            auto seed = derive_seed(c.seed, "bootstrap");
            m.seed("bootstrap", seed);
            auto boot = bootstrap_mean_diff(xa, xb, *n_boot, *confidence, seed);
            TestResult r = mw;
            r.ci_low = boot.ci_low;
            r.ci_high = boot.ci_high;
            r.method = mw.method + "+" + boot.method;
            Json j = r;
            j["n_a"] = xa.size();
            j["n_b"] = xb.size();
            j["confidence"] = *confidence;
            write_json(*out, j);
            m.output(*out);
            return fs::path(*out);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::Transport:
            case ErrorKind::Protocol:
            case ErrorKind::MalformedResponse:
                return kExitTransport;
            default:
                return kExitValidation;
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error (validation): " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
