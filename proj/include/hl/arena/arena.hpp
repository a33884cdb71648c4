#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "hl/core/model.hpp"
#include "hl/error.hpp"
#include "hl/gateway/backend.hpp"
#include "hl/persona/persona.hpp"
#include "hl/random.hpp"
#include "hl/ratings/comparison.hpp"

namespace hl {

struct SessionNotFound : StateError {
    explicit SessionNotFound(const std::string& id) : StateError("unknown session '" + id + "'") {}
};

// Vote attempted before both panes reached the required number of turns.
struct GatingError : StateError {
    using StateError::StateError;
};

enum class Pane { Left, Right };
enum class SessionState { Active, Voted, Expired };
enum class VoteChoice { CertainlyA, LikelyA, Tie, LikelyB, CertainlyB };

const char* to_string(Pane p) noexcept;
const char* to_string(SessionState s) noexcept;
const char* to_string(VoteChoice c) noexcept;
Pane pane_from_string(const std::string& s);
SessionState session_state_from_string(const std::string& s);
VoteChoice vote_choice_from_string(const std::string& s);

// Score for pane A (always the left pane).
double score_for_pane_a(VoteChoice c) noexcept;

struct ArenaModel {
    std::string name;  // identity recorded in comparisons
    ChatBackend* backend = nullptr;
    std::string model;  // model id sent to the backend
};

struct Session {
    std::string id;
    std::string persona_id;
    std::string left_model;
    std::string right_model;
    Dialogue transcript_left;
    Dialogue transcript_right;
    SessionState state = SessionState::Active;
    std::int64_t created_at_ms = 0;
    std::int64_t last_active_ms = 0;
    int min_turns = 2;

    const Dialogue& transcript(Pane p) const { return p == Pane::Left ? transcript_left : transcript_right; }
    Dialogue& transcript(Pane p) { return p == Pane::Left ? transcript_left : transcript_right; }
    std::size_t user_turns(Pane p) const { return transcript(p).count(Speaker::Investigator); }
};

void to_json(Json& j, const Session& s);
void from_json(const Json& j, Session& s);

struct ArenaOptions {
    int min_turns = 2;
    std::int64_t expiry_ms = 60LL * 60 * 1000;
    // When set, session ids and assignments come from a seeded stream (test mode).
    std::optional<std::uint64_t> seed;
    double reply_temperature = kGenerationTemperature;
};

// Client-visible session data before voting. Never contains model identities.
struct SessionView {
    std::string session_id;
    std::string persona_brief;
    int min_turns = 2;
};

struct MessageReply {
    Pane pane = Pane::Left;
    std::string reply;
    std::size_t user_turns = 0;
};

struct VoteOutcome {
    ComparisonRecord record;
    std::string model_left;
    std::string model_right;
};

Json to_json(const SessionView& v);
Json to_json(const MessageReply& r);
Json to_json(const VoteOutcome& o);

// Blind side-by-side chat sessions with 5-point votes. Per-session operations
// are serialized; distinct sessions proceed concurrently. Committed votes are
// appended to <data_dir>/comparisons.jsonl and sessions are snapshotted to
// <data_dir>/sessions.json, both reloaded on construction.
class ArenaService {
public:
    using Clock = std::function<std::int64_t()>;  // Unix epoch ms

    ArenaService(std::vector<ArenaModel> models, std::vector<Persona> personas, std::filesystem::path data_dir,
                 ArenaOptions options = {}, Clock clock = {});

    SessionView create_session();
    MessageReply post_message(const std::string& session_id, Pane pane, const std::string& text);
    VoteOutcome cast_vote(const std::string& session_id, VoteChoice choice);
    std::vector<ComparisonRecord> list_comparisons(const ComparisonFilter& filter = {}) const;

    // Server-side view including hidden assignments; for tests and admin tools.
    Session session(const std::string& session_id) const;
    std::vector<std::string> model_names() const;

    static std::int64_t system_now_ms();

private:
    struct Slot {
        std::mutex mutex;
        Session session;
    };

    std::shared_ptr<Slot> find(const std::string& id) const;
    void refresh_expiry(Session& s, std::int64_t now) const;
    // Caller holds the session's mutex.
    void snapshot_session(const Session& session);
    void append_comparison(const ComparisonRecord& r);
    std::string persona_brief(const Persona& p) const;

    std::vector<ArenaModel> models_;
    std::map<std::string, Persona> personas_;
    std::vector<std::string> persona_ids_;
    std::filesystem::path data_dir_;
    ArenaOptions options_;
    Clock clock_;

    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;

    std::mutex rng_mutex_;
    Rng rng_;

    std::mutex snapshot_mutex_;
    std::map<std::string, Json> snapshot_cache_;

    mutable std::mutex log_mutex_;
    std::vector<ComparisonRecord> comparisons_;
};

}  // namespace hl
