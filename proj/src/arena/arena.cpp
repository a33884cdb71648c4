#include "hl/arena/arena.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>

#include "hl/core/jsonl.hpp"
#include "hl/gateway/tasks.hpp"

namespace hl {

const char* to_string(Pane p) noexcept { return p == Pane::Left ? "left" : "right"; }

const char* to_string(SessionState s) noexcept {
    switch (s) {
        case SessionState::Active: return "active";
        case SessionState::Voted: return "voted";
        case SessionState::Expired: return "expired";
    }
    return "active";
}

const char* to_string(VoteChoice c) noexcept {
    switch (c) {
        case VoteChoice::CertainlyA: return "CertainlyA";
        case VoteChoice::LikelyA: return "LikelyA";
        case VoteChoice::Tie: return "Tie";
        case VoteChoice::LikelyB: return "LikelyB";
        case VoteChoice::CertainlyB: return "CertainlyB";
    }
    return "Tie";
}

Pane pane_from_string(const std::string& s) {
    if (s == "left" || s == "A") return Pane::Left;
    if (s == "right" || s == "B") return Pane::Right;
    throw ValidationError("side must be \"left\" or \"right\", got '" + s + "'");
}

SessionState session_state_from_string(const std::string& s) {
    if (s == "active") return SessionState::Active;
    if (s == "voted") return SessionState::Voted;
    if (s == "expired") return SessionState::Expired;
    throw ValidationError("unknown session state '" + s + "'");
}

VoteChoice vote_choice_from_string(const std::string& s) {
    std::string key;
    for (char c : s)
        if (c != ' ' && c != '_' && c != '-') key.push_back(c);
    if (key == "CertainlyA") return VoteChoice::CertainlyA;
    if (key == "LikelyA") return VoteChoice::LikelyA;
    if (key == "Tie") return VoteChoice::Tie;
    if (key == "LikelyB") return VoteChoice::LikelyB;
    if (key == "CertainlyB") return VoteChoice::CertainlyB;
    throw ValidationError("unknown vote choice '" + s + "'");
}

double score_for_pane_a(VoteChoice c) noexcept {
    switch (c) {
        case VoteChoice::CertainlyA: return 1.0;
        case VoteChoice::LikelyA: return 0.75;
        case VoteChoice::Tie: return 0.5;
        case VoteChoice::LikelyB: return 0.25;
        case VoteChoice::CertainlyB: return 0.0;
    }
    return 0.5;
}

void to_json(Json& j, const Session& s) {
    j = Json{{"id", s.id},
             {"persona_id", s.persona_id},
             {"left_model", s.left_model},
             {"right_model", s.right_model},
             {"transcript_left", s.transcript_left},
             {"transcript_right", s.transcript_right},
             {"state", to_string(s.state)},
             {"created_at_ms", s.created_at_ms},
             {"last_active_ms", s.last_active_ms},
             {"min_turns", s.min_turns}};
}

void from_json(const Json& j, Session& s) {
    s.id = j.at("id").get<std::string>();
    s.persona_id = j.at("persona_id").get<std::string>();
    s.left_model = j.at("left_model").get<std::string>();
    s.right_model = j.at("right_model").get<std::string>();
    s.transcript_left = j.at("transcript_left").get<Dialogue>();
    s.transcript_right = j.at("transcript_right").get<Dialogue>();
    s.state = session_state_from_string(j.at("state").get<std::string>());
    s.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
    s.last_active_ms = j.at("last_active_ms").get<std::int64_t>();
    s.min_turns = j.at("min_turns").get<int>();
}

Json to_json(const SessionView& v) {
    return Json{{"session_id", v.session_id},
                {"persona_brief", v.persona_brief},
                {"panes", {"A", "B"}},
                {"min_turns", v.min_turns}};
}

Json to_json(const MessageReply& r) {
    return Json{{"side", to_string(r.pane)}, {"reply", r.reply}, {"user_turns", r.user_turns}};
}

Json to_json(const VoteOutcome& o) {
    return Json{{"record", o.record}, {"assignment", {{"A", o.model_left}, {"B", o.model_right}}}};
}

std::int64_t ArenaService::system_now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

ArenaService::ArenaService(std::vector<ArenaModel> models, std::vector<Persona> personas,
                           std::filesystem::path data_dir, ArenaOptions options, Clock clock)
    : models_(std::move(models)),
      data_dir_(std::move(data_dir)),
      options_(options),
      clock_(clock ? std::move(clock) : Clock(&ArenaService::system_now_ms)),
      rng_(options.seed ? *options.seed : std::random_device{}() ^ (std::uint64_t{std::random_device{}()} << 32)) {
    if (models_.size() < 2) throw ConfigError("the arena needs at least two models");
    for (std::size_t i = 0; i < models_.size(); ++i) {
        if (models_[i].backend == nullptr) throw ConfigError("arena model '" + models_[i].name + "' has no backend");
        for (std::size_t k = 0; k < i; ++k)
            if (models_[k].name == models_[i].name) throw ConfigError("duplicate arena model '" + models_[i].name + "'");
    }
    if (personas.empty()) throw ConfigError("the arena needs at least one persona");
    if (options_.min_turns < 0) throw ConfigError("min_turns must be non-negative");
    for (auto& p : personas) {
        persona_ids_.push_back(p.id);
        personas_.emplace(p.id, std::move(p));
    }

    std::filesystem::create_directories(data_dir_);
    const auto log_path = data_dir_ / "comparisons.jsonl";
    if (std::filesystem::exists(log_path)) comparisons_ = read_records<ComparisonRecord>(log_path);
    const auto snap_path = data_dir_ / "sessions.json";
    if (std::filesystem::exists(snap_path)) {
        const auto snapshot = read_json(snap_path);
        for (const auto& j : snapshot.at("sessions")) {
            auto slot = std::make_shared<Slot>();
            slot->session = j.get<Session>();
            snapshot_cache_[slot->session.id] = j;
            sessions_.emplace(slot->session.id, std::move(slot));
        }
    }
}

std::vector<std::string> ArenaService::model_names() const {
    std::vector<std::string> names;
    for (const auto& m : models_) names.push_back(m.name);
    return names;
}

std::shared_ptr<ArenaService::Slot> ArenaService::find(const std::string& id) const {
    std::shared_lock lock(sessions_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionNotFound(id);
    return it->second;
}

void ArenaService::refresh_expiry(Session& s, std::int64_t now) const {
    if (s.state == SessionState::Active && now - s.last_active_ms > options_.expiry_ms) s.state = SessionState::Expired;
}

std::string ArenaService::persona_brief(const Persona& p) const {
    std::ostringstream os;
    os << "You are the doctor. Chat with both patients below (A on the left, B on the right) for at least "
       << options_.min_turns << " turns each, then decide which one feels more human. The patient is a " << p.age
       << "-year-old " << p.gender << '.';
    if (p.reason_for_visit) os << " Reason for visit: " << *p.reason_for_visit;
    return os.str();
}

SessionView ArenaService::create_session() {
    Session s;
    {
        std::lock_guard lock(rng_mutex_);
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_.next_u64()));
        s.id = buf;
        const auto left = rng_.below(models_.size());
        auto right = rng_.below(models_.size() - 1);
        if (right >= left) ++right;
        s.left_model = models_[left].name;
        s.right_model = models_[right].name;
        s.persona_id = persona_ids_[rng_.below(persona_ids_.size())];
    }
    s.transcript_left.id = s.id + "-left";
    s.transcript_right.id = s.id + "-right";
    s.transcript_left.persona_id = s.transcript_right.persona_id = s.persona_id;
    s.created_at_ms = s.last_active_ms = clock_();
    s.min_turns = options_.min_turns;

    SessionView view{s.id, persona_brief(personas_.at(s.persona_id)), s.min_turns};
    snapshot_session(s);
    {
        std::unique_lock lock(sessions_mutex_);
        auto slot = std::make_shared<Slot>();
        slot->session = std::move(s);
        sessions_.emplace(view.session_id, std::move(slot));
    }
    return view;
}

MessageReply ArenaService::post_message(const std::string& session_id, Pane pane, const std::string& text) {
    if (trim(text).empty()) throw ValidationError("message text is empty");
    auto slot = find(session_id);
    MessageReply out;
    {
        std::lock_guard lock(slot->mutex);
        auto& s = slot->session;
        refresh_expiry(s, clock_());
        if (s.state != SessionState::Active)
            throw StateError("session '" + s.id + "' is " + to_string(s.state) + " and accepts no messages");
        const auto& name = pane == Pane::Left ? s.left_model : s.right_model;
        const ArenaModel* model = nullptr;
        for (const auto& m : models_)
            if (m.name == name) model = &m;
        if (model == nullptr) throw ConfigError("session model '" + name + "' is no longer configured");

        const Persona& persona = personas_.at(s.persona_id);
        ChatRequest req;
        req.model = model->model;
        req.temperature = options_.reply_temperature;
        req.max_tokens = 512;
        req.task = std::string(task::kDialogueTurn);
        req.messages.push_back({Role::System, persona_system_prompt(persona)});
        for (const auto& t : s.transcript(pane).turns)
            req.messages.push_back({t.speaker == Speaker::Investigator ? Role::User : Role::Assistant, t.text});
        req.messages.push_back({Role::User, text});
        std::string reply;
        try {
            reply = trim(model->backend->chat(req));
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(to_string(pane)) + " pane: " + e.what());
        }
        if (reply.empty()) throw MalformedResponseError(std::string(to_string(pane)) + " pane: empty model reply");

        auto& transcript = s.transcript(pane);
        transcript.add_turn(Speaker::Investigator, text);
        transcript.add_turn(Speaker::Witness, reply);
        s.last_active_ms = clock_();
        out = MessageReply{pane, reply, s.user_turns(pane)};
        snapshot_session(s);
    }
    return out;
}

VoteOutcome ArenaService::cast_vote(const std::string& session_id, VoteChoice choice) {
    auto slot = find(session_id);
    VoteOutcome out;
    {
        std::lock_guard lock(slot->mutex);
        auto& s = slot->session;
        const auto now = clock_();
        refresh_expiry(s, now);
        if (s.state != SessionState::Active)
            throw StateError("session '" + s.id + "' is " + to_string(s.state) + " and cannot be voted on");
        for (Pane p : {Pane::Left, Pane::Right}) {
            if (s.user_turns(p) < static_cast<std::size_t>(s.min_turns))
                throw GatingError(std::string(to_string(p)) + " pane has " + std::to_string(s.user_turns(p)) +
                                  " turns; at least " + std::to_string(s.min_turns) + " are required before voting");
        }
        ComparisonRecord r;
        r.session_id = s.id;
        r.model_a = s.left_model;
        r.model_b = s.right_model;
        r.s_a = score_for_pane_a(choice);
        r.decided_at_ms = now;
        r.decision_seconds = static_cast<double>(now - s.created_at_ms) / 1000.0;
        append_comparison(r);
        s.state = SessionState::Voted;
        s.last_active_ms = now;
        out = VoteOutcome{r, s.left_model, s.right_model};
        snapshot_session(s);
    }
    return out;
}

std::vector<ComparisonRecord> ArenaService::list_comparisons(const ComparisonFilter& filter) const {
    std::lock_guard lock(log_mutex_);
    return filter_comparisons(comparisons_, filter);
}

Session ArenaService::session(const std::string& session_id) const {
    auto slot = find(session_id);
    std::lock_guard lock(slot->mutex);
    return slot->session;
}

void ArenaService::append_comparison(const ComparisonRecord& r) {
    std::lock_guard lock(log_mutex_);
    const auto path = data_dir_ / "comparisons.jsonl";
    const std::string line = Json(r).dump() + "\n";
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw IoError("cannot open " + path.string());
    const auto written = ::write(fd, line.data(), line.size());
    const bool ok = written == static_cast<ssize_t>(line.size()) && ::fsync(fd) == 0;
    ::close(fd);
    if (!ok) throw IoError("failed to append to " + path.string());
    comparisons_.push_back(r);
}

void ArenaService::snapshot_session(const Session& session) {
    std::lock_guard snap(snapshot_mutex_);
    snapshot_cache_[session.id] = session;
    Json all = Json::array();
    for (const auto& [id, j] : snapshot_cache_) all.push_back(j);
    write_json(data_dir_ / "sessions.json", Json{{"sessions", all}});
}

}  // namespace hl
