#include "hl/gateway/backend.hpp"

#include <cmath>

#include "hl/error.hpp"

namespace hl {

const char* to_string(Role r) noexcept {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

const char* to_string(ReasoningEffort e) noexcept {
    switch (e) {
        case ReasoningEffort::Low: return "low";
        case ReasoningEffort::Medium: return "medium";
        case ReasoningEffort::High: return "high";
    }
    return "medium";
}

ReasoningEffort reasoning_effort_from_string(const std::string& s) {
    if (s == "low") return ReasoningEffort::Low;
    if (s == "medium") return ReasoningEffort::Medium;
    if (s == "high") return ReasoningEffort::High;
    throw ConfigError("reasoning_effort must be low|medium|high, got '" + s + "'");
}

void validate(const ChatRequest& req) {
    if (req.model.empty()) throw ValidationError("chat request has no model");
    if (req.messages.empty()) throw ValidationError("chat request has no messages");
    if (req.messages.front().role == Role::Assistant)
        throw ValidationError("first chat message must be system or user");
    if (!(req.temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
    if (req.max_tokens <= 0) throw ValidationError("max_tokens must be positive");
}

Json to_wire(const ChatRequest& req) {
    Json body;
    body["model"] = req.model;
    body["messages"] = Json::array();
    for (const auto& m : req.messages) body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
    body["temperature"] = req.temperature;
    body["max_tokens"] = req.max_tokens;
    if (req.reasoning_effort) body["reasoning_effort"] = to_string(*req.reasoning_effort);
    return body;
}

void validate(const BackendConfig& cfg) {
    if (cfg.base_url.empty()) throw ConfigError("backend base_url is empty");
    if (cfg.timeout.count() <= 0) throw ConfigError("backend timeout must be positive");
    if (cfg.max_retries < 0 || cfg.max_retries > kMaxRetriesLimit)
        throw ConfigError("max_retries must be in [0, " + std::to_string(kMaxRetriesLimit) + "]");
    if (cfg.backoff_base.count() < 0) throw ConfigError("backoff_base must be non-negative");
}

BackendConfig backend_config_from_json(const Json& j) {
    BackendConfig cfg;
    cfg.base_url = j.at("base_url").get<std::string>();
    cfg.api_key_env = j.value("api_key_env", std::string{});
    if (j.contains("timeout_ms")) cfg.timeout = std::chrono::milliseconds(j["timeout_ms"].get<long long>());
    if (j.contains("max_retries")) cfg.max_retries = j["max_retries"].get<int>();
    if (j.contains("backoff_base_ms"))
        cfg.backoff_base = std::chrono::milliseconds(j["backoff_base_ms"].get<long long>());
    validate(cfg);
    return cfg;
}

std::chrono::milliseconds backoff_delay(const BackendConfig& cfg, int retry) {
    if (retry < 1) return std::chrono::milliseconds(0);
    return cfg.backoff_base * (1LL << std::min(retry - 1, 20));
}

void normalize(std::vector<double>& v) {
    double ss = 0.0;
    for (double x : v) ss += x * x;
    const double norm = std::sqrt(ss);
    if (!std::isfinite(norm) || norm == 0.0) throw MalformedResponseError("embedding has zero or non-finite norm");
    for (double& x : v) x /= norm;
}

void check_embeddings(std::vector<std::vector<double>>& vectors, std::size_t expected) {
    if (vectors.size() != expected)
        throw MalformedResponseError("expected " + std::to_string(expected) + " embeddings, got " +
                                     std::to_string(vectors.size()));
    for (auto& v : vectors) {
        if (v.empty() || v.size() != vectors.front().size())
            throw MalformedResponseError("embedding dimensions differ within batch");
        normalize(v);
    }
}

}  // namespace hl
