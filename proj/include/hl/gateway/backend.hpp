#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hl/core/model.hpp"

namespace hl {

enum class Role { System, User, Assistant };
enum class ReasoningEffort { Low, Medium, High };

const char* to_string(Role r) noexcept;
const char* to_string(ReasoningEffort e) noexcept;
ReasoningEffort reasoning_effort_from_string(const std::string& s);

struct Message {
    Role role = Role::User;
    std::string content;
};

inline constexpr double kJudgeTemperature = 0.0;
inline constexpr double kGenerationTemperature = 1.0;

struct ChatRequest {
    std::string model;
    std::vector<Message> messages;
    double temperature = kJudgeTemperature;
    int max_tokens = 1024;
    std::optional<ReasoningEffort> reasoning_effort;
    // Local routing hint (see tasks.hpp). Never sent over the wire.
    std::string task;
};

void validate(const ChatRequest& req);

// Chat-completions request body.
Json to_wire(const ChatRequest& req);

struct BackendConfig {
    std::string base_url;
    // Environment variable holding the bearer token; empty means no auth header.
    std::string api_key_env;
    std::chrono::milliseconds timeout{120000};
    int max_retries = 3;
    std::chrono::milliseconds backoff_base{500};
};

inline constexpr int kMaxRetriesLimit = 10;

void validate(const BackendConfig& cfg);
BackendConfig backend_config_from_json(const Json& j);

// Delay before retry number `retry` (1-based): backoff_base * 2^(retry-1).
std::chrono::milliseconds backoff_delay(const BackendConfig& cfg, int retry);

// A chat-completion + embedding endpoint. Implementations must be safe for
// concurrent use.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string chat(const ChatRequest& req) = 0;
    // One L2-normalized vector per text, order preserved.
    virtual std::vector<std::vector<double>> embed(const std::string& model, const std::vector<std::string>& texts) = 0;
};

// Scales v to unit L2 norm in place. Throws MalformedResponseError for zero or
// non-finite vectors.
void normalize(std::vector<double>& v);

// Enforces the shared embedding post-conditions: count matches, equal
// dimensions, unit norm.
void check_embeddings(std::vector<std::vector<double>>& vectors, std::size_t expected);

// A judge is a backend plus the model and knobs used for a role.
struct Judge {
    ChatBackend* backend = nullptr;
    std::string model;
    std::optional<ReasoningEffort> reasoning_effort;
    double temperature = kJudgeTemperature;
    int max_tokens = 2048;
    std::size_t parallelism = 8;
};

}  // namespace hl
