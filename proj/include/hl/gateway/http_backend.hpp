#pragma once

#include <functional>

#include "hl/gateway/backend.hpp"

namespace hl {

struct ParsedUrl {
    std::string scheme_host_port;  // e.g. "http://localhost:8080"
    std::string path_prefix;       // e.g. "/v1", never ending in '/'
};

ParsedUrl parse_base_url(const std::string& url);

// Client for the chat-completions wire protocol:
//   POST {base}/chat/completions  and  POST {base}/embeddings
// Retries transport failures and 408/429/5xx with exponential backoff.
class HttpBackend final : public ChatBackend {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    // Throws ConfigError if api_key_env names an unset variable.
    explicit HttpBackend(BackendConfig cfg, Sleeper sleeper = {});

    std::string chat(const ChatRequest& req) override;
    std::vector<std::vector<double>> embed(const std::string& model, const std::vector<std::string>& texts) override;

    const BackendConfig& config() const { return cfg_; }

private:
    Json post(const std::string& path, const Json& body);

    BackendConfig cfg_;
    ParsedUrl url_;
    std::string api_key_;
    Sleeper sleep_;
};

}  // namespace hl
