#include "hl/gateway/http_backend.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "hl/error.hpp"

namespace hl {

ParsedUrl parse_base_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base_url must include a scheme: " + url);
    auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported scheme in base_url: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    out.scheme_host_port = url.substr(0, path_start);
    if (path_start != std::string::npos) out.path_prefix = url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    if (out.scheme_host_port.size() <= scheme_end + 3) throw ConfigError("base_url has no host: " + url);
    return out;
}

namespace {

bool retryable_status(int status) { return status == 408 || status == 429 || (status >= 500 && status <= 599); }

}  // namespace

HttpBackend::HttpBackend(BackendConfig cfg, Sleeper sleeper)
    : cfg_(std::move(cfg)), url_(parse_base_url(cfg_.base_url)), sleep_(std::move(sleeper)) {
    validate(cfg_);
    if (!cfg_.api_key_env.empty()) {
        const char* key = std::getenv(cfg_.api_key_env.c_str());
        if (key == nullptr) throw ConfigError("environment variable " + cfg_.api_key_env + " is not set");
        api_key_ = key;
    }
    if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Json HttpBackend::post(const std::string& path, const Json& body) {
    httplib::Client client(url_.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const std::string full_path = url_.path_prefix + path;
    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) sleep_(backoff_delay(cfg_, attempt));
        auto res = client.Post(full_path, headers, payload, "application/json");
        if (!res) {
            last_error = "request to " + url_.scheme_host_port + full_path + " failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) {
            try {
                return Json::parse(res->body);
            } catch (const nlohmann::json::parse_error& e) {
                throw MalformedResponseError("response body is not JSON: " + std::string(e.what()));
            }
        }
        if (!retryable_status(res->status))
            throw ProtocolError("HTTP " + std::to_string(res->status) + " from " + full_path + ": " + res->body,
                                res->status);
        last_error = "HTTP " + std::to_string(res->status) + " from " + full_path;
    }
    throw TransportError(last_error + " (after " + std::to_string(cfg_.max_retries + 1) + " attempts)");
}

std::string HttpBackend::chat(const ChatRequest& req) {
    validate(req);
    auto res = post("/chat/completions", to_wire(req));
    if (!res.contains("choices") || !res["choices"].is_array() || res["choices"].empty())
        throw MalformedResponseError("chat response has no choices");
    const auto& msg = res["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") || !msg["message"]["content"].is_string())
        throw MalformedResponseError("chat response choice has no message content");
    return msg["message"]["content"].get<std::string>();
}

std::vector<std::vector<double>> HttpBackend::embed(const std::string& model, const std::vector<std::string>& texts) {
    if (texts.empty()) throw ValidationError("embed called with no texts");
    auto res = post("/embeddings", Json{{"model", model}, {"input", texts}});
    if (!res.contains("data") || !res["data"].is_array()) throw MalformedResponseError("embedding response has no data");
    std::vector<std::pair<std::size_t, std::vector<double>>> rows;
    std::size_t pos = 0;
    for (const auto& item : res["data"]) {
        if (!item.contains("embedding") || !item["embedding"].is_array())
            throw MalformedResponseError("embedding item has no embedding array");
        std::size_t index = item.contains("index") ? item["index"].get<std::size_t>() : pos;
        rows.emplace_back(index, item["embedding"].get<std::vector<double>>());
        ++pos;
    }
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (auto& r : rows) out.push_back(std::move(r.second));
    check_embeddings(out, texts.size());
    return out;
}

}  // namespace hl
