#include "hl/arena/server.hpp"

#include <httplib.h>

#include <cstdlib>

#include "hl/core/jsonl.hpp"

namespace hl {

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, status, Json{{"error", code}, {"message", message}});
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    auto j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError("request body must be a JSON object");
    return j;
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const SessionNotFound& e) {
        send_error(res, 404, "not_found", e.what());
    } catch (const GatingError& e) {
        send_error(res, 409, "gating", e.what());
    } catch (const StateError& e) {
        send_error(res, 409, "state", e.what());
    } catch (const ValidationError& e) {
        send_error(res, 400, "validation", e.what());
    } catch (const nlohmann::json::exception& e) {
        send_error(res, 400, "validation", e.what());
    } catch (const Error& e) {
        const bool upstream = e.kind() == ErrorKind::Transport || e.kind() == ErrorKind::Protocol ||
                              e.kind() == ErrorKind::MalformedResponse;
        send_error(res, upstream ? 502 : 500, to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
    }
}

}  // namespace

ArenaServer::ArenaServer(ArenaService& service, std::string static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
    auto& srv = *server_;
    srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"status", "ok"}}); });

    srv.Post("/sessions", [this](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 201, to_json(service_.create_session())); });
    });

    srv.Post(R"(/sessions/([^/]+)/message)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto body = parse_body(req);
            const auto pane = pane_from_string(body.at("side").get<std::string>());
            const auto text = body.at("text").get<std::string>();
            send_json(res, 200, to_json(service_.post_message(req.matches[1], pane, text)));
        });
    });

    srv.Post(R"(/sessions/([^/]+)/vote)", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            auto body = parse_body(req);
            const auto choice = vote_choice_from_string(body.at("choice").get<std::string>());
            send_json(res, 200, to_json(service_.cast_vote(req.matches[1], choice)));
        });
    });

    srv.Get("/comparisons", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            ComparisonFilter f;
            if (req.has_param("min_decision_seconds")) {
                const auto v = req.get_param_value("min_decision_seconds");
                if (!v.empty()) {
                    char* end = nullptr;
                    const double d = std::strtod(v.c_str(), &end);
                    if (end == v.c_str() || *end != '\0') throw ValidationError("min_decision_seconds must be a number");
                    f.min_decision_seconds = d;
                }
            }
            if (req.has_param("model") && !req.get_param_value("model").empty()) f.model = req.get_param_value("model");
            if (req.has_param("since") && !req.get_param_value("since").empty())
                f.since_ms = parse_utc_ms(req.get_param_value("since"));
            if (req.has_param("until") && !req.get_param_value("until").empty())
                f.until_ms = parse_utc_ms(req.get_param_value("until"));
            Json out = Json::array();
            for (const auto& r : service_.list_comparisons(f)) out.push_back(r);
            send_json(res, 200, Json{{"comparisons", out}});
        });
    });

    if (!static_dir.empty()) srv.set_mount_point("/", static_dir);
}

ArenaServer::~ArenaServer() = default;

int ArenaServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound < 0) throw IoError("cannot bind to " + host);
        return bound;
    }
    if (!server_->bind_to_port(host, port)) throw IoError("cannot bind to " + host + ":" + std::to_string(port));
    return port;
}

void ArenaServer::listen() { server_->listen_after_bind(); }

void ArenaServer::stop() { server_->stop(); }

ArenaConfig read_arena_config(const std::filesystem::path& path) {
    const auto j = read_json(path);
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    ArenaConfig cfg;
    try {
        cfg.bind = j.value("bind", cfg.bind);
        cfg.port = j.value("port", cfg.port);
        cfg.personas = resolve(j.at("personas").get<std::string>());
        cfg.data_dir = resolve(j.value("data_dir", std::string("arena-data")));
        if (j.contains("static_dir")) cfg.static_dir = resolve(j["static_dir"].get<std::string>()).string();
        cfg.options.min_turns = j.value("min_turns", cfg.options.min_turns);
        if (j.contains("expiry_minutes")) cfg.options.expiry_ms = j["expiry_minutes"].get<std::int64_t>() * 60 * 1000;
        if (j.contains("seed")) cfg.options.seed = j["seed"].get<std::uint64_t>();
        for (const auto& m : j.at("models")) {
            ArenaConfig::Model model;
            model.name = m.at("name").get<std::string>();
            model.model = m.value("model", model.name);
            if (m.contains("base_url")) model.backend = backend_config_from_json(m);
            cfg.models.push_back(std::move(model));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    if (cfg.models.size() < 2) throw ConfigError(path.string() + ": at least two models are required");
    return cfg;
}

}  // namespace hl
