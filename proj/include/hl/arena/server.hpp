#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "hl/arena/arena.hpp"

namespace httplib {
class Server;
}

namespace hl {

// HTTP front end for ArenaService:
//   POST /sessions
//   POST /sessions/{id}/message   {side: "left"|"right", text}
//   POST /sessions/{id}/vote      {choice}
//   GET  /comparisons?min_decision_seconds=&model=&since=&until=
//   GET  /healthz
class ArenaServer {
public:
    explicit ArenaServer(ArenaService& service, std::string static_dir = {});
    ~ArenaServer();

    // Binds; returns the bound port (pass 0 for an ephemeral port).
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    void listen();
    void stop();

private:
    ArenaService& service_;
    std::unique_ptr<httplib::Server> server_;
};

struct ArenaConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::filesystem::path personas;
    std::filesystem::path data_dir = "arena-data";
    std::string static_dir;
    ArenaOptions options;
    struct Model {
        std::string name;
        std::string model;
        std::optional<BackendConfig> backend;  // absent => mock backend
    };
    std::vector<Model> models;
};

// Relative paths in the file are resolved against the config file's directory.
ArenaConfig read_arena_config(const std::filesystem::path& path);

}  // namespace hl
