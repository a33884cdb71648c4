#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <random>
#include <string>

#include "hl/core/model.hpp"

namespace hl::test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                ("hltest-" + std::to_string(stamp) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline Dialogue make_dialogue(const std::string& id, std::initializer_list<std::pair<Speaker, std::string>> turns) {
    Dialogue d;
    d.id = id;
    for (const auto& [s, t] : turns) d.add_turn(s, t);
    return d;
}

inline std::string words(std::size_t n, const std::string& w = "word") {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += (i ? " " : "") + w;
    return out;
}

}  // namespace hl::test
