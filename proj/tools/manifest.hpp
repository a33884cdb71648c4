#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hl/core/model.hpp"

namespace hl::cli {

// One manifest per run, written next to the primary output. Input hashes are
// taken before any processing; output hashes let downstream runs chain.
class RunManifest {
public:
    explicit RunManifest(std::string command);

    void param(const std::string& key, const std::string& value) { params_[key] = value; }
    void seed(const std::string& purpose, std::uint64_t value) { seeds_[purpose] = value; }
    void input(const std::filesystem::path& path);
    void output(const std::filesystem::path& path);
    void note(const std::string& key, Json value) { notes_[key] = std::move(value); }

    // Writes <primary>.manifest.json.
    void finish(const std::filesystem::path& primary_output);

private:
    std::string command_;
    std::map<std::string, std::string> params_;
    std::map<std::string, std::uint64_t> seeds_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::filesystem::path> outputs_;
    Json notes_ = Json::object();
    std::string started_at_;
};

// UTC timestamp; honours SOURCE_DATE_EPOCH for reproducible builds and tests.
std::string timestamp_now();

}  // namespace hl::cli
