#include "manifest.hpp"

#include <chrono>
#include <cstdlib>

#include "hl/core/jsonl.hpp"
#include "hl/digest.hpp"
#include "hl/ratings/comparison.hpp"

namespace hl::cli {

std::string timestamp_now() {
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch != nullptr && *epoch != '\0')
        return format_utc_ms(std::stoll(epoch) * 1000);
    using namespace std::chrono;
    return format_utc_ms(duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count());
}

RunManifest::RunManifest(std::string command) : command_(std::move(command)), started_at_(timestamp_now()) {}

void RunManifest::input(const std::filesystem::path& path) { inputs_[path.generic_string()] = sha256_file(path); }

void RunManifest::output(const std::filesystem::path& path) { outputs_.push_back(path); }

void RunManifest::finish(const std::filesystem::path& primary_output) {
    Json j;
    j["command"] = command_;
    j["params"] = params_;
    j["seeds"] = seeds_;
    j["input_hashes"] = inputs_;
    Json outs = Json::object();
    for (const auto& p : outputs_) outs[p.generic_string()] = sha256_file(p);
    j["output_hashes"] = outs;
    if (!notes_.empty()) j["notes"] = notes_;
    j["started_at"] = started_at_;
    j["finished_at"] = timestamp_now();
    auto path = primary_output;
    path += ".manifest.json";
    write_json(path, j);
}

}  // namespace hl::cli
