#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hl/core/model.hpp"
#include "hl/error.hpp"

namespace hl {

// Reads one JSON value per non-blank line. Parse errors name file and line.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

// Reads and converts each line; conversion/validation failures are rethrown as
// ValidationError prefixed with "<file>:<line>: ".
template <typename T>
std::vector<T> read_records(const std::filesystem::path& path) {
    std::vector<T> out;
    std::size_t line = 0;
    for (const auto& j : read_jsonl(path)) {
        ++line;
        try {
            out.push_back(j.get<T>());
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

// Writes records one per line with compact serialization.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records);

template <typename T>
void write_records(const std::filesystem::path& path, const std::vector<T>& records) {
    std::vector<Json> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(Json(r));
    write_jsonl(path, rows);
}

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& value);

// Writes via a temporary sibling and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

template <typename T>
T read_object(const std::filesystem::path& path) {
    try {
        return read_json(path).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace hl
