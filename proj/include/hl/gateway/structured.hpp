#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hl/gateway/backend.hpp"

namespace hl {

enum class FieldType { String, Integer, Number, StringArray, IntegerArray, Object };

struct FieldShape {
    std::string name;
    FieldType type = FieldType::String;
    bool required = true;
    std::vector<std::string> one_of;  // allowed values for String
    std::optional<long long> min_value, max_value;  // Integer / IntegerArray elements
    std::optional<std::size_t> min_items, max_items;  // arrays
    bool non_empty = true;  // strings (and array string elements) must be non-blank
};

// Expected shape of a judge's JSON object.
struct Shape {
    std::vector<FieldShape> fields;
};

// First well-formed JSON object or array inside raw, skipping prose and fences.
std::optional<Json> extract_json(std::string_view raw);

// Extracts and validates. Throws ParseError if nothing parses and
// ValidationError naming the offending field otherwise.
Json parse_structured(std::string_view raw, const Shape& shape);

void validate_shape(const Json& value, const Shape& shape);

using ExtraCheck = std::function<void(const Json&)>;

// Sends req, parses the reply against shape and runs extra (which may throw
// ValidationError). On failure re-prompts once with the error appended; a
// second failure is rethrown.
Json ask_structured(ChatBackend& backend, ChatRequest req, const Shape& shape, const ExtraCheck& extra = {});

}  // namespace hl
