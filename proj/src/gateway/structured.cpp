#include "hl/gateway/structured.hpp"

#include <algorithm>

#include "hl/error.hpp"

namespace hl {

namespace {

// End (exclusive) of the bracketed span opening at raw[start], or npos.
std::size_t match_brackets(std::string_view raw, std::size_t start) {
    std::vector<char> stack;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        switch (c) {
            case '"': in_string = true; break;
            case '{': stack.push_back('}'); break;
            case '[': stack.push_back(']'); break;
            case '}':
            case ']':
                if (stack.empty() || stack.back() != c) return std::string_view::npos;
                stack.pop_back();
                if (stack.empty()) return i + 1;
                break;
            default: break;
        }
    }
    return std::string_view::npos;
}

std::string type_name(FieldType t) {
    switch (t) {
        case FieldType::String: return "string";
        case FieldType::Integer: return "integer";
        case FieldType::Number: return "number";
        case FieldType::StringArray: return "array of strings";
        case FieldType::IntegerArray: return "array of integers";
        case FieldType::Object: return "object";
    }
    return "value";
}

void check_blank(const FieldShape& f, const std::string& s, const std::string& where) {
    if (f.non_empty && trim(s).empty()) throw ValidationError("field '" + where + "' must be a non-empty string");
}

void check_range(const FieldShape& f, long long v, const std::string& where) {
    if ((f.min_value && v < *f.min_value) || (f.max_value && v > *f.max_value))
        throw ValidationError("field '" + where + "' value " + std::to_string(v) + " is out of range");
}

void check_items(const FieldShape& f, std::size_t n) {
    if ((f.min_items && n < *f.min_items) || (f.max_items && n > *f.max_items)) {
        std::string bounds = "[" + (f.min_items ? std::to_string(*f.min_items) : std::string("0")) + ", " +
                             (f.max_items ? std::to_string(*f.max_items) : std::string("inf")) + "]";
        throw ValidationError("field '" + f.name + "' has " + std::to_string(n) + " items, expected " + bounds);
    }
}

}  // namespace

std::optional<Json> extract_json(std::string_view raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '{' && raw[i] != '[') continue;
        auto end = match_brackets(raw, i);
        if (end == std::string_view::npos) continue;
        auto parsed = Json::parse(raw.substr(i, end - i), nullptr, /*allow_exceptions=*/false);
        if (!parsed.is_discarded()) return parsed;
    }
    return std::nullopt;
}

void validate_shape(const Json& value, const Shape& shape) {
    if (shape.fields.empty()) return;
    if (!value.is_object()) throw ValidationError("expected a JSON object");
    for (const auto& f : shape.fields) {
        if (!value.contains(f.name) || value[f.name].is_null()) {
            if (f.required) throw ValidationError("missing field '" + f.name + "'");
            continue;
        }
        const auto& v = value[f.name];
        const auto wrong = [&] { return ValidationError("field '" + f.name + "' must be " + type_name(f.type)); };
        switch (f.type) {
            case FieldType::String: {
                if (!v.is_string()) throw wrong();
                const auto s = v.get<std::string>();
                check_blank(f, s, f.name);
                if (!f.one_of.empty() && std::find(f.one_of.begin(), f.one_of.end(), s) == f.one_of.end())
                    throw ValidationError("field '" + f.name + "' has invalid value '" + s + "'");
                break;
            }
            case FieldType::Integer:
                if (!v.is_number_integer()) throw wrong();
                check_range(f, v.get<long long>(), f.name);
                break;
            case FieldType::Number:
                if (!v.is_number()) throw wrong();
                break;
            case FieldType::StringArray:
                if (!v.is_array()) throw wrong();
                check_items(f, v.size());
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (!v[i].is_string()) throw wrong();
                    check_blank(f, v[i].get<std::string>(), f.name + "[" + std::to_string(i) + "]");
                }
                break;
            case FieldType::IntegerArray:
                if (!v.is_array()) throw wrong();
                check_items(f, v.size());
                for (std::size_t i = 0; i < v.size(); ++i) {
                    if (!v[i].is_number_integer()) throw wrong();
                    check_range(f, v[i].get<long long>(), f.name + "[" + std::to_string(i) + "]");
                }
                break;
            case FieldType::Object:
                if (!v.is_object()) throw wrong();
                break;
        }
    }
}

Json parse_structured(std::string_view raw, const Shape& shape) {
    auto parsed = extract_json(raw);
    if (!parsed) throw ParseError("no JSON object or array found in judge output", std::string(raw));
    validate_shape(*parsed, shape);
    return *parsed;
}

Json ask_structured(ChatBackend& backend, ChatRequest req, const Shape& shape, const ExtraCheck& extra) {
    std::string raw = backend.chat(req);
    try {
        auto value = parse_structured(raw, shape);
        if (extra) extra(value);
        return value;
    } catch (const ValidationError& e) {
        req.messages.push_back({Role::Assistant, raw});
        req.messages.push_back({Role::User, "Your previous reply was invalid: " + std::string(e.what()) +
                                                ". Reply again with only the corrected JSON object."});
    } catch (const ParseError& e) {
        req.messages.push_back({Role::Assistant, raw});
        req.messages.push_back(
            {Role::User, "Your previous reply did not contain a JSON object. Reply again with only the JSON object."});
    }
    raw = backend.chat(req);
    auto value = parse_structured(raw, shape);
    if (extra) extra(value);
    return value;
}

}  // namespace hl
