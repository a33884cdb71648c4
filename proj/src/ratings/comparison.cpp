#include "hl/ratings/comparison.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>

#include "hl/error.hpp"

namespace hl {

bool is_valid_score(double s) { return s == 1.0 || s == 0.75 || s == 0.5 || s == 0.25 || s == 0.0; }

void validate(const ComparisonRecord& r) {
    if (r.model_a.empty() || r.model_b.empty()) throw ValidationError("comparison has an empty model name");
    if (r.model_a == r.model_b) throw ValidationError("comparison pits model '" + r.model_a + "' against itself");
    if (!is_valid_score(r.s_a))
        throw ValidationError("comparison score " + std::to_string(r.s_a) + " is not one of {1, 0.75, 0.5, 0.25, 0}");
    if (!(r.decision_seconds >= 0.0)) throw ValidationError("decision_seconds must be non-negative");
}

std::string format_utc_ms(std::int64_t epoch_ms) {
    std::time_t secs = static_cast<std::time_t>(epoch_ms / 1000);
    int ms = static_cast<int>(epoch_ms % 1000);
    if (ms < 0) {
        ms += 1000;
        --secs;
    }
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
    return buf;
}

std::int64_t parse_utc_ms(const std::string& iso) {
    std::tm tm{};
    int ms = 0;
    char tail = 0;
    int n = std::sscanf(iso.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3d%c", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                        &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &ms, &tail);
    if (n < 6) {
        throw ValidationError("timestamp '" + iso + "' is not ISO-8601 UTC");
    }
    if (n == 6) ms = 0;
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    return static_cast<std::int64_t>(timegm(&tm)) * 1000 + ms;
}

void to_json(Json& j, const ComparisonRecord& r) {
    j = Json{{"session_id", r.session_id},
             {"model_a", r.model_a},
             {"model_b", r.model_b},
             {"s_a", r.s_a},
             {"s_b", r.s_b()},
             {"decided_at", format_utc_ms(r.decided_at_ms)},
             {"decision_seconds", r.decision_seconds}};
}

void from_json(const Json& j, ComparisonRecord& r) {
    r.session_id = j.value("session_id", std::string{});
    r.model_a = j.at("model_a").get<std::string>();
    r.model_b = j.at("model_b").get<std::string>();
    r.s_a = j.at("s_a").get<double>();
    if (j.contains("s_b") && std::abs(j["s_b"].get<double>() - (1.0 - r.s_a)) > 1e-12)
        throw ValidationError("comparison s_a + s_b != 1");
    r.decided_at_ms = j.contains("decided_at") ? parse_utc_ms(j["decided_at"].get<std::string>()) : 0;
    r.decision_seconds = j.value("decision_seconds", 0.0);
    validate(r);
}

std::vector<ComparisonRecord> filter_comparisons(const std::vector<ComparisonRecord>& records,
                                                 const ComparisonFilter& filter) {
    std::vector<ComparisonRecord> out;
    for (const auto& r : records) {
        if (filter.min_decision_seconds && r.decision_seconds < *filter.min_decision_seconds) continue;
        if (filter.model && r.model_a != *filter.model && r.model_b != *filter.model) continue;
        if (filter.since_ms && r.decided_at_ms < *filter.since_ms) continue;
        if (filter.until_ms && r.decided_at_ms >= *filter.until_ms) continue;
        out.push_back(r);
    }
    return out;
}

}  // namespace hl
