#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hl/core/model.hpp"

namespace hl {

// One arena vote between the models shown in pane A and pane B.
struct ComparisonRecord {
    std::string session_id;
    std::string model_a;
    std::string model_b;
    double s_a = 0.5;
    std::int64_t decided_at_ms = 0;  // Unix epoch milliseconds
    double decision_seconds = 0.0;

    double s_b() const { return 1.0 - s_a; }
};

// True for the five admissible partial-win scores {1, .75, .5, .25, 0}.
bool is_valid_score(double s);

void validate(const ComparisonRecord& r);
void to_json(Json& j, const ComparisonRecord& r);
void from_json(const Json& j, ComparisonRecord& r);

std::string format_utc_ms(std::int64_t epoch_ms);
std::int64_t parse_utc_ms(const std::string& iso);

struct ComparisonFilter {
    std::optional<double> min_decision_seconds;
    std::optional<std::string> model;
    std::optional<std::int64_t> since_ms;  // inclusive
    std::optional<std::int64_t> until_ms;  // exclusive
};

std::vector<ComparisonRecord> filter_comparisons(const std::vector<ComparisonRecord>& records,
                                                 const ComparisonFilter& filter);

}  // namespace hl
