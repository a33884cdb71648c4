#pragma once

#include <string_view>

// Task labels attached to ChatRequest::task. Real backends ignore them; the
// mock backend uses them to shape its replies.
namespace hl::task {

inline constexpr std::string_view kTuringJudge = "turing_judge";
inline constexpr std::string_view kLikertRating = "likert_rating";
inline constexpr std::string_view kClusterSummary = "cluster_summary";
inline constexpr std::string_view kPersonaEnrich = "persona_enrich";
inline constexpr std::string_view kDialogueTurn = "dialogue_turn";

}  // namespace hl::task
