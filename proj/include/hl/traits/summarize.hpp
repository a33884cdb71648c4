#pragma once

#include <string>
#include <vector>

#include "hl/core/model.hpp"
#include "hl/gateway/backend.hpp"

namespace hl {

ChatRequest summarize_request(const std::vector<std::string>& medoid_statements, const Judge& judge);

// Distills cluster representatives into distinct Likert-style statements.
// The judge may merge redundant statements but never return more than it got.
TraitInventory summarize_clusters(const std::vector<std::string>& medoid_statements, const Judge& judge,
                                  const std::string& inventory_name);

}  // namespace hl
