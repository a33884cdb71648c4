#pragma once

#include <cstdint>

#include "hl/gateway/backend.hpp"

namespace hl {

inline constexpr std::size_t kMockEmbeddingDim = 64;

// Deterministic offline backend: every reply is a pure function of
// (seed, canonical request). Replies are shaped by ChatRequest::task.
class MockBackend final : public ChatBackend {
public:
    explicit MockBackend(std::uint64_t seed) : seed_(seed) {}

    std::string chat(const ChatRequest& req) override;
    std::vector<std::vector<double>> embed(const std::string& model, const std::vector<std::string>& texts) override;

    // Hash of the canonical request under this backend's seed.
    std::uint64_t request_hash(const ChatRequest& req) const;

private:
    std::uint64_t seed_;
};

}  // namespace hl
