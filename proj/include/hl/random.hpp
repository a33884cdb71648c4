#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace hl {

// All randomness in the toolkit goes through Rng so results are identical
// across standard libraries: std::mt19937_64 is fully specified, while the
// std distributions are not, so sampling helpers are implemented here.
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound) by rejection sampling. bound must be > 0.
    std::uint64_t below(std::uint64_t bound);

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform01();

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a, used for mock backends and seed derivation. Not cryptographic.
std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);

// Derives an independent child seed from a parent seed and a purpose label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index);

// Round half away from zero.
long long round_half_away(double x);

}  // namespace hl
