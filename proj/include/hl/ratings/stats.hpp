#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "hl/core/model.hpp"

namespace hl {

struct TestResult {
    std::optional<double> statistic;
    std::optional<double> p_value;
    double mean_diff = 0.0;  // mean(a) - mean(b)
    std::optional<double> ci_low;
    std::optional<double> ci_high;
    std::string method;
};

void to_json(Json& j, const TestResult& r);

// Largest combined sample size handled by exact enumeration.
inline constexpr std::size_t kExactMannWhitneyLimit = 12;

// U_a: pairs (x in a, y in b) with x > y, plus half the ties.
double mann_whitney_u(std::span<const double> a, std::span<const double> b);

// P(U_a >= observed) over all equally likely splits of the pooled sample.
double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b);

// Normal approximation with tie-corrected variance and continuity correction.
double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b);

// One-sided test of "a is stochastically greater than b". Exact when
// |a| + |b| <= kExactMannWhitneyLimit, normal approximation otherwise.
TestResult mann_whitney_one_sided(std::span<const double> a, std::span<const double> b);

// Percentile bootstrap CI for mean(a) - mean(b), resampling each group with
// replacement.
TestResult bootstrap_mean_diff(std::span<const double> a, std::span<const double> b, int n_boot = 10000,
                               double confidence = 0.95, std::uint64_t seed = 0);

double mean(std::span<const double> x);

// Linear-interpolated quantile of sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace hl
