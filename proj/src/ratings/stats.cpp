#include "hl/ratings/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hl/error.hpp"
#include "hl/random.hpp"

namespace hl {

void to_json(Json& j, const TestResult& r) {
    j = Json::object();
    if (r.statistic) j["statistic"] = *r.statistic;
    if (r.p_value) j["p_value"] = *r.p_value;
    j["mean_diff"] = r.mean_diff;
    if (r.ci_low) j["ci_low"] = *r.ci_low;
    if (r.ci_high) j["ci_high"] = *r.ci_high;
    j["method"] = r.method;
}

namespace {

void require_samples(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ValidationError("both samples must be non-empty");
    for (double x : a)
        if (!std::isfinite(x)) throw ValidationError("sample contains a non-finite value");
    for (double x : b)
        if (!std::isfinite(x)) throw ValidationError("sample contains a non-finite value");
}

// Doubled mid-ranks of the pooled sample (a first, then b), so ties stay integral.
std::vector<long long> doubled_ranks(std::span<const double> a, std::span<const double> b) {
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return pooled[i] < pooled[j]; });
    std::vector<long long> ranks(pooled.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        // positions i..j share rank ((i+1) + (j+1)) / 2
        const long long doubled = static_cast<long long>(i + j + 2);
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = doubled;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double mean(std::span<const double> x) {
    if (x.empty()) throw ValidationError("mean of an empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    const auto ranks = doubled_ranks(a, b);
    long long doubled_sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) doubled_sum += ranks[i];
    const double na = static_cast<double>(a.size());
    return static_cast<double>(doubled_sum) / 2.0 - na * (na + 1.0) / 2.0;
}

double mann_whitney_exact_p(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    const auto ranks = doubled_ranks(a, b);
    const std::size_t n = ranks.size();
    const std::size_t k = a.size();
    long long observed = 0;
    for (std::size_t i = 0; i < k; ++i) observed += ranks[i];

    // Walk every k-subset of positions in lexicographic order.
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    std::uint64_t total = 0, extreme = 0;
    while (true) {
        long long sum = 0;
        for (auto p : pick) sum += ranks[p];
        ++total;
        extreme += sum >= observed;
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
}

double mann_whitney_normal_p(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double n = na + nb;
    const double u = mann_whitney_u(a, b);

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(var > 0.0)) return 1.0;
    const double z = (u - na * nb / 2.0 - 0.5) / std::sqrt(var);
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

TestResult mann_whitney_one_sided(std::span<const double> a, std::span<const double> b) {
    require_samples(a, b);
    TestResult r;
    r.statistic = mann_whitney_u(a, b);
    const bool exact = a.size() + b.size() <= kExactMannWhitneyLimit;
    r.p_value = exact ? mann_whitney_exact_p(a, b) : mann_whitney_normal_p(a, b);
    r.mean_diff = mean(a) - mean(b);
    r.method = exact ? "mann-whitney-exact" : "mann-whitney-normal";
    return r;
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw ValidationError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

TestResult bootstrap_mean_diff(std::span<const double> a, std::span<const double> b, int n_boot, double confidence,
                               std::uint64_t seed) {
    require_samples(a, b);
    if (n_boot < 1) throw ValidationError("n_boot must be positive");
    if (!(confidence > 0.0 && confidence < 1.0)) throw ValidationError("confidence must be in (0, 1)");
    Rng rng(derive_seed(seed, "bootstrap-mean-diff"));
    std::vector<double> diffs(static_cast<std::size_t>(n_boot));
    for (auto& d : diffs) {
        double sa = 0.0, sb = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) sa += a[rng.below(a.size())];
        for (std::size_t i = 0; i < b.size(); ++i) sb += b[rng.below(b.size())];
        d = sa / static_cast<double>(a.size()) - sb / static_cast<double>(b.size());
    }
    std::sort(diffs.begin(), diffs.end());
    TestResult r;
    r.mean_diff = mean(a) - mean(b);
    const double alpha = (1.0 - confidence) / 2.0;
    r.ci_low = quantile_sorted(diffs, alpha);
    r.ci_high = quantile_sorted(diffs, 1.0 - alpha);
    r.method = "percentile-bootstrap";
    return r;
}

}  // namespace hl
