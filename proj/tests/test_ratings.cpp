#include <doctest.h>

#include <cmath>

#include "hl/error.hpp"
#include "hl/ratings/comparison.hpp"
#include "hl/ratings/elo.hpp"
#include "hl/ratings/stats.hpp"
#include "oracles.hpp"

using namespace hl;

namespace {

ComparisonRecord cmp(const std::string& a, const std::string& b, double s_a, double secs = 10.0,
                     std::int64_t at = 1'700'000'000'000) {
    return ComparisonRecord{"s", a, b, s_a, at, secs};
}

std::vector<oracle::Match> matches(const std::vector<ComparisonRecord>& rs) {
    std::vector<oracle::Match> out;
    for (const auto& r : rs) out.push_back({r.model_a, r.model_b, r.s_a});
    return out;
}

}  // namespace

TEST_CASE("expected score") {
    CHECK(expected_score(1600, 1400) == doctest::Approx(0.7597).epsilon(1e-4));
    CHECK(expected_score(1500, 1500) == 0.5);
    for (double d : {-300.0, -10.0, 0.0, 55.0, 800.0})
        CHECK(expected_score(1500 + d, 1500) + expected_score(1500, 1500 + d) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("single elo updates") {
    auto [a, b] = elo_update(1500, 1500, 1.0, 32);
    CHECK(a == 1516.0);
    CHECK(b == 1484.0);
    std::tie(a, b) = elo_update(1500, 1500, 0.75, 32);
    CHECK(a == 1508.0);
    CHECK(b == 1492.0);
    std::tie(a, b) = elo_update(1500, 1500, 0.5, 32);
    CHECK(a == 1500.0);
    CHECK(b == 1500.0);
    std::tie(a, b) = elo_update(1600, 1400, 0.0, 32);
    CHECK(a == doctest::Approx(1600 - 32 * 0.759747).epsilon(1e-6));
    CHECK(a + b == doctest::Approx(3000.0).epsilon(1e-12));
    for (double bad : {0.6, -0.25, 1.25, std::nan("")}) CHECK_THROWS_AS(elo_update(1500, 1500, bad), ValidationError);
}

TEST_CASE("sequential elo matches the oracle") {
    Rng rng(77);
    const std::vector<std::string> models{"a", "b", "c", "d", "e"};
    const double scores[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ComparisonRecord> rs;
        const auto n = 1 + rng.below(60);
        for (std::uint64_t i = 0; i < n; ++i) {
            auto x = rng.below(5), y = rng.below(4);
            if (y >= x) ++y;
            rs.push_back(cmp(models[x], models[y], scores[rng.below(5)]));
        }
        std::vector<std::size_t> order(rs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        auto got = elo_sequential(rs, order, 1500, 24);
        auto want = oracle::elo(matches(rs), 1500, 24);
        REQUIRE(got.size() == want.size());
        double total = 0;
        for (auto& [m, r] : want) {
            CHECK(got[m] == doctest::Approx(r).epsilon(1e-12));
            total += got[m];
        }
        // Each update moves equal and opposite amounts.
        CHECK(std::abs(total - 1500.0 * static_cast<double>(got.size())) < 1e-9);
    }
}

TEST_CASE("elo over shuffles") {
    std::vector<ComparisonRecord> one{cmp("x", "y", 1.0)};
    EloParams p;
    p.shuffles = 10;
    auto r = elo_ratings(one, p);
    CHECK(r["x"].mean == 1516.0);
    CHECK(r["y"].mean == 1484.0);
    CHECK(r["x"].std == 0.0);
    CHECK(r["x"].comparisons == 1);

    std::vector<ComparisonRecord> sym{cmp("x", "y", 1.0), cmp("x", "y", 0.0)};
    p.shuffles = 100;
    auto rs = elo_ratings(sym, p);
    CHECK(std::abs(rs["x"].mean - rs["y"].mean) < 1.0);
    CHECK(std::abs(rs["x"].mean + rs["y"].mean - 3000.0) < 1e-9);
    CHECK(rs["x"].std > 0.0);

    std::vector<ComparisonRecord> mixed{cmp("a", "b", 1.0), cmp("b", "c", 0.75), cmp("c", "a", 0.25),
                                        cmp("a", "c", 0.5)};
    p.seed = 5;
    auto r1 = elo_ratings(mixed, p), r2 = elo_ratings(mixed, p);
    for (auto& [m, v] : r1) CHECK(v.mean == r2[m].mean);
    // Mean equals the average of oracle runs over the same orders.
    double oracle_mean = 0;
    for (int s = 0; s < p.shuffles; ++s) {
        auto order = shuffle_order(mixed.size(), p.seed, s);
        std::vector<oracle::Match> ms;
        for (auto i : order) ms.push_back({mixed[i].model_a, mixed[i].model_b, mixed[i].s_a});
        oracle_mean += oracle::elo(ms, p.initial_rating, p.k)["a"];
    }
    CHECK(r1["a"].mean == doctest::Approx(oracle_mean / p.shuffles).epsilon(1e-12));

    CHECK_THROWS_AS(elo_ratings({}, p), ValidationError);
    p.shuffles = 0;
    CHECK_THROWS_AS(elo_ratings(one, p), ValidationError);
}

TEST_CASE("win rate") {
    std::vector<ComparisonRecord> rs{cmp("a", "b", 1.0), cmp("a", "c", 0.75), cmp("c", "a", 0.5)};
    auto w = win_rate(rs);
    CHECK(w["a"] == 0.75);
    CHECK(w["b"] == 0.0);
    CHECK(w["c"] == doctest::Approx((0.25 + 0.5) / 2));

    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        rng.shuffle(rs);
        CHECK(win_rate(rs) == w);
    }
    CHECK(win_rate({}).empty());
}

TEST_CASE("ratings report") {
    EloParams p;
    p.shuffles = 5;
    auto j = ratings_report({cmp("a", "b", 1.0)}, p);
    CHECK(j["elo"]["a"]["mean"] == 1516.0);
    CHECK(j["win_rate"]["a"] == 1.0);
    CHECK(j["n_comparisons"] == 1);
    CHECK(j["params"]["rng"] == "mt19937_64/v1");
}

TEST_CASE("mann-whitney against brute force") {
    CHECK(mann_whitney_u(std::vector<double>{3, 4, 5}, std::vector<double>{1, 2}) == 6.0);
    CHECK(mann_whitney_exact_p(std::vector<double>{3, 4, 5}, std::vector<double>{1, 2}) == doctest::Approx(0.1));

    Rng rng(12);
    for (int trial = 0; trial < 60; ++trial) {
        const auto na = 1 + rng.below(6), nb = 1 + rng.below(5);
        std::vector<double> a, b;
        // Small integer range so ties are common.
        for (std::uint64_t i = 0; i < na; ++i) a.push_back(static_cast<double>(rng.below(5)));
        for (std::uint64_t i = 0; i < nb; ++i) b.push_back(static_cast<double>(rng.below(5)));
        CHECK(mann_whitney_u(a, b) == oracle::u_statistic(a, b));
        CHECK(mann_whitney_exact_p(a, b) == doctest::Approx(oracle::mw_exact_p(a, b)).epsilon(1e-12));
    }

    std::vector<double> same{1, 2, 3, 4, 5};
    CHECK(*mann_whitney_one_sided(same, same).p_value >= 0.5);

    std::vector<double> hi, lo;
    for (int i = 0; i < 30; ++i) {
        hi.push_back(100 + i);
        lo.push_back(i);
    }
    auto r = mann_whitney_one_sided(hi, lo);
    CHECK(r.method == "mann-whitney-normal");
    CHECK(*r.p_value < 0.001);
    CHECK(*mann_whitney_one_sided(lo, hi).p_value > 0.999);

    std::vector<double> a6{5, 7, 8, 9, 11, 12}, b6{1, 2, 4, 6, 8, 10};
    const double exact = mann_whitney_exact_p(a6, b6);
    CHECK(std::abs(mann_whitney_normal_p(a6, b6) - exact) < 0.02);
    CHECK(mann_whitney_one_sided(a6, b6).method == "mann-whitney-exact");

    CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, same), ValidationError);
    CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{std::nan("")}, same), ValidationError);
}

TEST_CASE("bootstrap") {
    std::vector<double> a{1, 2, 3, 4, 5, 6}, b{0, 1, 1, 2};
    auto r = bootstrap_mean_diff(a, b, 2000, 0.9, 4);
    CHECK(r.mean_diff == doctest::Approx(2.5));
    CHECK(*r.ci_low <= *r.ci_high);
    CHECK(*r.ci_low > 0.0);
    auto again = bootstrap_mean_diff(a, b, 2000, 0.9, 4);
    CHECK(*again.ci_low == *r.ci_low);
    CHECK(*again.ci_high == *r.ci_high);

    std::vector<double> c{3, 3, 3}, d{1, 1};
    auto flat = bootstrap_mean_diff(c, d, 100, 0.95, 1);
    CHECK(*flat.ci_low == 2.0);
    CHECK(*flat.ci_high == 2.0);

    auto single = bootstrap_mean_diff(std::vector<double>{4}, std::vector<double>{1}, 50, 0.95, 1);
    CHECK(*single.ci_low == 3.0);

    CHECK_THROWS_AS(bootstrap_mean_diff(a, b, 0), ValidationError);
    CHECK_THROWS_AS(bootstrap_mean_diff(a, b, 10, 1.0), ValidationError);
    CHECK(quantile_sorted(std::vector<double>{0, 10}, 0.25) == 2.5);
}

TEST_CASE("comparison records") {
    auto r = cmp("a", "b", 0.25, 12.5, 1'700'000'000'123);
    Json j = r;
    CHECK(j["decided_at"] == "2023-11-14T22:13:20.123Z");
    CHECK(j["s_b"] == 0.75);
    auto back = j.get<ComparisonRecord>();
    CHECK(back.decided_at_ms == r.decided_at_ms);
    CHECK(back.decision_seconds == 12.5);
    CHECK(parse_utc_ms("2023-11-14T22:13:20Z") == 1'700'000'000'000);

    j["s_b"] = 0.5;
    CHECK_THROWS_AS(j.get<ComparisonRecord>(), ValidationError);
    CHECK_THROWS_AS(validate(cmp("a", "a", 1.0)), ValidationError);
    CHECK_THROWS_AS(validate(cmp("a", "b", 0.3)), ValidationError);
    CHECK_THROWS_AS(parse_utc_ms("yesterday"), ValidationError);

    std::vector<ComparisonRecord> rs{cmp("a", "b", 1, 2.0, 1000), cmp("a", "c", 1, 9.0, 2000),
                                     cmp("b", "c", 1, 30.0, 3000)};
    ComparisonFilter f;
    f.min_decision_seconds = 5.0;
    CHECK(filter_comparisons(rs, f).size() == 2);
    f.model = "a";
    CHECK(filter_comparisons(rs, f).size() == 1);
    ComparisonFilter t;
    t.since_ms = 2000;
    t.until_ms = 3000;
    auto w = filter_comparisons(rs, t);
    REQUIRE(w.size() == 1);
    CHECK(w[0].model_b == "c");
}
