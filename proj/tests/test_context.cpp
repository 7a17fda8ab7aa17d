#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stockemb/context.hpp"
#include "stockemb/errors.hpp"
#include "stockemb/rng.hpp"

using namespace stockemb;

namespace {

// Reference implementation: sort the entire day by (|gap|, index) and take
// the prefix. The production code must match this exactly, ties included.
std::vector<std::size_t> closest_by_full_sort(std::span<const double> day,
                                              std::size_t target, std::size_t count) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t j = 0; j < day.size(); ++j) {
        if (j == target) continue;
        all.emplace_back(std::fabs(day[target] - day[j]), j);
    }
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = all[k].second;
    return out;
}

ReturnsMatrix tiny_returns(const std::vector<std::vector<double>>& rows) {
    ReturnsMatrix r;
    r.returns = Matrix(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        r.assets.push_back({i, "T" + std::to_string(i), "S", "I"});
        for (std::size_t t = 0; t < rows[i].size(); ++t) r.returns(i, t) = rows[i][t];
    }
    for (std::size_t t = 0; t < rows[0].size(); ++t) r.dates.push_back("d");
    return r;
}

}  // namespace

TEST_CASE("closest_contexts picks the nearest returns in order") {
    // Target 0 at 0.00; gaps: 1 -> 0.010, 2 -> 0.002, 3 -> 0.007, 4 -> 0.030.
    const std::vector<double> day = {0.0, 0.010, -0.002, 0.007, 0.030};
    const auto ctx = closest_contexts(day, 0, 3);
    CHECK(ctx == std::vector<std::size_t>{2, 3, 1});
}

TEST_CASE("exact gap ties break toward the lower index") {
    const std::vector<double> day = {0.0, 0.01, -0.01, 0.01, 0.05};
    // Assets 1, 2, 3 all sit at gap 0.01.
    const auto ctx = closest_contexts(day, 0, 2);
    CHECK(ctx == std::vector<std::size_t>{1, 2});
}

TEST_CASE("partial selection equals the full-sort reference") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(rng.below(60));
        std::vector<double> day(n);
        for (auto& v : day) {
            // Quantized returns so exact ties actually occur.
            v = std::floor(rng.uniform(-5.0, 5.0)) / 100.0;
        }
        const auto target = static_cast<std::size_t>(rng.below(n));
        const std::size_t count = 1 + static_cast<std::size_t>(rng.below(n - 1));
        CHECK(closest_contexts(day, target, count) ==
              closest_by_full_sort(day, target, count));
    }
}

TEST_CASE("closest_contexts validates its arguments") {
    const std::vector<double> day = {0.0, 0.1, 0.2};
    CHECK_THROWS_AS(closest_contexts(day, 3, 1), ArgumentError);
    CHECK_THROWS_AS(closest_contexts(day, 0, 3), ArgumentError);  // count == |U|
}

TEST_CASE("iqr_retain keeps only the tails of the cross-section") {
    // Returns 0..9: interpolated quartiles are 2.25 and 6.75.
    std::vector<double> day(10);
    for (std::size_t i = 0; i < 10; ++i) day[i] = static_cast<double>(i);
    std::vector<bool> kept;
    for (std::size_t i = 0; i < 10; ++i) kept.push_back(iqr_retain(day, i));
    CHECK(kept == std::vector<bool>{true, true, true, false, false, false, false, true,
                                    true, true});
}

TEST_CASE("iqr_retain includes the target in the quartile sample") {
    // Without the target, the cross-section would be {0,0,0}; with it, the
    // quartiles move and the extreme target is outside them.
    const std::vector<double> day = {0.0, 0.0, 0.0, 0.10};
    CHECK(iqr_retain(day, 3));
    CHECK_FALSE(iqr_retain(day, 0));
    CHECK_THROWS_AS(iqr_retain(std::vector<double>{1.0, 2.0, 3.0}, 0), ArgumentError);
}

TEST_CASE("build_context_sets enumerates (day, target) in order") {
    const auto r = tiny_returns({
        {0.00, 0.05},
        {0.01, 0.00},
        {0.02, 0.01},
        {0.05, 0.02},
    });
    const auto sets = build_context_sets(r, 2, false);
    REQUIRE(sets.size() == 8);  // |U| * T
    for (std::size_t k = 0; k < sets.size(); ++k) {
        CHECK(sets[k].time == k / 4);
        CHECK(sets[k].target == k % 4);
        CHECK(sets[k].context.size() == 2);
    }
    // Spot-check one: day 0 target 0 has gaps 0.01, 0.02, 0.05.
    CHECK(sets[0].context == std::vector<std::size_t>{1, 2});
}

TEST_CASE("IQR filtering removes interior targets entirely") {
    Rng rng(11);
    ReturnsMatrix r;
    const std::size_t n = 12, T = 9;
    r.returns = Matrix(n, T);
    for (std::size_t i = 0; i < n; ++i) {
        r.assets.push_back({i, "T" + std::to_string(i), "S", "I"});
        for (std::size_t t = 0; t < T; ++t) r.returns(i, t) = rng.uniform(-0.05, 0.05);
    }
    r.dates.assign(T, "d");

    const auto all = build_context_sets(r, 3, false);
    const auto filtered = build_context_sets(r, 3, true);
    CHECK(all.size() == n * T);
    CHECK(filtered.size() < all.size());
    CHECK(!filtered.empty());
    for (const auto& s : filtered) {
        CHECK(iqr_retain(r.returns.col(s.time), s.target));
    }
    // Filtering only removes sets; survivors are identical to the unfiltered
    // ones for the same (day, target).
    for (const auto& s : filtered) {
        const auto match = std::find_if(all.begin(), all.end(), [&](const ContextSet& o) {
            return o.time == s.time && o.target == s.target;
        });
        REQUIRE(match != all.end());
        CHECK(match->context == s.context);
    }
}

TEST_CASE("cooccurrence counts context membership over all days") {
    std::vector<ContextSet> sets;
    sets.push_back({0, 0, {1, 2}});
    sets.push_back({0, 1, {1, 3}});
    sets.push_back({1, 0, {0, 2}});
    const Matrix beta = cooccurrence(sets, 4, 4);
    CHECK(beta(0, 1) == 0.5);   // in 2 of 4 days' contexts
    CHECK(beta(0, 2) == 0.25);
    CHECK(beta(0, 3) == 0.25);
    CHECK(beta(1, 0) == 0.25);
    CHECK(beta(0, 0) == 0.0);  // diagonal never populated
    CHECK(beta(2, 1) == 0.0);
    CHECK_THROWS_AS(cooccurrence(sets, 4, 0), ArgumentError);
    std::vector<ContextSet> bad;
    bad.push_back({9, 0, {1}});
    CHECK_THROWS_AS(cooccurrence(bad, 4, 4), ValidationError);
}

TEST_CASE("cooccurrence keeps T as denominator under filtering") {
    // Same sets, larger day count: every rate shrinks proportionally.
    std::vector<ContextSet> sets;
    sets.push_back({0, 0, {1}});
    sets.push_back({0, 2, {1}});
    const Matrix b4 = cooccurrence(sets, 3, 4);
    const Matrix b8 = cooccurrence(sets, 3, 8);
    CHECK(b4(0, 1) == 0.5);
    CHECK(b8(0, 1) == 0.25);
}

TEST_CASE("cooccurrence rates stay within [0, 1]") {
    Rng rng(3);
    ReturnsMatrix r;
    const std::size_t n = 8, T = 20;
    r.returns = Matrix(n, T);
    for (std::size_t i = 0; i < n; ++i) {
        r.assets.push_back({i, "T" + std::to_string(i), "S", "I"});
        for (std::size_t t = 0; t < T; ++t) r.returns(i, t) = rng.uniform(-0.05, 0.05);
    }
    r.dates.assign(T, "d");
    const auto sets = build_context_sets(r, 3, false);
    const Matrix beta = cooccurrence(sets, n, T);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(beta(i, i) == 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(beta(i, j) >= 0.0);
            CHECK(beta(i, j) <= 1.0);
        }
    }
}

TEST_CASE("weights_for_set normalizes the beta row over the set") {
    Matrix beta(3, 3);
    beta(0, 1) = 0.2;
    beta(0, 2) = 0.3;
    ContextSet s{0, 0, {1, 2}};
    const auto w = weights_for_set(beta, s);
    CHECK(w[0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(w[0] + w[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("weights_for_set scale invariance and zero fallback") {
    Matrix beta(2, 4);
    beta(0, 1) = 0.04;
    beta(0, 2) = 0.10;
    beta(0, 3) = 0.06;
    ContextSet s{0, 0, {1, 2, 3}};
    const auto w1 = weights_for_set(beta, s);

    Matrix scaled = beta;
    for (std::size_t j = 0; j < 4; ++j) scaled(0, j) *= 7.3;
    const auto w2 = weights_for_set(scaled, s);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::fabs(w1[k] - w2[k]) <= 1e-12);
    }

    // All-zero row: uniform fallback, exactly 1/C.
    Matrix zero(2, 4);
    const auto wz = weights_for_set(zero, s);
    for (double v : wz) CHECK(v == 1.0 / 3.0);
}
