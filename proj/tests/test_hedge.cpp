#include <doctest.h>

#include <cmath>
#include <vector>

#include "stockemb/errors.hpp"
#include "stockemb/hedge.hpp"
#include "stockemb/rng.hpp"
#include "stockemb/stats.hpp"

using namespace stockemb;

namespace {

Matrix rows_matrix(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.at(0).size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

Matrix random_returns(Rng& rng, std::size_t n, std::size_t t, double scale = 0.02) {
    Matrix m(n, t);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < t; ++j) m(i, j) = scale * rng.normal();
    return m;
}

}  // namespace

TEST_CASE("most_dissimilar picks the score argmin, never the query") {
    Matrix s(3, 3);
    // Query 0: scores 1.0 (self), 0.2, -0.5 -> index 2.
    s(0, 0) = 1.0; s(0, 1) = 0.2; s(0, 2) = -0.5;
    s(1, 0) = 0.2; s(1, 1) = 1.0; s(1, 2) = 0.9;
    s(2, 0) = -0.5; s(2, 1) = 0.9; s(2, 2) = 1.0;
    CHECK(most_dissimilar(s, 0) == 2);
    CHECK(most_dissimilar(s, 1) == 0);
    CHECK(most_dissimilar(s, 2) == 0);

    SUBCASE("self row would be the minimum but stays excluded") {
        Matrix t(2, 2);
        t(0, 0) = -9.0; t(0, 1) = 0.5;
        t(1, 0) = 0.5; t(1, 1) = -9.0;
        CHECK(most_dissimilar(t, 0) == 1);
    }
    SUBCASE("exact ties fall to the lowest index") {
        Matrix t(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) t(i, j) = i == j ? 1.0 : 0.3;
        CHECK(most_dissimilar(t, 2) == 0);
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(most_dissimilar(s, 7), ArgumentError);
        Matrix one(1, 1);
        CHECK_THROWS_AS(most_dissimilar(one, 0), ArgumentError);
    }
}

TEST_CASE("portfolio volatility matches a hand computation") {
    const Matrix r = rows_matrix({{0.01, -0.01, 0.02},
                                  {-0.01, 0.01, 0.00}});
    // Pair series (0, 0, 0.01): sd = 0.0057735..., annualized by sqrt(252).
    const double vol = portfolio_volatility(r, {0, 1});
    CHECK(vol == doctest::Approx(0.09165151389911680).epsilon(1e-12));
}

TEST_CASE("hedging an asset with itself reproduces its own volatility") {
    Rng rng(17);
    const Matrix r = random_returns(rng, 2, 40);
    Matrix twin(2, 40);
    for (std::size_t t = 0; t < 40; ++t) {
        twin(0, t) = r(0, t);
        twin(1, t) = r(0, t);  // identical series
    }
    const double pair_vol = portfolio_volatility(twin, {0, 1});
    const double solo = sample_stddev(twin.row(0)) * std::sqrt(252.0);
    CHECK(pair_vol == doctest::Approx(solo).epsilon(1e-14));
}

TEST_CASE("pair variance decomposes into the usual quadratic form") {
    Rng rng(18);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix r = random_returns(rng, 2, 30);
        std::vector<double> pair(30);
        for (std::size_t t = 0; t < 30; ++t) pair[t] = 0.5 * (r(0, t) + r(1, t));
        const double lhs = sample_variance(pair);
        const double rhs = 0.25 * (sample_variance(r.row(0)) + sample_variance(r.row(1)) +
                                   2.0 * sample_covariance(r.row(0), r.row(1)));
        CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
}

TEST_CASE("perfectly anti-correlated pairs hedge to zero volatility") {
    Matrix r(2, 20);
    Rng rng(19);
    for (std::size_t t = 0; t < 20; ++t) {
        r(0, t) = 0.02 * rng.normal();
        r(1, t) = -r(0, t);
    }
    CHECK(portfolio_volatility(r, {0, 1}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("run_experiment hedges every asset under every method") {
    Rng rng(20);
    const std::size_t n = 6;
    const Matrix test_r = random_returns(rng, n, 50);
    Matrix s1(n, n), s2(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            s1(i, j) = i == j ? 1.0 : rng.uniform(-1.0, 1.0);
            s2(i, j) = i == j ? 1.0 : rng.uniform(-1.0, 1.0);
        }
    // Symmetrize to match what the score builders produce.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            s1(j, i) = s1(i, j);
            s2(j, i) = s2(i, j);
        }

    const std::vector<ScoredMethod> methods{{"alpha", s1}, {"beta", s2}};
    const auto results = run_experiment(methods, test_r);
    REQUIRE(results.size() == 2);
    for (const auto& res : results) {
        REQUIRE(res.portfolios.size() == n);
        REQUIRE(res.volatilities.size() == n);
        double acc = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            CHECK(res.portfolios[q].query == q);
            CHECK(res.portfolios[q].hedge != q);
            CHECK(res.volatilities[q] >= 0.0);
            acc += res.volatilities[q];
        }
        CHECK(res.mean_volatility ==
              doctest::Approx(acc / static_cast<double>(n)).epsilon(1e-15));
    }
    CHECK(results[0].method == "alpha");
    CHECK(results[1].method == "beta");
}

TEST_CASE("selection uses scores only; the test window just prices the result") {
    // Poison check for temporal hygiene: changing test-window returns must
    // never change which hedge gets picked, only what it costs.
    Rng rng(21);
    const std::size_t n = 5;
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = i == j ? 1.0 : rng.uniform(-1.0, 1.0);

    const std::vector<ScoredMethod> methods{{"m", s}};
    const auto r1 = run_experiment(methods, random_returns(rng, n, 30));
    const auto r2 = run_experiment(methods, random_returns(rng, n, 30));
    for (std::size_t q = 0; q < n; ++q)
        CHECK(r1[0].portfolios[q].hedge == r2[0].portfolios[q].hedge);
    CHECK(r1[0].mean_volatility != r2[0].mean_volatility);
}

TEST_CASE("robustness rerun with pool size 1 reproduces the deterministic run") {
    Rng rng(22);
    const std::size_t n = 7;
    const Matrix test_r = random_returns(rng, n, 40);
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = i == j ? 1.0 : rng.uniform(-1.0, 1.0);
    const std::vector<ScoredMethod> methods{{"m", s}};

    const auto exact = run_experiment(methods, test_r);
    const RobustnessResult rr = robustness_rerun(methods, test_r, 5, 1, 99);
    REQUIRE(rr.run_means.rows() == 5);
    REQUIRE(rr.run_means.cols() == 1);
    for (std::size_t run = 0; run < 5; ++run)
        CHECK(rr.run_means(run, 0) == exact[0].mean_volatility);
    CHECK(rr.methods == std::vector<std::string>{"m"});
}

TEST_CASE("robustness rerun is deterministic and pool-sensitive") {
    Rng rng(23);
    const std::size_t n = 8;
    const Matrix test_r = random_returns(rng, n, 40);
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = i == j ? 1.0 : rng.uniform(-1.0, 1.0);
    const std::vector<ScoredMethod> methods{{"m", s}};

    const RobustnessResult a = robustness_rerun(methods, test_r, 12, 3, 5);
    const RobustnessResult b = robustness_rerun(methods, test_r, 12, 3, 5);
    CHECK(a.run_means == b.run_means);

    // With a pool of 3 the draws vary across runs.
    bool varies = false;
    for (std::size_t run = 1; run < 12; ++run)
        varies = varies || a.run_means(run, 0) != a.run_means(0, 0);
    CHECK(varies);

    CHECK_THROWS_AS(robustness_rerun(methods, test_r, 3, 0, 5), ArgumentError);
    CHECK_THROWS_AS(robustness_rerun(methods, test_r, 3, n, 5), ArgumentError);
}

TEST_CASE("identical samples are never called different") {
    const std::vector<double> vols{0.11, 0.14, 0.09, 0.13, 0.105, 0.12};
    const std::vector<MethodSample> samples{{"a", vols}, {"b", vols}};
    const auto cmp = significance_test(samples, 0.05, 2000, 3);
    REQUIRE(cmp.size() == 1);
    CHECK(cmp[0].p_value == 1.0);
    CHECK(cmp[0].p_adjusted == 1.0);
    CHECK_FALSE(cmp[0].reject);
    CHECK(cmp[0].mean_a == cmp[0].mean_b);
}

TEST_CASE("a large shift is detected") {
    Rng rng(24);
    std::vector<double> a(40), b(40);
    for (std::size_t i = 0; i < 40; ++i) {
        a[i] = 0.10 + 0.01 * rng.normal();
        b[i] = 0.20 + 0.01 * rng.normal();  // ten sds away
    }
    const std::vector<MethodSample> samples{{"low", a}, {"high", b}};
    const auto cmp = significance_test(samples, 0.01, 2000, 4);
    REQUIRE(cmp.size() == 1);
    CHECK(cmp[0].reject);
    // Add-one convention: the smallest reachable p, never exactly zero.
    CHECK(cmp[0].p_value == doctest::Approx(1.0 / 2001.0).epsilon(1e-12));
    CHECK(cmp[0].mean_a < cmp[0].mean_b);
}

TEST_CASE("holm adjustment is monotone and conservative") {
    Rng rng(25);
    std::vector<double> base(30), near(30), far(30);
    for (std::size_t i = 0; i < 30; ++i) {
        base[i] = 0.10 + 0.01 * rng.normal();
        near[i] = 0.102 + 0.01 * rng.normal();
        far[i] = 0.18 + 0.01 * rng.normal();
    }
    const std::vector<MethodSample> samples{{"base", base}, {"near", near}, {"far", far}};
    const auto cmp = significance_test(samples, 0.05, 4000, 5);
    REQUIRE(cmp.size() == 3);  // all unordered pairs
    for (const auto& c : cmp) {
        CHECK(c.p_adjusted >= c.p_value);
        CHECK(c.p_adjusted <= 1.0);
        CHECK(c.p_value > 0.0);
        if (c.reject) CHECK(c.p_adjusted < 0.05);
    }
    // The clearly separated pairs survive the correction.
    std::size_t rejected = 0;
    for (const auto& c : cmp) rejected += c.reject;
    CHECK(rejected == 2);

    SUBCASE("determinism") {
        const auto again = significance_test(samples, 0.05, 4000, 5);
        for (std::size_t i = 0; i < cmp.size(); ++i) {
            CHECK(cmp[i].p_value == again[i].p_value);
            CHECK(cmp[i].p_adjusted == again[i].p_adjusted);
        }
    }
    SUBCASE("validation") {
        const std::vector<MethodSample> one{{"solo", base}};
        CHECK_THROWS_AS(significance_test(one, 0.05), ArgumentError);
        const std::vector<MethodSample> ragged{{"a", base}, {"b", {0.1, 0.2}}};
        CHECK_THROWS_AS(significance_test(ragged, 0.05), ArgumentError);
        CHECK_THROWS_AS(significance_test(samples, 0.0), ArgumentError);
        CHECK_THROWS_AS(significance_test(samples, 1.0), ArgumentError);
    }
}

TEST_CASE("volatility histogram is aligned to bin-width multiples") {
    const std::vector<double> vols{0.112, 0.118, 0.1301, 0.245, 0.1199};
    const auto bins = volatility_histogram(vols, 0.01);
    REQUIRE(!bins.empty());
    std::size_t total = 0;
    for (const auto& b : bins) {
        CHECK(b.hi == doctest::Approx(b.lo + 0.01).epsilon(1e-9));
        const double scaled = b.lo / 0.01;
        CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-9));
        total += b.count;
    }
    CHECK(total == vols.size());
    CHECK(bins.front().lo == doctest::Approx(0.11).epsilon(1e-12));
    CHECK(bins.front().count == 3);  // 0.112, 0.118, 0.1199
    CHECK(bins.back().count == 1);   // 0.245

    SUBCASE("validation") {
        CHECK_THROWS_AS(volatility_histogram(vols, 0.0), ArgumentError);
        CHECK(volatility_histogram(std::vector<double>{}, 0.01).empty());
    }
}
