#include "stockemb/hedge.hpp"

#include <algorithm>
#include <cmath>

#include "stockemb/errors.hpp"
#include "stockemb/rng.hpp"
#include "stockemb/stats.hpp"

namespace stockemb {

namespace {

constexpr double kTradingDays = 252.0;

double mean_of(std::span<const double> v) { return mean(v); }

// The `pool` least similar assets to `query`, ascending score with index
// tie break.
std::vector<std::size_t> dissimilar_pool(const Matrix& scores, std::size_t query,
                                         std::size_t pool) {
    std::vector<std::pair<double, std::size_t>> cands;
    cands.reserve(scores.rows() - 1);
    for (std::size_t j = 0; j < scores.rows(); ++j) {
        if (j == query) continue;
        cands.emplace_back(scores(query, j), j);
    }
    std::sort(cands.begin(), cands.end());
    std::vector<std::size_t> out(pool);
    for (std::size_t k = 0; k < pool; ++k) out[k] = cands[k].second;
    return out;
}

}  // namespace

std::size_t most_dissimilar(const Matrix& scores, std::size_t query) {
    const std::size_t n = scores.rows();
    if (query >= n) throw ArgumentError("most_dissimilar: query outside universe");
    if (n < 2) throw ArgumentError("most_dissimilar: need at least two assets");
    std::size_t best = query == 0 ? 1 : 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == query) continue;
        if (scores(query, j) < scores(query, best)) best = j;  // strict: first argmin wins
    }
    return best;
}

double portfolio_volatility(const Matrix& test_returns, const HedgedPortfolio& p) {
    const std::size_t n = test_returns.rows();
    if (p.query >= n || p.hedge >= n) {
        throw ArgumentError("portfolio_volatility: asset outside universe");
    }
    if (test_returns.cols() < 2) {
        throw ArgumentError("portfolio_volatility: need at least two return observations");
    }
    std::vector<double> series(test_returns.cols());
    for (std::size_t t = 0; t < series.size(); ++t) {
        series[t] = 0.5 * (test_returns(p.query, t) + test_returns(p.hedge, t));
    }
    return sample_stddev(series) * std::sqrt(kTradingDays);
}

std::vector<HedgeResult> run_experiment(std::span<const ScoredMethod> methods,
                                        const Matrix& test_returns) {
    const std::size_t n = test_returns.rows();
    std::vector<HedgeResult> results;
    results.reserve(methods.size());
    for (const auto& method : methods) {
        if (method.scores.rows() != n || method.scores.cols() != n) {
            throw ArgumentError("run_experiment: score matrix shape mismatch for " +
                                method.name);
        }
        HedgeResult res;
        res.method = method.name;
        res.portfolios.reserve(n);
        res.volatilities.reserve(n);
        for (std::size_t q = 0; q < n; ++q) {
            HedgedPortfolio p{q, most_dissimilar(method.scores, q)};
            res.volatilities.push_back(portfolio_volatility(test_returns, p));
            res.portfolios.push_back(p);
        }
        res.mean_volatility = mean_of(res.volatilities);
        results.push_back(std::move(res));
    }
    return results;
}

RobustnessResult robustness_rerun(std::span<const ScoredMethod> methods,
                                  const Matrix& test_returns, std::size_t n_runs,
                                  std::size_t pool, std::uint64_t seed) {
    const std::size_t n = test_returns.rows();
    if (n_runs == 0) throw ArgumentError("robustness_rerun: need at least one run");
    if (pool == 0 || pool >= n) {
        throw ArgumentError("robustness_rerun: pool must satisfy 0 < pool < universe size");
    }
    RobustnessResult out;
    out.run_means = Matrix(n_runs, methods.size());

    // Candidate pools are fixed across runs; only the draw inside the pool
    // varies. One RNG drives everything in (run, method, query) order, so
    // the whole procedure is reproducible from the single seed.
    std::vector<std::vector<std::vector<std::size_t>>> pools(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const auto& method = methods[m];
        if (method.scores.rows() != n || method.scores.cols() != n) {
            throw ArgumentError("robustness_rerun: score matrix shape mismatch for " +
                                method.name);
        }
        out.methods.push_back(method.name);
        pools[m].reserve(n);
        for (std::size_t q = 0; q < n; ++q) {
            pools[m].push_back(dissimilar_pool(method.scores, q, pool));
        }
    }

    Rng rng(seed);
    std::vector<double> vols(n);
    for (std::size_t r = 0; r < n_runs; ++r) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            for (std::size_t q = 0; q < n; ++q) {
                const auto& candidates = pools[m][q];
                const std::size_t pick =
                    candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
                vols[q] = portfolio_volatility(test_returns, {q, pick});
            }
            out.run_means(r, m) = mean_of(vols);
        }
    }
    return out;
}

std::vector<PairComparison> significance_test(std::span<const MethodSample> samples,
                                              double alpha, std::size_t resamples,
                                              std::uint64_t seed) {
    if (samples.size() < 2) {
        throw ArgumentError("significance_test: need at least two methods");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ArgumentError("significance_test: alpha must lie in (0, 1)");
    }
    if (resamples == 0) throw ArgumentError("significance_test: need resamples");
    const std::size_t sz = samples[0].second.size();
    for (const auto& [name, values] : samples) {
        if (values.size() != sz || values.empty()) {
            throw ArgumentError("significance_test: samples must be equal-sized and non-empty");
        }
    }

    std::vector<PairComparison> comparisons;
    Rng rng(seed);
    std::vector<double> pooled(2 * sz);
    for (std::size_t a = 0; a < samples.size(); ++a) {
        for (std::size_t b = a + 1; b < samples.size(); ++b) {
            PairComparison cmp;
            cmp.method_a = samples[a].first;
            cmp.method_b = samples[b].first;
            cmp.mean_a = mean_of(samples[a].second);
            cmp.mean_b = mean_of(samples[b].second);
            const double observed = std::fabs(cmp.mean_a - cmp.mean_b);

            std::copy(samples[a].second.begin(), samples[a].second.end(), pooled.begin());
            std::copy(samples[b].second.begin(), samples[b].second.end(),
                      pooled.begin() + static_cast<long>(sz));
            std::size_t at_least = 0;
            for (std::size_t r = 0; r < resamples; ++r) {
                rng.shuffle(pooled);
                double sum_a = 0.0;
                for (std::size_t i = 0; i < sz; ++i) sum_a += pooled[i];
                double sum_b = 0.0;
                for (std::size_t i = sz; i < pooled.size(); ++i) sum_b += pooled[i];
                const double stat = std::fabs(sum_a - sum_b) / static_cast<double>(sz);
                if (stat >= observed) ++at_least;
            }
            // Add-one rule keeps the p-value achievable under the null and
            // never exactly zero.
            cmp.p_value = static_cast<double>(at_least + 1) /
                          static_cast<double>(resamples + 1);
            comparisons.push_back(std::move(cmp));
        }
    }

    // Holm step-down over the m pairwise tests.
    std::vector<std::size_t> order(comparisons.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return comparisons[x].p_value < comparisons[y].p_value;
    });
    const std::size_t m = comparisons.size();
    double running = 0.0;
    for (std::size_t rank = 0; rank < m; ++rank) {
        auto& cmp = comparisons[order[rank]];
        const double scaled = static_cast<double>(m - rank) * cmp.p_value;
        running = std::max(running, std::min(1.0, scaled));
        cmp.p_adjusted = running;
        cmp.reject = cmp.p_adjusted < alpha;
    }
    return comparisons;
}

std::vector<HistogramBin> volatility_histogram(std::span<const double> vols,
                                               double bin_width) {
    if (!(bin_width > 0.0)) throw ArgumentError("volatility_histogram: bad bin width");
    if (vols.empty()) return {};
    const double lo = *std::min_element(vols.begin(), vols.end());
    const double hi = *std::max_element(vols.begin(), vols.end());
    const auto first = static_cast<long>(std::floor(lo / bin_width));
    const auto last = static_cast<long>(std::floor(hi / bin_width));
    std::vector<HistogramBin> bins;
    bins.reserve(static_cast<std::size_t>(last - first + 1));
    for (long b = first; b <= last; ++b) {
        bins.push_back({static_cast<double>(b) * bin_width,
                        static_cast<double>(b + 1) * bin_width, 0});
    }
    for (double v : vols) {
        auto b = static_cast<long>(std::floor(v / bin_width));
        if (b > last) b = last;  // v == exact upper edge
        ++bins[static_cast<std::size_t>(b - first)].count;
    }
    return bins;
}

}  // namespace stockemb
