#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stockemb/analysis.hpp"
#include "stockemb/matrix.hpp"

namespace stockemb {

// Hedging evaluation: pair every asset with its least similar partner under
// each scoring method (scores built from the training window only), hold the
// pair equal-weighted through the test window, and compare the resulting
// volatility distributions across methods.

struct HedgedPortfolio {
    std::size_t query = 0;
    std::size_t hedge = 0;
};

// The asset minimizing scores(query, .), query excluded; exact ties fall
// back to the lowest index.
std::size_t most_dissimilar(const Matrix& scores, std::size_t query);

// Annualized volatility of the equal-weighted pair return
// 0.5 * (r_query + r_hedge) over the given window: sample standard
// deviation (n-1) scaled by sqrt(252).
double portfolio_volatility(const Matrix& test_returns, const HedgedPortfolio& p);

struct HedgeResult {
    std::string method;
    std::vector<HedgedPortfolio> portfolios;  // one per query asset, in index order
    std::vector<double> volatilities;          // aligned with portfolios
    double mean_volatility = 0.0;
};

// One portfolio per asset per method, evaluated out-of-time.
std::vector<HedgeResult> run_experiment(std::span<const ScoredMethod> methods,
                                        const Matrix& test_returns);

// Repeats the experiment n_runs times, each time drawing the hedge uniformly
// from the query's `pool` least similar assets instead of the single argmin.
// run_means(r, m) is run r's mean volatility under method m. pool = 1
// reproduces run_experiment exactly. Deterministic given seed.
struct RobustnessResult {
    std::vector<std::string> methods;
    Matrix run_means;  // n_runs x n_methods
};

RobustnessResult robustness_rerun(std::span<const ScoredMethod> methods,
                                  const Matrix& test_returns, std::size_t n_runs,
                                  std::size_t pool, std::uint64_t seed);

// All-pairs difference-of-means permutation test with Holm step-down
// correction across the pairs. `reject` compares the adjusted p-value
// against alpha. Used in place of a parametric multiple-comparison
// procedure: it makes no normality assumption about volatility samples.
struct PairComparison {
    std::string method_a;
    std::string method_b;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double p_value = 0.0;     // raw permutation p, add-one convention
    double p_adjusted = 0.0;  // Holm
    bool reject = false;
};

using MethodSample = std::pair<std::string, std::vector<double>>;

std::vector<PairComparison> significance_test(std::span<const MethodSample> samples,
                                              double alpha,
                                              std::size_t resamples = 50000,
                                              std::uint64_t seed = 42);

// Fixed-width histogram of a volatility sample; bins are aligned to integer
// multiples of `bin_width` (default one percentage point).
struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

std::vector<HistogramBin> volatility_histogram(std::span<const double> vols,
                                               double bin_width = 0.01);

}  // namespace stockemb
