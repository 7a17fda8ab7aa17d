#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stockemb/errors.hpp"

namespace stockemb {

inline double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Unbiased (n-1) sample variance; 0 for fewer than two points.
inline double sample_variance(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(n - 1);
}

inline double sample_stddev(std::span<const double> x) {
    return std::sqrt(sample_variance(x));
}

inline double sample_covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("covariance: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    const double mx = mean(x);
    const double my = mean(y);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (x[i] - mx) * (y[i] - my);
    return s / static_cast<double>(n - 1);
}

// Percentile with linear interpolation between order statistics
// (the common "type 7" rule: rank = p * (n-1)).  `sorted` must be ascending.
inline double percentile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw ArgumentError("percentile of empty sample");
    if (p < 0.0 || p > 1.0) throw ArgumentError("percentile fraction outside [0, 1]");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double rank = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(rank);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = rank - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

// Ranks starting at 1, ties resolved by averaging (so the rank vector of
// (3, 1, 1) is (3, 1.5, 1.5)).
inline std::vector<double> average_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        // positions i..j share the same value; average their 1-based ranks
        const double r = static_cast<double>(i + j) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

}  // namespace stockemb
