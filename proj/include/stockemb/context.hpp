#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stockemb/data.hpp"
#include "stockemb/matrix.hpp"

namespace stockemb {

// One training example: on day `time`, `context` holds the assets whose
// returns were closest to the target's, ordered by closeness.
struct ContextSet {
    std::size_t target = 0;
    std::size_t time = 0;
    std::vector<std::size_t> context;
};

// The C assets (excluding `target`) minimizing |r_target - r_j| within one
// day's cross-section, ordered by ascending difference; exact ties fall back
// to ascending index, so results do not depend on traversal order.
std::vector<std::size_t> closest_contexts(std::span<const double> day_returns,
                                          std::size_t target, std::size_t count);

// Keep only targets in the tails of the day's cross-section: true iff the
// target return lies strictly below the 25th or strictly above the 75th
// percentile (linear interpolation, target included in the sample).
bool iqr_retain(std::span<const double> day_returns, std::size_t target);

// Every (day, target) pair in chronological then index order; with
// `apply_iqr`, days where the target sits inside the interquartile range are
// skipped.
std::vector<ContextSet> build_context_sets(const ReturnsMatrix& r, std::size_t count,
                                           bool apply_iqr);

// Co-occurrence rates: beta(i, j) is the fraction of the T days on which j
// appeared in i's context set. The denominator stays T even when IQR
// filtering removed sets, so filtered targets carry proportionally less
// total weight.
Matrix cooccurrence(std::span<const ContextSet> sets, std::size_t universe,
                    std::size_t days);

// Per-member weights for one set: beta(target, j) normalized to sum 1 over
// the set. An all-zero row of beta over the set falls back to uniform 1/C.
std::vector<double> weights_for_set(const Matrix& beta, const ContextSet& set);

}  // namespace stockemb
