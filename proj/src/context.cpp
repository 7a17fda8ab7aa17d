#include "stockemb/context.hpp"

#include <algorithm>
#include <cmath>

#include "stockemb/errors.hpp"
#include "stockemb/stats.hpp"

namespace stockemb {

namespace {

// (|return gap|, index) pairs compare lexicographically, which encodes the
// tie rule once for both the selection and the final ordering.
using Candidate = std::pair<double, std::size_t>;

}  // namespace

std::vector<std::size_t> closest_contexts(std::span<const double> day_returns,
                                          std::size_t target, std::size_t count) {
    const std::size_t n = day_returns.size();
    if (target >= n) throw ArgumentError("closest_contexts: target outside universe");
    if (count >= n) {
        throw ArgumentError("closest_contexts: context size must be below universe size");
    }
    const double rt = day_returns[target];
    std::vector<Candidate> cands;
    cands.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == target) continue;
        cands.emplace_back(std::fabs(rt - day_returns[j]), j);
    }
    // Partial selection keeps this linear in the universe size; only the
    // chosen prefix needs ordering.
    if (count < cands.size()) {
        std::nth_element(cands.begin(), cands.begin() + static_cast<long>(count),
                         cands.end());
    }
    std::sort(cands.begin(), cands.begin() + static_cast<long>(count));
    std::vector<std::size_t> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = cands[k].second;
    return out;
}

bool iqr_retain(std::span<const double> day_returns, std::size_t target) {
    const std::size_t n = day_returns.size();
    if (target >= n) throw ArgumentError("iqr_retain: target outside universe");
    if (n < 4) throw ArgumentError("iqr_retain: need at least 4 assets");
    std::vector<double> sorted(day_returns.begin(), day_returns.end());
    std::sort(sorted.begin(), sorted.end());
    const double q1 = percentile_sorted(sorted, 0.25);
    const double q3 = percentile_sorted(sorted, 0.75);
    const double rt = day_returns[target];
    return rt < q1 || rt > q3;
}

std::vector<ContextSet> build_context_sets(const ReturnsMatrix& r, std::size_t count,
                                           bool apply_iqr) {
    const std::size_t n = r.returns.rows();
    const std::size_t T = r.returns.cols();
    if (count == 0 || count >= n) {
        throw ArgumentError("build_context_sets: need 0 < count < universe size");
    }
    std::vector<ContextSet> sets;
    sets.reserve(n * T);
    std::vector<double> day(n);
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t i = 0; i < n; ++i) day[i] = r.returns(i, t);
        for (std::size_t i = 0; i < n; ++i) {
            if (apply_iqr && !iqr_retain(day, i)) continue;
            ContextSet s;
            s.target = i;
            s.time = t;
            s.context = closest_contexts(day, i, count);
            sets.push_back(std::move(s));
        }
    }
    return sets;
}

Matrix cooccurrence(std::span<const ContextSet> sets, std::size_t universe,
                    std::size_t days) {
    if (days == 0) throw ArgumentError("cooccurrence: days must be positive");
    Matrix beta(universe, universe);
    for (const auto& s : sets) {
        if (s.target >= universe) {
            throw ValidationError("cooccurrence: set target outside universe");
        }
        for (std::size_t j : s.context) {
            if (j >= universe) {
                throw ValidationError("cooccurrence: context index outside universe");
            }
            beta(s.target, j) += 1.0;
        }
    }
    const double scale = 1.0 / static_cast<double>(days);
    for (std::size_t i = 0; i < universe; ++i) {
        for (std::size_t j = 0; j < universe; ++j) beta(i, j) *= scale;
    }
    return beta;
}

std::vector<double> weights_for_set(const Matrix& beta, const ContextSet& set) {
    if (set.context.empty()) throw ArgumentError("weights_for_set: empty context");
    if (set.target >= beta.rows()) {
        throw ArgumentError("weights_for_set: target outside beta");
    }
    std::vector<double> w(set.context.size());
    double denom = 0.0;
    for (std::size_t k = 0; k < set.context.size(); ++k) {
        const std::size_t j = set.context[k];
        if (j >= beta.cols()) throw ArgumentError("weights_for_set: index outside beta");
        w[k] = beta(set.target, j);
        denom += w[k];
    }
    if (denom == 0.0) {
        // Never co-occurred before (or beta was all zeros): no information,
        // treat the members as exchangeable.
        const double u = 1.0 / static_cast<double>(w.size());
        std::fill(w.begin(), w.end(), u);
        return w;
    }
    for (double& v : w) v /= denom;
    return w;
}

}  // namespace stockemb
