#include "stockemb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "stockemb/errors.hpp"
#include "stockemb/stats.hpp"

namespace stockemb {

namespace {

void emit_warning(std::vector<std::string>* sink, std::string msg) {
    if (sink) {
        sink->push_back(std::move(msg));
    } else {
        std::cerr << "warning: " << msg << "\n";
    }
}

// Shared shape for pearson/spearman/geometric: transform each asset's series
// once, then fill the symmetric matrix. `degenerate` marks zero-variance
// assets, whose scores are pinned to 0.
template <typename Score>
Matrix pairwise_from_rows(const Matrix& rows, const std::vector<bool>& degenerate,
                          Score&& score) {
    const std::size_t n = rows.rows();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s =
                (degenerate[i] || degenerate[j]) ? 0.0 : score(rows.row(i), rows.row(j));
            out(i, j) = s;
            out(j, i) = s;
        }
    }
    return out;
}

std::vector<bool> flag_zero_variance(const Matrix& returns, const char* method,
                                     std::vector<std::string>* warnings) {
    std::vector<bool> degenerate(returns.rows(), false);
    for (std::size_t i = 0; i < returns.rows(); ++i) {
        if (sample_variance(returns.row(i)) == 0.0) {
            degenerate[i] = true;
            emit_warning(warnings, std::string(method) + ": asset " + std::to_string(i) +
                                       " has zero return variance; scoring it 0");
        }
    }
    return degenerate;
}

// Pearson correlation of two series already known to have positive variance.
double pearson(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double dx = x[t] - mx;
        const double dy = y[t] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw ArgumentError("cosine: length mismatch");
    if (u.empty()) throw ArgumentError("cosine: empty vectors");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        throw UndefinedSimilarity("cosine of a zero vector is undefined");
    }
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

Matrix cosine_scores(const Matrix& W, std::vector<std::string>* warnings) {
    std::vector<bool> degenerate(W.rows(), false);
    for (std::size_t i = 0; i < W.rows(); ++i) {
        double norm = 0.0;
        for (double v : W.row(i)) norm += v * v;
        if (norm == 0.0) {
            degenerate[i] = true;
            emit_warning(warnings, "cosine: embedding row " + std::to_string(i) +
                                       " is a zero vector; scoring it 0");
        }
    }
    return pairwise_from_rows(W, degenerate, [](auto a, auto b) { return cosine(a, b); });
}

Matrix pearson_scores(const Matrix& returns, std::vector<std::string>* warnings) {
    const auto degenerate = flag_zero_variance(returns, "pearson", warnings);
    return pairwise_from_rows(returns, degenerate,
                              [](auto a, auto b) { return pearson(a, b); });
}

Matrix spearman_scores(const Matrix& returns, std::vector<std::string>* warnings) {
    const auto degenerate = flag_zero_variance(returns, "spearman", warnings);
    // Rank-transform once per asset, then Spearman is Pearson on the ranks.
    Matrix ranks(returns.rows(), returns.cols());
    for (std::size_t i = 0; i < returns.rows(); ++i) {
        if (degenerate[i]) continue;
        const auto r = average_ranks(returns.row(i));
        for (std::size_t t = 0; t < r.size(); ++t) ranks(i, t) = r[t];
    }
    return pairwise_from_rows(ranks, degenerate,
                              [](auto a, auto b) { return pearson(a, b); });
}

Matrix geometric_scores(const Matrix& returns, std::vector<std::string>* warnings) {
    const auto degenerate = flag_zero_variance(returns, "geometric", warnings);
    Matrix z(returns.rows(), returns.cols());
    for (std::size_t i = 0; i < returns.rows(); ++i) {
        if (degenerate[i]) continue;
        const auto row = returns.row(i);
        const double m = mean(row);
        const double sd = sample_stddev(row);
        for (std::size_t t = 0; t < row.size(); ++t) z(i, t) = (row[t] - m) / sd;
    }
    return pairwise_from_rows(z, degenerate, [](auto a, auto b) {
        double d2 = 0.0;
        for (std::size_t t = 0; t < a.size(); ++t) d2 += (a[t] - b[t]) * (a[t] - b[t]);
        return 1.0 / (1.0 + std::sqrt(d2));
    });
}

namespace {

// Descending score with ascending-index tie break; shared by knn/analogy.
void rank_candidates(std::vector<RankedAsset>& cands) {
    std::sort(cands.begin(), cands.end(), [](const RankedAsset& x, const RankedAsset& y) {
        if (x.score != y.score) return x.score > y.score;
        return x.index < y.index;
    });
}

}  // namespace

std::vector<RankedAsset> knn(const Matrix& scores, std::size_t query, std::size_t k) {
    const std::size_t n = scores.rows();
    if (query >= n) throw ArgumentError("knn: query outside universe");
    if (k >= n) throw ArgumentError("knn: k must be below universe size");
    std::vector<RankedAsset> cands;
    cands.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == query) continue;
        cands.push_back({j, scores(query, j)});
    }
    rank_candidates(cands);
    cands.resize(k);
    return cands;
}

std::vector<RankedAsset> analogy(const Matrix& W, std::size_t a, std::size_t b,
                                 std::size_t c, std::size_t k) {
    const std::size_t n = W.rows();
    if (a >= n || b >= n || c >= n) throw ArgumentError("analogy: index outside universe");
    if (a == b || a == c || b == c) {
        throw ArgumentError("analogy: a, b, c must be distinct");
    }
    if (k > n - 3) throw ArgumentError("analogy: k too large for universe");
    std::vector<double> q(W.cols());
    for (std::size_t d = 0; d < q.size(); ++d) q[d] = W(b, d) - W(a, d) + W(c, d);
    std::vector<RankedAsset> cands;
    cands.reserve(n - 3);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == a || j == b || j == c) continue;
        cands.push_back({j, cosine(q, W.row(j))});
    }
    rank_candidates(cands);
    cands.resize(k);
    return cands;
}

std::vector<SimilarityEdge> similarity_graph(const Matrix& W, double threshold) {
    if (!(threshold > -1.0) || !(threshold < 1.0)) {
        throw ArgumentError("similarity_graph: threshold must lie in (-1, 1)");
    }
    const Matrix scores = cosine_scores(W);
    std::vector<SimilarityEdge> edges;
    for (std::size_t i = 0; i < W.rows(); ++i) {
        for (std::size_t j = i + 1; j < W.rows(); ++j) {
            if (scores(i, j) > threshold) edges.push_back({i, j, scores(i, j)});
        }
    }
    return edges;
}

std::vector<SimilarityEdge> mismatches(const Matrix& W, std::span<const AssetMeta> assets,
                                       double threshold) {
    if (assets.size() != W.rows()) {
        throw ArgumentError("mismatches: asset count does not match embedding rows");
    }
    if (!(threshold > -1.0) || !(threshold < 1.0)) {
        throw ArgumentError("mismatches: threshold must lie in (-1, 1)");
    }
    const Matrix scores = cosine_scores(W);
    std::vector<SimilarityEdge> out;
    for (std::size_t i = 0; i < W.rows(); ++i) {
        for (std::size_t j = i + 1; j < W.rows(); ++j) {
            if (scores(i, j) > threshold && assets[i].sector != assets[j].sector) {
                out.push_back({i, j, scores(i, j)});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const SimilarityEdge& x, const SimilarityEdge& y) {
        if (x.score != y.score) return x.score > y.score;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return out;
}

}  // namespace stockemb
