#pragma once

#include <span>
#include <string>
#include <vector>

#include "stockemb/data.hpp"
#include "stockemb/matrix.hpp"

namespace stockemb {

// Cosine similarity; UndefinedSimilarity when either vector has zero norm.
double cosine(std::span<const double> u, std::span<const double> v);

struct RankedAsset {
    std::size_t index = 0;
    double score = 0.0;
};

// A named symmetric |U| x |U| similarity matrix. Higher means more similar
// for every method here, so ranking code never needs to know which method
// produced the scores.
struct ScoredMethod {
    std::string name;
    Matrix scores;
};

// Pairwise score builders. Diagonals are 1 by convention. The returns-based
// builders expect training-period returns only -- feeding them test-period
// data would leak the evaluation window into selection decisions.
// A zero-variance (or zero-norm) asset gets score 0 against everything, with
// a warning pushed to `warnings` (or stderr when null).
Matrix cosine_scores(const Matrix& W, std::vector<std::string>* warnings = nullptr);
Matrix pearson_scores(const Matrix& returns, std::vector<std::string>* warnings = nullptr);
Matrix spearman_scores(const Matrix& returns, std::vector<std::string>* warnings = nullptr);
// Distance-based stand-in: 1 / (1 + euclidean distance of z-scored return
// series). This is a proxy for a price-path geometry score, not a literal
// path distance; it is labelled "geometric" throughout reports.
Matrix geometric_scores(const Matrix& returns, std::vector<std::string>* warnings = nullptr);

// Top-k neighbours of `query` (query excluded), descending score; exact ties
// break toward the lower index. Requires k < |U|.
std::vector<RankedAsset> knn(const Matrix& scores, std::size_t query, std::size_t k);

// Vector-offset analogy "a is to b as c is to ?": ranks every asset outside
// {a, b, c} by cosine against W[b] - W[a] + W[c].
std::vector<RankedAsset> analogy(const Matrix& W, std::size_t a, std::size_t b,
                                 std::size_t c, std::size_t k);

struct SimilarityEdge {
    std::size_t a = 0;  // a < b
    std::size_t b = 0;
    double score = 0.0;
};

// All pairs with embedding cosine strictly above `threshold`, ordered by
// (a, b). Threshold must lie in (-1, 1).
std::vector<SimilarityEdge> similarity_graph(const Matrix& W, double threshold);

// High-similarity pairs whose declared sectors differ -- candidate
// misclassifications in the sector taxonomy. Descending score, ties by
// (a, b).
std::vector<SimilarityEdge> mismatches(const Matrix& W, std::span<const AssetMeta> assets,
                                       double threshold);

}  // namespace stockemb
