#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stockemb/matrix.hpp"

namespace stockemb {

// Sector classification on top of the embeddings: oversample with SMOTE,
// fit a linear one-vs-rest max-margin classifier, evaluate with stratified
// cross-validation. Oversampling happens strictly inside each training fold.

// SMOTE output. Rows 0..original_count-1 are the inputs, in order; synthetic
// rows follow. `parents` records, for each synthetic row, the two input rows
// it interpolates -- that provenance is what lets the cross-validation assert
// no held-out sample leaked into oversampling.
struct SmoteResult {
    Matrix X;
    std::vector<int> y;
    std::size_t original_count = 0;
    std::vector<std::pair<std::size_t, std::size_t>> parents;  // one per synthetic row
};

// Upsamples every class to the majority class count. Each synthetic point is
// x + u * (nn - x), with x drawn uniformly from the class, nn drawn uniformly
// from x's k nearest same-class neighbours (k capped at class size - 1), and
// u uniform on [0, 1). Deterministic given seed.
SmoteResult smote(const Matrix& X, std::span<const int> y, std::size_t k_neighbors,
                  std::uint64_t seed);

// Index of the largest value; exact ties resolve to the lowest index.
std::size_t argmax_index(std::span<const double> v);

// One-vs-rest linear classifier trained by subgradient descent on the hinge
// loss with L2 regularization.
class LinearClassifier {
  public:
    static LinearClassifier fit(const Matrix& X, std::span<const int> y,
                                std::size_t n_classes, std::size_t epochs, double lr,
                                double reg, std::uint64_t seed);

    // Per-class margins w_c . x + b_c.
    std::vector<double> scores(std::span<const double> x) const;

    // Argmax class; ties resolve to the lowest class index.
    int predict(std::span<const double> x) const;

    std::size_t n_classes() const { return w_.rows(); }

  private:
    Matrix w_;               // n_classes x dim
    std::vector<double> b_;  // n_classes
};

struct ClassMetrics {
    std::string label;
    std::size_t support = 0;  // true members across all held-out folds
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ClassificationReport {
    std::size_t folds = 0;
    double accuracy = 0.0;  // pooled over all held-out predictions
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassMetrics> per_class;
    Matrix confusion;  // pooled; row = true class, col = predicted
    // True iff every synthetic training point interpolated training-fold
    // members only. Checked every run; a false value means a bug, not a
    // tuning problem.
    bool oversampling_clean = false;
    std::vector<std::string> warnings;
};

struct ClassifyConfig {
    std::size_t folds = 5;
    std::size_t smote_neighbors = 5;
    std::size_t epochs = 200;
    double learning_rate = 0.01;
    double regularization = 1e-3;
    std::uint64_t seed = 42;
};

// Stratified k-fold evaluation of label recovery from the vectors in X.
// Labels occurring fewer than twice are excluded (with a warning); classes
// smaller than the fold count trigger a warning but still participate.
// Metrics are macro-averaged over classes on the pooled confusion matrix.
ClassificationReport kfold_eval(const Matrix& X, std::span<const std::string> labels,
                                const ClassifyConfig& cfg);

}  // namespace stockemb
