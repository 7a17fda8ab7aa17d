#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "stockemb/context.hpp"
#include "stockemb/data.hpp"
#include "stockemb/matrix.hpp"

namespace stockemb {

// A single |U| x N weight matrix serves as both the embedding lookup and the
// output projection: row i is asset i's embedding, and the same row scores
// asset i as a prediction target. Keeping one matrix means every training
// step moves context rows and the output distribution together.

// Numeric defaults here are this library's own choices (tuned on the
// synthetic fixtures), not published values; expect to override them per run.
struct TrainConfig {
    std::size_t context_size = 3;  // assets per context set
    std::size_t dimension = 20;    // embedding width
    double learning_rate = 0.025;
    std::size_t epochs = 10;
    std::uint64_t seed = 42;
    bool use_iqr = false;        // drop sets whose target sat inside the day's IQR
    bool use_weighting = false;  // weight context members by co-occurrence
    bool shuffle = true;         // reshuffle set order every epoch

    // ArgumentError on out-of-range values. learning_rate 0 is allowed (a
    // zero step is occasionally useful as a diagnostic); negative is not.
    void validate(std::size_t universe) const;
};

struct ForwardResult {
    std::vector<double> hidden;  // N
    std::vector<double> probs;   // |U|, sums to 1
};

// The full gradient of one set's loss factors into two rank-1 pieces:
//   d loss / d W[k] = residual[k] * hidden  (+ context_weights[c] * hidden_term
//                                            when k == context[c]).
// Storing the factors keeps the update O((|U| + C) * N).
struct SetGradient {
    double loss = 0.0;
    std::vector<double> residual;     // |U|: probs - onehot(target)
    std::vector<double> hidden;       // N
    std::vector<double> hidden_term;  // N: W^T residual
    std::vector<std::size_t> context;
    std::vector<double> context_weights;
};

struct TrainResult {
    Matrix embeddings;                   // |U| x N
    std::vector<double> epoch_mean_loss;
};

// I.i.d. uniform entries on [-0.5/N, 0.5/N), row-major draw order.
Matrix init_embeddings(std::size_t universe, std::size_t dimension, std::uint64_t seed);

// Weighted average of the context rows; empty `weights` means uniform 1/C.
// Both paths run the same multiply-then-accumulate loop, so uniform weights
// reproduce the unweighted result bit for bit.
std::vector<double> hidden(const Matrix& W, const ContextSet& set,
                           std::span<const double> weights = {});

// Softmax over W * h, max-shifted before exponentiation.
std::vector<double> forward(const Matrix& W, std::span<const double> h);

ForwardResult forward_set(const Matrix& W, const ContextSet& set,
                          std::span<const double> weights = {});

// Cross-entropy loss of the target under forward(), with the gradient in
// factored form. NumericError if the loss is non-finite.
SetGradient loss_and_grads(const Matrix& W, const ContextSet& set,
                           std::span<const double> weights = {});

// One SGD step: W[k] -= lr * grad row k.
void apply_update(Matrix& W, const SetGradient& grad, double learning_rate);

// Dense |U| x N gradient, materialized from the factors. Diagnostic /
// test helper; training applies the factored form directly.
Matrix dense_gradient(const SetGradient& grad, std::size_t universe,
                      std::size_t dimension);

// Per-set SGD over `sets` for cfg.epochs passes. `beta` supplies
// co-occurrence weights and is required iff cfg.use_weighting. `initial`
// overrides the seeded random init (used by tests that need to control the
// starting point). Deterministic given cfg.seed.
TrainResult train(const TrainConfig& cfg, std::span<const ContextSet> sets,
                  std::size_t universe, const Matrix* beta = nullptr,
                  const Matrix* initial = nullptr);

// CSV artifact: header ticker,sector,industry,e1..eN; one row per asset in
// index order; values carry 17 significant digits so reloading is lossless.
void save_embeddings(const Matrix& W, std::span<const AssetMeta> assets,
                     const std::filesystem::path& path);

struct Embeddings {
    std::vector<AssetMeta> assets;
    Matrix W;
};

Embeddings load_embeddings(const std::filesystem::path& path);

}  // namespace stockemb
