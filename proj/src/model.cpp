#include "stockemb/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "stockemb/csv.hpp"
#include "stockemb/errors.hpp"
#include "stockemb/rng.hpp"

namespace stockemb {

void TrainConfig::validate(std::size_t universe) const {
    if (dimension == 0) throw ArgumentError("dimension must be positive");
    if (epochs == 0) throw ArgumentError("epochs must be positive");
    if (context_size == 0 || context_size >= universe) {
        throw ArgumentError("context size must satisfy 0 < C < universe size");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ArgumentError("learning rate must be finite and non-negative");
    }
}

Matrix init_embeddings(std::size_t universe, std::size_t dimension, std::uint64_t seed) {
    if (universe == 0 || dimension == 0) {
        throw ArgumentError("init_embeddings: empty shape");
    }
    Rng rng(seed);
    Matrix W(universe, dimension);
    const double half = 0.5 / static_cast<double>(dimension);
    for (std::size_t i = 0; i < universe; ++i) {
        for (std::size_t j = 0; j < dimension; ++j) {
            W(i, j) = rng.uniform(-half, half);
        }
    }
    return W;
}

std::vector<double> hidden(const Matrix& W, const ContextSet& set,
                           std::span<const double> weights) {
    const std::size_t C = set.context.size();
    if (C == 0) throw ArgumentError("hidden: empty context");
    if (!weights.empty() && weights.size() != C) {
        throw ArgumentError("hidden: weight count does not match context size");
    }
    const double uniform = 1.0 / static_cast<double>(C);
    std::vector<double> h(W.cols(), 0.0);
    for (std::size_t c = 0; c < C; ++c) {
        const std::size_t j = set.context[c];
        if (j >= W.rows()) throw ArgumentError("hidden: context index outside universe");
        const double w = weights.empty() ? uniform : weights[c];
        const auto row = W.row(j);
        for (std::size_t d = 0; d < h.size(); ++d) h[d] += w * row[d];
    }
    return h;
}

std::vector<double> forward(const Matrix& W, std::span<const double> h) {
    if (h.size() != W.cols()) throw ArgumentError("forward: hidden size mismatch");
    const std::size_t n = W.rows();
    std::vector<double> probs(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto row = W.row(k);
        double z = 0.0;
        for (std::size_t d = 0; d < h.size(); ++d) z += row[d] * h[d];
        probs[k] = z;
    }
    // Shift by the max logit; exp() then cannot overflow and the softmax is
    // unchanged.
    const double zmax = *std::max_element(probs.begin(), probs.end());
    double sum = 0.0;
    for (double& p : probs) {
        p = std::exp(p - zmax);
        sum += p;
    }
    for (double& p : probs) p /= sum;
    return probs;
}

ForwardResult forward_set(const Matrix& W, const ContextSet& set,
                          std::span<const double> weights) {
    ForwardResult out;
    out.hidden = hidden(W, set, weights);
    out.probs = forward(W, out.hidden);
    return out;
}

SetGradient loss_and_grads(const Matrix& W, const ContextSet& set,
                           std::span<const double> weights) {
    if (set.target >= W.rows()) {
        throw ArgumentError("loss_and_grads: target outside universe");
    }
    SetGradient g;
    g.hidden = hidden(W, set, weights);

    // Logits, then a max-shifted log-sum-exp for the loss.
    const std::size_t n = W.rows();
    std::vector<double> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto row = W.row(k);
        double dot = 0.0;
        for (std::size_t d = 0; d < g.hidden.size(); ++d) dot += row[d] * g.hidden[d];
        z[k] = dot;
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    g.residual.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        g.residual[k] = std::exp(z[k] - zmax);
        sum += g.residual[k];
    }
    g.loss = -(z[set.target] - zmax) + std::log(sum);
    for (double& r : g.residual) r /= sum;   // now the predicted distribution
    g.residual[set.target] -= 1.0;           // minus the one-hot target

    // hidden_term = W^T residual: the gradient that flows back into the
    // context rows.
    g.hidden_term.assign(W.cols(), 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double r = g.residual[k];
        if (r == 0.0) continue;
        const auto row = W.row(k);
        for (std::size_t d = 0; d < g.hidden_term.size(); ++d) {
            g.hidden_term[d] += r * row[d];
        }
    }

    g.context = set.context;
    if (weights.empty()) {
        g.context_weights.assign(set.context.size(),
                                 1.0 / static_cast<double>(set.context.size()));
    } else {
        g.context_weights.assign(weights.begin(), weights.end());
    }
    return g;
}

void apply_update(Matrix& W, const SetGradient& grad, double learning_rate) {
    const std::size_t n = W.rows();
    if (grad.residual.size() != n) {
        throw ArgumentError("apply_update: gradient shape mismatch");
    }
    // Output side: every row moves against its residual.
    for (std::size_t k = 0; k < n; ++k) {
        const double step = learning_rate * grad.residual[k];
        if (step == 0.0) continue;
        auto row = W.row(k);
        for (std::size_t d = 0; d < row.size(); ++d) row[d] -= step * grad.hidden[d];
    }
    // Hidden side: only the context rows receive the backpropagated term.
    for (std::size_t c = 0; c < grad.context.size(); ++c) {
        const double step = learning_rate * grad.context_weights[c];
        auto row = W.row(grad.context[c]);
        for (std::size_t d = 0; d < row.size(); ++d) {
            row[d] -= step * grad.hidden_term[d];
        }
    }
}

Matrix dense_gradient(const SetGradient& grad, std::size_t universe,
                      std::size_t dimension) {
    Matrix G(universe, dimension);
    for (std::size_t k = 0; k < universe; ++k) {
        for (std::size_t d = 0; d < dimension; ++d) {
            G(k, d) = grad.residual[k] * grad.hidden[d];
        }
    }
    for (std::size_t c = 0; c < grad.context.size(); ++c) {
        const std::size_t j = grad.context[c];
        for (std::size_t d = 0; d < dimension; ++d) {
            G(j, d) += grad.context_weights[c] * grad.hidden_term[d];
        }
    }
    return G;
}

TrainResult train(const TrainConfig& cfg, std::span<const ContextSet> sets,
                  std::size_t universe, const Matrix* beta, const Matrix* initial) {
    cfg.validate(universe);
    if (sets.empty()) throw ArgumentError("train: no context sets");
    if (cfg.use_weighting && beta == nullptr) {
        throw ArgumentError("train: weighting requested without a co-occurrence matrix");
    }
    for (const auto& s : sets) {
        if (s.target >= universe) throw ValidationError("train: set target outside universe");
    }

    TrainResult out;
    out.embeddings = initial ? *initial
                             : init_embeddings(universe, cfg.dimension, cfg.seed);
    if (out.embeddings.rows() != universe || out.embeddings.cols() != cfg.dimension) {
        throw ArgumentError("train: initial matrix shape mismatch");
    }
    Matrix& W = out.embeddings;

    // Weights depend only on beta and the set, so compute them once.
    std::vector<std::vector<double>> weights;
    if (cfg.use_weighting) {
        weights.reserve(sets.size());
        for (const auto& s : sets) weights.push_back(weights_for_set(*beta, s));
    }

    std::vector<std::size_t> order(sets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffler(derive_seed(cfg.seed, 1));  // separate stream from the init draws

    out.epoch_mean_loss.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) shuffler.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t step = 0; step < order.size(); ++step) {
            const std::size_t idx = order[step];
            const auto w = cfg.use_weighting
                               ? std::span<const double>(weights[idx])
                               : std::span<const double>();
            SetGradient g = loss_and_grads(W, sets[idx], w);
            if (!std::isfinite(g.loss)) {
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                                   ", step " + std::to_string(step + 1));
            }
            loss_sum += g.loss;
            apply_update(W, g, cfg.learning_rate);
        }
        out.epoch_mean_loss.push_back(loss_sum / static_cast<double>(order.size()));
    }
    return out;
}

void save_embeddings(const Matrix& W, std::span<const AssetMeta> assets,
                     const std::filesystem::path& path) {
    if (W.rows() != assets.size()) {
        throw ArgumentError("save_embeddings: row count does not match asset count");
    }
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << "ticker,sector,industry";
    for (std::size_t d = 1; d <= W.cols(); ++d) out << ",e" << d;
    out << "\n";
    for (std::size_t i = 0; i < W.rows(); ++i) {
        out << assets[i].ticker << "," << assets[i].sector << "," << assets[i].industry;
        for (double v : W.row(i)) out << "," << format_full(v);
        out << "\n";
    }
    if (!out) throw FormatError("write failed: " + path.string());
}

Embeddings load_embeddings(const std::filesystem::path& path) {
    CsvReader reader(path);
    CsvRow row;
    if (!reader.next(row)) throw FormatError(path.string() + ": empty file");
    if (row.fields.size() < 4 || row.fields[0] != "ticker" || row.fields[1] != "sector" ||
        row.fields[2] != "industry" || row.fields[3] != "e1") {
        throw FormatError(path.string() + ": expected header ticker,sector,industry,e1..eN");
    }
    const std::size_t dim = row.fields.size() - 3;
    Embeddings emb;
    std::vector<double> values;
    while (reader.next(row)) {
        if (row.fields.size() != dim + 3) {
            throw FormatError(path.string() + ":" + std::to_string(row.line) +
                              ": expected " + std::to_string(dim + 3) + " fields");
        }
        AssetMeta meta;
        meta.index = emb.assets.size();
        meta.ticker = row.fields[0];
        meta.sector = row.fields[1];
        meta.industry = row.fields[2];
        emb.assets.push_back(std::move(meta));
        for (std::size_t d = 0; d < dim; ++d) {
            values.push_back(parse_double_field(row.fields[3 + d], row.line, path));
        }
    }
    if (emb.assets.empty()) throw FormatError(path.string() + ": no embedding rows");
    emb.W = Matrix(emb.assets.size(), dim);
    for (std::size_t i = 0; i < emb.assets.size(); ++i) {
        for (std::size_t d = 0; d < dim; ++d) emb.W(i, d) = values[i * dim + d];
    }
    return emb;
}

}  // namespace stockemb
