#include "stockemb/classify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "stockemb/errors.hpp"
#include "stockemb/rng.hpp"

namespace stockemb {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return d2;
}

}  // namespace

SmoteResult smote(const Matrix& X, std::span<const int> y, std::size_t k_neighbors,
                  std::uint64_t seed) {
    if (X.rows() != y.size()) throw ArgumentError("smote: label count mismatch");
    if (X.rows() == 0) throw ArgumentError("smote: empty input");
    if (k_neighbors == 0) throw ArgumentError("smote: k_neighbors must be positive");

    // Class membership lists, keyed by ascending class id so generation order
    // is stable.
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] < 0) throw ValidationError("smote: negative class id");
        members[y[i]].push_back(i);
    }
    std::size_t majority = 0;
    for (const auto& [cls, idx] : members) majority = std::max(majority, idx.size());

    SmoteResult out;
    out.original_count = X.rows();
    std::vector<std::vector<double>> synth_rows;
    Rng rng(seed);

    for (const auto& [cls, idx] : members) {
        const std::size_t deficit = majority - idx.size();
        if (deficit == 0) continue;
        if (idx.size() < 2) {
            throw ValidationError("smote: class " + std::to_string(cls) +
                                  " has fewer than 2 members");
        }
        const std::size_t k = std::min(k_neighbors, idx.size() - 1);
        // k nearest same-class neighbours for each member, by squared
        // distance with index tie break.
        std::vector<std::vector<std::size_t>> nn(idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a) {
            std::vector<std::pair<double, std::size_t>> dists;
            dists.reserve(idx.size() - 1);
            for (std::size_t b = 0; b < idx.size(); ++b) {
                if (b == a) continue;
                dists.emplace_back(squared_distance(X.row(idx[a]), X.row(idx[b])), idx[b]);
            }
            std::sort(dists.begin(), dists.end());
            nn[a].reserve(k);
            for (std::size_t t = 0; t < k; ++t) nn[a].push_back(dists[t].second);
        }
        for (std::size_t s = 0; s < deficit; ++s) {
            const std::size_t a = static_cast<std::size_t>(rng.below(idx.size()));
            const std::size_t base = idx[a];
            const std::size_t nbr = nn[a][static_cast<std::size_t>(rng.below(nn[a].size()))];
            const double u = rng.uniform01();
            std::vector<double> row(X.cols());
            for (std::size_t d = 0; d < X.cols(); ++d) {
                row[d] = X(base, d) + u * (X(nbr, d) - X(base, d));
            }
            synth_rows.push_back(std::move(row));
            out.parents.emplace_back(base, nbr);
            out.y.push_back(cls);  // provisional; reordered below
        }
    }

    // Assemble: originals first and untouched, synthetics appended.
    out.X = Matrix(X.rows() + synth_rows.size(), X.cols());
    std::vector<int> labels(y.begin(), y.end());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t d = 0; d < X.cols(); ++d) out.X(i, d) = X(i, d);
    }
    for (std::size_t s = 0; s < synth_rows.size(); ++s) {
        for (std::size_t d = 0; d < X.cols(); ++d) {
            out.X(X.rows() + s, d) = synth_rows[s][d];
        }
        labels.push_back(out.y[s]);
    }
    out.y = std::move(labels);
    return out;
}

LinearClassifier LinearClassifier::fit(const Matrix& X, std::span<const int> y,
                                       std::size_t n_classes, std::size_t epochs,
                                       double lr, double reg, std::uint64_t seed) {
    if (X.rows() != y.size()) throw ArgumentError("fit: label count mismatch");
    if (X.rows() == 0) throw ArgumentError("fit: empty input");
    if (n_classes == 0) throw ArgumentError("fit: need at least one class");
    if (!(lr > 0.0)) throw ArgumentError("fit: learning rate must be positive");
    if (reg < 0.0) throw ArgumentError("fit: regularization must be non-negative");
    for (int label : y) {
        if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
            throw ArgumentError("fit: label outside [0, n_classes)");
        }
    }

    LinearClassifier clf;
    clf.w_ = Matrix(n_classes, X.cols());
    clf.b_.assign(n_classes, 0.0);

    std::vector<std::size_t> order(X.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order) {
            const auto x = X.row(i);
            for (std::size_t c = 0; c < n_classes; ++c) {
                const double target = (static_cast<std::size_t>(y[i]) == c) ? 1.0 : -1.0;
                auto w = clf.w_.row(c);
                double margin = clf.b_[c];
                for (std::size_t d = 0; d < x.size(); ++d) margin += w[d] * x[d];
                // L2 shrinkage applies every step; the hinge term only when
                // the margin constraint is violated.
                const bool active = target * margin < 1.0;
                for (std::size_t d = 0; d < x.size(); ++d) {
                    double g = reg * w[d];
                    if (active) g -= target * x[d];
                    w[d] -= lr * g;
                }
                if (active) clf.b_[c] += lr * target;
            }
        }
    }
    return clf;
}

std::vector<double> LinearClassifier::scores(std::span<const double> x) const {
    if (x.size() != w_.cols()) throw ArgumentError("scores: dimension mismatch");
    std::vector<double> s(w_.rows());
    for (std::size_t c = 0; c < w_.rows(); ++c) {
        const auto w = w_.row(c);
        double v = b_[c];
        for (std::size_t d = 0; d < x.size(); ++d) v += w[d] * x[d];
        s[c] = v;
    }
    return s;
}

std::size_t argmax_index(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < v.size(); ++c) {
        if (v[c] > v[best]) best = c;  // strict: ties stay at the lower index
    }
    return best;
}

int LinearClassifier::predict(std::span<const double> x) const {
    return static_cast<int>(argmax_index(scores(x)));
}

ClassificationReport kfold_eval(const Matrix& X, std::span<const std::string> labels,
                                const ClassifyConfig& cfg) {
    if (X.rows() != labels.size()) throw ArgumentError("kfold_eval: label count mismatch");
    if (cfg.folds < 2) throw ArgumentError("kfold_eval: need at least 2 folds");

    ClassificationReport report;
    report.folds = cfg.folds;

    // Label vocabulary in first-appearance order; classes with fewer than
    // two members cannot be stratified or oversampled, so they sit out.
    std::vector<std::string> vocab;
    std::vector<int> encoded(labels.size(), -1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto it = std::find(vocab.begin(), vocab.end(), labels[i]);
        if (it == vocab.end()) {
            vocab.push_back(labels[i]);
            it = vocab.end() - 1;
        }
        encoded[i] = static_cast<int>(it - vocab.begin());
    }
    std::vector<std::size_t> counts(vocab.size(), 0);
    for (int c : encoded) ++counts[static_cast<std::size_t>(c)];

    std::vector<bool> excluded(vocab.size(), false);
    for (std::size_t c = 0; c < vocab.size(); ++c) {
        if (counts[c] < 2) {
            excluded[c] = true;
            report.warnings.push_back("label '" + vocab[c] +
                                      "' has a single sample; excluded from evaluation");
        } else if (counts[c] < cfg.folds) {
            report.warnings.push_back("label '" + vocab[c] + "' has " +
                                      std::to_string(counts[c]) + " samples for " +
                                      std::to_string(cfg.folds) +
                                      " folds; not every fold will see it");
        }
    }

    // Keep only usable samples, and re-encode densely so class ids stay
    // contiguous for the classifier.
    std::vector<int> dense_id(vocab.size(), -1);
    std::vector<std::string> kept_vocab;
    for (std::size_t c = 0; c < vocab.size(); ++c) {
        if (!excluded[c]) {
            dense_id[c] = static_cast<int>(kept_vocab.size());
            kept_vocab.push_back(vocab[c]);
        }
    }
    std::vector<std::size_t> sample_idx;  // into X
    std::vector<int> sample_y;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int c = encoded[i];
        if (!excluded[static_cast<std::size_t>(c)]) {
            sample_idx.push_back(i);
            sample_y.push_back(dense_id[static_cast<std::size_t>(c)]);
        }
    }
    const std::size_t n_classes = kept_vocab.size();
    if (n_classes < 2) {
        throw ValidationError("kfold_eval: need at least two usable classes");
    }

    // Stratified assignment: shuffle each class's members, deal round-robin.
    std::vector<std::size_t> fold_of(sample_idx.size(), 0);
    {
        Rng rng(derive_seed(cfg.seed, 0));
        for (std::size_t c = 0; c < n_classes; ++c) {
            std::vector<std::size_t> pos;
            for (std::size_t s = 0; s < sample_y.size(); ++s) {
                if (sample_y[s] == static_cast<int>(c)) pos.push_back(s);
            }
            rng.shuffle(pos);
            for (std::size_t r = 0; r < pos.size(); ++r) fold_of[pos[r]] = r % cfg.folds;
        }
    }

    report.confusion = Matrix(n_classes, n_classes);
    report.oversampling_clean = true;

    for (std::size_t fold = 0; fold < cfg.folds; ++fold) {
        std::vector<std::size_t> train_s, test_s;  // positions in sample_idx
        for (std::size_t s = 0; s < sample_idx.size(); ++s) {
            (fold_of[s] == fold ? test_s : train_s).push_back(s);
        }
        if (test_s.empty() || train_s.empty()) continue;

        // A class can reach this fold with a single training member (classes
        // smaller than the fold count). Interpolation needs two, so such a
        // sample is duplicated; oversampling then degenerates to replication
        // for that class, which is the best available without leaking.
        std::vector<std::size_t> train_rows;  // positions in sample_idx, dups allowed
        {
            std::vector<std::size_t> class_count(n_classes, 0);
            for (std::size_t s : train_s) {
                ++class_count[static_cast<std::size_t>(sample_y[s])];
            }
            train_rows = train_s;
            for (std::size_t s : train_s) {
                const auto c = static_cast<std::size_t>(sample_y[s]);
                if (class_count[c] == 1) {
                    train_rows.push_back(s);
                    report.warnings.push_back(
                        "label '" + kept_vocab[c] + "' has one training sample in fold " +
                        std::to_string(fold) + "; duplicated before oversampling");
                }
            }
        }

        Matrix train_X(train_rows.size(), X.cols());
        std::vector<int> train_y(train_rows.size());
        for (std::size_t r = 0; r < train_rows.size(); ++r) {
            const std::size_t src = sample_idx[train_rows[r]];
            for (std::size_t d = 0; d < X.cols(); ++d) train_X(r, d) = X(src, d);
            train_y[r] = sample_y[train_rows[r]];
        }

        const SmoteResult balanced =
            smote(train_X, train_y, cfg.smote_neighbors, derive_seed(cfg.seed, 100 + fold));
        // Provenance audit: every synthetic parent must be a training-fold
        // row. The construction guarantees it; verify anyway so a future
        // refactor cannot silently start leaking held-out data.
        for (const auto& [a, b] : balanced.parents) {
            if (a >= train_rows.size() || b >= train_rows.size()) {
                report.oversampling_clean = false;
            }
        }

        const LinearClassifier clf = LinearClassifier::fit(
            balanced.X, balanced.y, n_classes, cfg.epochs, cfg.learning_rate,
            cfg.regularization, derive_seed(cfg.seed, 200 + fold));

        for (std::size_t s : test_s) {
            const int truth = sample_y[s];
            const int pred = clf.predict(X.row(sample_idx[s]));
            report.confusion(static_cast<std::size_t>(truth),
                             static_cast<std::size_t>(pred)) += 1.0;
        }
    }

    // Metrics from the pooled confusion matrix.
    double correct = 0.0, total = 0.0;
    report.per_class.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        double tp = report.confusion(c, c);
        double fp = 0.0, fn = 0.0, support = 0.0;
        for (std::size_t o = 0; o < n_classes; ++o) {
            total += report.confusion(c, o);
            support += report.confusion(c, o);
            if (o != c) {
                fn += report.confusion(c, o);
                fp += report.confusion(o, c);
            }
        }
        correct += tp;
        auto& m = report.per_class[c];
        m.label = kept_vocab[c];
        m.support = static_cast<std::size_t>(support);
        m.precision = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
        m.recall = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        report.macro_precision += m.precision;
        report.macro_recall += m.recall;
        report.macro_f1 += m.f1;
    }
    report.macro_precision /= static_cast<double>(n_classes);
    report.macro_recall /= static_cast<double>(n_classes);
    report.macro_f1 /= static_cast<double>(n_classes);
    report.accuracy = total > 0.0 ? correct / total : 0.0;
    return report;
}

}  // namespace stockemb
