#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "stockemb/analysis.hpp"
#include "stockemb/classify.hpp"
#include "stockemb/cli.hpp"
#include "stockemb/context.hpp"
#include "stockemb/data.hpp"
#include "stockemb/fixture.hpp"
#include "stockemb/hedge.hpp"
#include "stockemb/matrix.hpp"
#include "stockemb/model.hpp"

namespace py = pybind11;
using namespace stockemb;

namespace {

Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::memcpy(m.data(), a.data(), sizeof(double) * m.rows() * m.cols());
    return m;
}

py::array_t<double> from_matrix(const Matrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    std::memcpy(a.mutable_data(), m.data(), sizeof(double) * m.rows() * m.cols());
    return a;
}

using PySet = std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>;

std::vector<ContextSet> to_sets(const std::vector<PySet>& raw) {
    std::vector<ContextSet> sets;
    sets.reserve(raw.size());
    for (const auto& [time, target, members] : raw)
        sets.push_back({target, time, members});
    return sets;
}

std::vector<PySet> from_sets(const std::vector<ContextSet>& sets) {
    std::vector<PySet> raw;
    raw.reserve(sets.size());
    for (const auto& s : sets) raw.emplace_back(s.time, s.target, s.context);
    return raw;
}

TrainConfig make_config(std::size_t context_size, std::size_t dimension,
                        double learning_rate, std::size_t epochs, std::uint64_t seed,
                        bool use_iqr, bool use_weighting, bool shuffle) {
    TrainConfig cfg;
    cfg.context_size = context_size;
    cfg.dimension = dimension;
    cfg.learning_rate = learning_rate;
    cfg.epochs = epochs;
    cfg.seed = seed;
    cfg.use_iqr = use_iqr;
    cfg.use_weighting = use_weighting;
    cfg.shuffle = shuffle;
    return cfg;
}

py::array_t<double> scores_or_raise(
    Matrix (*builder)(const Matrix&, std::vector<std::string>*), const Matrix& input,
    std::vector<std::string>& warnings) {
    return from_matrix(builder(input, &warnings));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Stock embeddings from daily-return co-movement: training, "
              "similarity analysis, sector classification and hedge evaluation.";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<UndefinedSimilarity>(m, "UndefinedSimilarity",
                                                PyExc_ArithmeticError);

    m.def(
        "load_returns",
        [](const std::string& prices, const std::string& meta) {
            std::vector<std::string> warnings;
            PriceTable table = load_prices(prices, meta, &warnings);
            ReturnsMatrix r = compute_returns(table);
            py::dict out;
            py::list tickers, sectors, industries;
            for (const auto& a : r.assets) {
                tickers.append(a.ticker);
                sectors.append(a.sector);
                industries.append(a.industry);
            }
            out["tickers"] = tickers;
            out["sectors"] = sectors;
            out["industries"] = industries;
            out["dates"] = r.dates;
            out["returns"] = from_matrix(r.returns);
            out["warnings"] = warnings;
            return out;
        },
        py::arg("prices_csv"), py::arg("meta_csv"),
        "Load a price history + metadata pair and convert to daily simple returns.");

    m.def(
        "split_point",
        [](std::size_t days, double fraction) {
            ReturnsMatrix r;
            r.returns = Matrix(1, days);
            r.dates.resize(days);
            auto [train, test] = date_split(r, fraction);
            return train.dates.size();
        },
        py::arg("days"), py::arg("fraction"),
        "Number of leading days a chronological train/test split assigns to "
        "the training window.");

    m.def(
        "context_sets",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& returns,
           std::size_t count, bool apply_iqr) {
            ReturnsMatrix r;
            r.returns = to_matrix(returns);
            r.assets.resize(r.returns.rows());
            r.dates.resize(r.returns.cols());
            return from_sets(build_context_sets(r, count, apply_iqr));
        },
        py::arg("returns"), py::arg("count"), py::arg("apply_iqr") = false,
        "All (time, target, members) context sets for an asset-by-day return "
        "matrix.");

    m.def(
        "cooccurrence",
        [](const std::vector<PySet>& sets, std::size_t universe, std::size_t days) {
            return from_matrix(stockemb::cooccurrence(to_sets(sets), universe, days));
        },
        py::arg("sets"), py::arg("universe"), py::arg("days"));

    m.def(
        "train",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& returns,
           std::size_t context_size, std::size_t dimension, double learning_rate,
           std::size_t epochs, std::uint64_t seed, bool use_iqr, bool use_weighting,
           bool shuffle) {
            ReturnsMatrix r;
            r.returns = to_matrix(returns);
            r.assets.resize(r.returns.rows());
            r.dates.resize(r.returns.cols());
            TrainConfig cfg = make_config(context_size, dimension, learning_rate, epochs,
                                          seed, use_iqr, use_weighting, shuffle);
            auto sets = build_context_sets(r, cfg.context_size, cfg.use_iqr);
            Matrix beta;
            const Matrix* beta_ptr = nullptr;
            if (cfg.use_weighting) {
                beta = stockemb::cooccurrence(sets, r.returns.rows(), r.returns.cols());
                beta_ptr = &beta;
            }
            TrainResult res = stockemb::train(cfg, sets, r.returns.rows(), beta_ptr);
            return py::make_tuple(from_matrix(res.embeddings), res.epoch_mean_loss);
        },
        py::arg("returns"), py::arg("context_size") = 3, py::arg("dimension") = 20,
        py::arg("learning_rate") = 0.025, py::arg("epochs") = 10, py::arg("seed") = 42,
        py::arg("use_iqr") = false, py::arg("use_weighting") = false,
        py::arg("shuffle") = true,
        "Train embeddings on a return matrix; returns (weights, per-epoch mean "
        "loss).");

    m.def(
        "cosine",
        [](const std::vector<double>& u, const std::vector<double>& v) {
            return stockemb::cosine(u, v);
        },
        py::arg("u"), py::arg("v"));

    m.def(
        "score_matrix",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& input,
           const std::string& method) {
            std::vector<std::string> warnings;
            Matrix in = to_matrix(input);
            py::array_t<double> scores;
            if (method == "cosine")
                scores = scores_or_raise(&cosine_scores, in, warnings);
            else if (method == "pearson")
                scores = scores_or_raise(&pearson_scores, in, warnings);
            else if (method == "spearman")
                scores = scores_or_raise(&spearman_scores, in, warnings);
            else if (method == "geometric")
                scores = scores_or_raise(&geometric_scores, in, warnings);
            else
                throw std::invalid_argument("unknown method '" + method + "'");
            return py::make_tuple(scores, warnings);
        },
        py::arg("input"), py::arg("method"),
        "Pairwise similarity scores. 'cosine' expects embeddings; 'pearson', "
        "'spearman' and 'geometric' expect training-window returns.");

    m.def(
        "nearest",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& scores,
           std::size_t query, std::size_t k) {
            std::vector<std::pair<std::size_t, double>> out;
            for (const auto& r : knn(to_matrix(scores), query, k))
                out.emplace_back(r.index, r.score);
            return out;
        },
        py::arg("scores"), py::arg("query"), py::arg("k"));

    m.def(
        "analogy",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& W,
           std::size_t a, std::size_t b, std::size_t c, std::size_t k) {
            std::vector<std::pair<std::size_t, double>> out;
            for (const auto& r : stockemb::analogy(to_matrix(W), a, b, c, k))
                out.emplace_back(r.index, r.score);
            return out;
        },
        py::arg("W"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("k"));

    m.def(
        "similarity_edges",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& W,
           double threshold) {
            std::vector<std::tuple<std::size_t, std::size_t, double>> out;
            for (const auto& e : similarity_graph(to_matrix(W), threshold))
                out.emplace_back(e.a, e.b, e.score);
            return out;
        },
        py::arg("W"), py::arg("threshold"));

    m.def(
        "smote",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& X,
           const std::vector<int>& y, std::size_t k_neighbors, std::uint64_t seed) {
            SmoteResult res = stockemb::smote(to_matrix(X), y, k_neighbors, seed);
            return py::make_tuple(from_matrix(res.X), res.y, res.original_count,
                                  res.parents);
        },
        py::arg("X"), py::arg("y"), py::arg("k_neighbors") = 5, py::arg("seed") = 42,
        "Balance classes by interpolated oversampling; returns (X, y, "
        "original_count, parents).");

    m.def(
        "classify",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& X,
           const std::vector<std::string>& labels, std::size_t folds,
           std::size_t smote_neighbors, std::size_t epochs, double learning_rate,
           double regularization, std::uint64_t seed) {
            ClassifyConfig cfg;
            cfg.folds = folds;
            cfg.smote_neighbors = smote_neighbors;
            cfg.epochs = epochs;
            cfg.learning_rate = learning_rate;
            cfg.regularization = regularization;
            cfg.seed = seed;
            ClassificationReport rep = kfold_eval(to_matrix(X), labels, cfg);
            py::dict out;
            out["folds"] = rep.folds;
            out["accuracy"] = rep.accuracy;
            out["macro_precision"] = rep.macro_precision;
            out["macro_recall"] = rep.macro_recall;
            out["macro_f1"] = rep.macro_f1;
            py::list per_class;
            for (const auto& c : rep.per_class) {
                py::dict d;
                d["label"] = c.label;
                d["support"] = c.support;
                d["precision"] = c.precision;
                d["recall"] = c.recall;
                d["f1"] = c.f1;
                per_class.append(d);
            }
            out["per_class"] = per_class;
            out["confusion"] = from_matrix(rep.confusion);
            out["oversampling_clean"] = rep.oversampling_clean;
            out["warnings"] = rep.warnings;
            return out;
        },
        py::arg("X"), py::arg("labels"), py::arg("folds") = 5,
        py::arg("smote_neighbors") = 5, py::arg("epochs") = 200,
        py::arg("learning_rate") = 0.01, py::arg("regularization") = 1e-3,
        py::arg("seed") = 42,
        "Stratified k-fold label recovery from feature vectors.");

    m.def(
        "hedge_experiment",
        [](const std::vector<std::pair<std::string, py::array_t<
               double, py::array::c_style | py::array::forcecast>>>& methods,
           const py::array_t<double, py::array::c_style | py::array::forcecast>&
               test_returns) {
            std::vector<ScoredMethod> scored;
            for (const auto& [name, arr] : methods) scored.push_back({name, to_matrix(arr)});
            py::list out;
            for (const auto& res : run_experiment(scored, to_matrix(test_returns))) {
                py::dict d;
                d["method"] = res.method;
                std::vector<std::pair<std::size_t, std::size_t>> pairs;
                for (const auto& p : res.portfolios) pairs.emplace_back(p.query, p.hedge);
                d["pairs"] = pairs;
                d["volatilities"] = res.volatilities;
                d["mean_volatility"] = res.mean_volatility;
                out.append(d);
            }
            return out;
        },
        py::arg("methods"), py::arg("test_returns"),
        "Least-similar hedge per asset per method, evaluated on held-out "
        "returns.");

    m.def(
        "significance",
        [](const std::vector<std::pair<std::string, std::vector<double>>>& samples,
           double alpha, std::size_t resamples, std::uint64_t seed) {
            py::list out;
            std::vector<MethodSample> in(samples.begin(), samples.end());
            for (const auto& c : significance_test(in, alpha, resamples, seed)) {
                py::dict d;
                d["method_a"] = c.method_a;
                d["method_b"] = c.method_b;
                d["mean_a"] = c.mean_a;
                d["mean_b"] = c.mean_b;
                d["p_value"] = c.p_value;
                d["p_adjusted"] = c.p_adjusted;
                d["reject"] = c.reject;
                out.append(d);
            }
            return out;
        },
        py::arg("samples"), py::arg("alpha") = 0.01, py::arg("resamples") = 50000,
        py::arg("seed") = 42,
        "All-pairs permutation test of mean differences with Holm correction.");

    m.def(
        "make_fixture",
        [](const std::string& kind, std::size_t sectors, std::size_t per_sector,
           std::size_t pairs, std::size_t days, double factor_vol,
           double signal_to_noise, std::uint64_t seed) {
            FixtureConfig fc;
            if (kind == "sectors")
                fc.kind = FixtureConfig::Kind::Sectors;
            else if (kind == "hedge")
                fc.kind = FixtureConfig::Kind::Hedge;
            else
                throw std::invalid_argument("kind must be 'sectors' or 'hedge'");
            fc.sectors = sectors;
            fc.per_sector = per_sector;
            fc.pairs = pairs;
            fc.days = days;
            fc.factor_vol = factor_vol;
            fc.signal_to_noise = signal_to_noise;
            fc.seed = seed;
            PriceTable table = make_fixture(fc);
            py::dict out;
            py::list tickers, sectors_out, industries;
            for (const auto& a : table.assets) {
                tickers.append(a.ticker);
                sectors_out.append(a.sector);
                industries.append(a.industry);
            }
            out["tickers"] = tickers;
            out["sectors"] = sectors_out;
            out["industries"] = industries;
            out["dates"] = table.dates;
            out["prices"] = from_matrix(table.prices);
            return out;
        },
        py::arg("kind") = "sectors", py::arg("sectors") = 8, py::arg("per_sector") = 8,
        py::arg("pairs") = 4, py::arg("days") = 500, py::arg("factor_vol") = 0.01,
        py::arg("signal_to_noise") = 1.0, py::arg("seed") = 42,
        "Synthetic factor-model price universe for demos and tests.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) { return cli::run(args); },
        py::arg("args"),
        "Run the command-line pipeline in-process; returns the exit code.");
}
