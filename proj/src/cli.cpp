#include "stockemb/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "stockemb/analysis.hpp"
#include "stockemb/classify.hpp"
#include "stockemb/context.hpp"
#include "stockemb/csv.hpp"
#include "stockemb/errors.hpp"
#include "stockemb/fixture.hpp"
#include "stockemb/hedge.hpp"
#include "stockemb/rng.hpp"

namespace stockemb::cli {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    return out;
}

ReturnsMatrix load_returns(const RunConfig& cfg) {
    if (cfg.prices_path.empty() || cfg.meta_path.empty()) {
        throw ArgumentError("--prices and --meta are required for this command");
    }
    const PriceTable table = load_prices(cfg.prices_path, cfg.meta_path);
    return compute_returns(table);
}

fs::path embeddings_file(const RunConfig& cfg) {
    if (!cfg.embeddings_path.empty()) return cfg.embeddings_path;
    return fs::path(cfg.out_dir) / "embeddings.csv";
}

// Context sets + optional co-occurrence for one training variant.
struct TrainInputs {
    std::vector<ContextSet> sets;
    Matrix beta;
};

TrainInputs prepare_inputs(const ReturnsMatrix& r, const TrainConfig& tc) {
    TrainInputs in;
    in.sets = build_context_sets(r, tc.context_size, tc.use_iqr);
    if (tc.use_weighting) {
        in.beta = cooccurrence(in.sets, r.returns.rows(), r.returns.cols());
    }
    return in;
}

Matrix train_variant(const ReturnsMatrix& r, const TrainConfig& tc,
                     std::vector<double>* epoch_loss = nullptr) {
    const TrainInputs in = prepare_inputs(r, tc);
    TrainResult res = train(tc, in.sets, r.returns.rows(),
                            tc.use_weighting ? &in.beta : nullptr);
    if (epoch_loss) *epoch_loss = res.epoch_mean_loss;
    return std::move(res.embeddings);
}

int cmd_ingest(const RunConfig& cfg) {
    std::vector<std::string> warnings;
    const PriceTable table = load_prices(cfg.prices_path, cfg.meta_path, &warnings);
    const ReturnsMatrix r = compute_returns(table);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "assets.csv");
    out << "index,ticker,sector,industry\n";
    std::map<std::string, std::size_t> sectors;
    for (const auto& a : table.assets) {
        out << a.index << "," << a.ticker << "," << a.sector << "," << a.industry << "\n";
        ++sectors[a.sector];
    }
    std::printf("universe: %zu assets, %zu sectors\n", table.assets.size(), sectors.size());
    std::printf("dates: %s .. %s (%zu prices, %zu returns)\n", table.dates.front().c_str(),
                table.dates.back().c_str(), table.dates.size(), r.returns.cols());
    std::printf("dropped: %zu\n", warnings.size());
    return 0;
}

int cmd_train(const RunConfig& cfg, bool dump_contexts) {
    const ReturnsMatrix r = load_returns(cfg);
    fs::create_directories(cfg.out_dir);

    const TrainInputs in = prepare_inputs(r, cfg.train);
    if (dump_contexts) {
        auto out = open_out(fs::path(cfg.out_dir) / "contexts.csv");
        out << "t,target";
        for (std::size_t c = 1; c <= cfg.train.context_size; ++c) out << ",ctx" << c;
        out << "\n";
        for (const auto& s : in.sets) {
            out << s.time << "," << r.assets[s.target].ticker;
            for (std::size_t j : s.context) out << "," << r.assets[j].ticker;
            out << "\n";
        }
    }

    TrainResult res = train(cfg.train, in.sets, r.returns.rows(),
                            cfg.train.use_weighting ? &in.beta : nullptr);
    for (std::size_t e = 0; e < res.epoch_mean_loss.size(); ++e) {
        std::printf("epoch %zu: mean loss %.6f\n", e + 1, res.epoch_mean_loss[e]);
    }
    save_embeddings(res.embeddings, r.assets, embeddings_file(cfg));
    std::printf("saved %zu x %zu embeddings (%zu context sets)\n", res.embeddings.rows(),
                res.embeddings.cols(), in.sets.size());
    return 0;
}

int cmd_knn(const RunConfig& cfg, const std::string& ticker) {
    const Embeddings emb = load_embeddings(embeddings_file(cfg));
    const std::size_t query = asset_index(emb.assets, ticker);
    const Matrix scores = cosine_scores(emb.W);
    const auto neighbours = knn(scores, query, cfg.knn_k);

    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "knn.csv");
    out << "query,rank,ticker,score\n";
    std::printf("%zu nearest to %s:\n", cfg.knn_k, ticker.c_str());
    for (std::size_t i = 0; i < neighbours.size(); ++i) {
        const auto& a = emb.assets[neighbours[i].index];
        out << ticker << "," << i + 1 << "," << a.ticker << ","
            << format_full(neighbours[i].score) << "\n";
        std::printf("  %zu. %-8s %-24s %.4f\n", i + 1, a.ticker.c_str(), a.sector.c_str(),
                    neighbours[i].score);
    }
    return 0;
}

int cmd_analogy(const RunConfig& cfg, const std::string& a, const std::string& b,
                const std::string& c) {
    const Embeddings emb = load_embeddings(embeddings_file(cfg));
    const auto ranked = analogy(emb.W, asset_index(emb.assets, a),
                                asset_index(emb.assets, b), asset_index(emb.assets, c),
                                cfg.knn_k);
    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "analogy.csv");
    out << "a,b,c,rank,ticker,score\n";
    std::printf("%s : %s :: %s : ?\n", a.c_str(), b.c_str(), c.c_str());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const auto& m = emb.assets[ranked[i].index];
        out << a << "," << b << "," << c << "," << i + 1 << "," << m.ticker << ","
            << format_full(ranked[i].score) << "\n";
        std::printf("  %zu. %-8s %-24s %.4f\n", i + 1, m.ticker.c_str(), m.sector.c_str(),
                    ranked[i].score);
    }
    return 0;
}

int cmd_graph(const RunConfig& cfg) {
    const Embeddings emb = load_embeddings(embeddings_file(cfg));
    const auto edges = similarity_graph(emb.W, cfg.graph_threshold);
    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "edges.csv");
    out << "source_ticker,target_ticker,weight\n";
    for (const auto& e : edges) {
        out << emb.assets[e.a].ticker << "," << emb.assets[e.b].ticker << ","
            << format_full(e.score) << "\n";
    }
    std::printf("%zu edges above cosine %.3f\n", edges.size(), cfg.graph_threshold);
    return 0;
}

int cmd_mismatch(const RunConfig& cfg) {
    const Embeddings emb = load_embeddings(embeddings_file(cfg));
    const auto pairs = mismatches(emb.W, emb.assets, cfg.mismatch_threshold);
    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "mismatches.csv");
    out << "ticker_a,sector_a,ticker_b,sector_b,score\n";
    for (const auto& e : pairs) {
        const auto& x = emb.assets[e.a];
        const auto& y = emb.assets[e.b];
        out << x.ticker << "," << x.sector << "," << y.ticker << "," << y.sector << ","
            << format_full(e.score) << "\n";
    }
    std::printf("%zu cross-sector pairs above cosine %.3f\n", pairs.size(),
                cfg.mismatch_threshold);
    return 0;
}

int cmd_classify(const RunConfig& cfg) {
    const Embeddings emb = load_embeddings(embeddings_file(cfg));
    std::vector<std::string> labels;
    labels.reserve(emb.assets.size());
    for (const auto& a : emb.assets) labels.push_back(a.sector);

    ClassifyConfig cc;
    cc.folds = cfg.folds;
    cc.seed = cfg.train.seed;
    const ClassificationReport report = kfold_eval(emb.W, labels, cc);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

    fs::create_directories(cfg.out_dir);
    auto out = open_out(fs::path(cfg.out_dir) / "classification.csv");
    out << "label,support,precision,recall,f1\n";
    std::printf("%-24s %8s %10s %8s %8s\n", "label", "support", "precision", "recall", "f1");
    for (const auto& m : report.per_class) {
        out << m.label << "," << m.support << "," << format_fixed(m.precision) << ","
            << format_fixed(m.recall) << "," << format_fixed(m.f1) << "\n";
        std::printf("%-24s %8zu %10.3f %8.3f %8.3f\n", m.label.c_str(), m.support,
                    m.precision, m.recall, m.f1);
    }
    std::size_t total = 0;
    for (const auto& m : report.per_class) total += m.support;
    out << "macro_avg," << total << "," << format_fixed(report.macro_precision) << ","
        << format_fixed(report.macro_recall) << "," << format_fixed(report.macro_f1) << "\n";
    out << "accuracy," << total << ",,," << format_fixed(report.accuracy) << "\n";
    std::printf("%-24s %8zu %10.3f %8.3f %8.3f\n", "macro_avg", total,
                report.macro_precision, report.macro_recall, report.macro_f1);
    std::printf("accuracy: %.3f over %zu folds\n", report.accuracy, report.folds);
    if (!report.oversampling_clean) {
        std::fprintf(stderr, "error: oversampling provenance check failed\n");
        return 1;
    }
    return 0;
}

// The seven methods of the hedging comparison: three return-similarity
// baselines plus the four embedding variants.
std::vector<ScoredMethod> hedge_methods(const ReturnsMatrix& train_r,
                                        const TrainConfig& base) {
    std::vector<ScoredMethod> methods;
    methods.push_back({"pearson", pearson_scores(train_r.returns)});
    methods.push_back({"spearman", spearman_scores(train_r.returns)});
    // The geometric baseline is a stand-in formula, so its rows carry the
    // proxy label wherever they appear.
    methods.push_back({"geometric_proxy", geometric_scores(train_r.returns)});
    const std::pair<const char*, std::pair<bool, bool>> variants[] = {
        {"embedding", {false, false}},
        {"embedding_weight", {false, true}},
        {"embedding_iqr", {true, false}},
        {"embedding_weight_iqr", {true, true}},
    };
    for (const auto& [name, flags] : variants) {
        TrainConfig tc = base;
        tc.use_iqr = flags.first;
        tc.use_weighting = flags.second;
        methods.push_back({name, cosine_scores(train_variant(train_r, tc))});
    }
    return methods;
}

int cmd_hedge(const RunConfig& cfg) {
    const ReturnsMatrix r = load_returns(cfg);
    const auto [train_r, test_r] = date_split(r, cfg.train_fraction);
    if (test_r.returns.cols() < 2) {
        throw ArgumentError("test window too short; lower --train-fraction");
    }
    std::printf("train %zu days, test %zu days\n", train_r.returns.cols(),
                test_r.returns.cols());
    std::printf("volatility convention: annualized, daily sd x sqrt(252)\n");

    const auto methods = hedge_methods(train_r, cfg.train);
    const auto results = run_experiment(methods, test_r.returns);

    fs::create_directories(cfg.out_dir);
    {
        auto out = open_out(fs::path(cfg.out_dir) / "results.csv");
        out << "method,query_ticker,hedge_ticker,volatility\n";
        for (const auto& res : results) {
            for (std::size_t q = 0; q < res.portfolios.size(); ++q) {
                out << res.method << "," << r.assets[res.portfolios[q].query].ticker << ","
                    << r.assets[res.portfolios[q].hedge].ticker << ","
                    << format_full(res.volatilities[q]) << "\n";
            }
        }
    }
    for (const auto& res : results) {
        auto out = open_out(fs::path(cfg.out_dir) / ("hist_" + res.method + ".csv"));
        out << "bin_low,bin_high,count\n";
        for (const auto& bin : volatility_histogram(res.volatilities)) {
            out << format_full(bin.lo) << "," << format_full(bin.hi) << "," << bin.count
                << "\n";
        }
    }

    // Robustness: repeat with a random pick from each query's least similar
    // pool instead of the argmin.
    const std::size_t pool = std::min(cfg.hedge_pool, r.returns.rows() - 1);
    const RobustnessResult robust = robustness_rerun(methods, test_r.returns,
                                                     cfg.hedge_runs, pool, cfg.train.seed);
    {
        auto out = open_out(fs::path(cfg.out_dir) / "robustness.csv");
        out << "run,method,mean_volatility\n";
        for (std::size_t run = 0; run < robust.run_means.rows(); ++run) {
            for (std::size_t m = 0; m < robust.methods.size(); ++m) {
                out << run + 1 << "," << robust.methods[m] << ","
                    << format_full(robust.run_means(run, m)) << "\n";
            }
        }
    }

    std::vector<MethodSample> samples;
    for (const auto& res : results) samples.emplace_back(res.method, res.volatilities);
    const auto comparisons =
        significance_test(samples, cfg.alpha, 50000, derive_seed(cfg.train.seed, 7));
    {
        auto out = open_out(fs::path(cfg.out_dir) / "pairwise.csv");
        out << "method_a,method_b,mean_a,mean_b,p_value,p_adjusted,reject\n";
        for (const auto& cmp : comparisons) {
            out << cmp.method_a << "," << cmp.method_b << "," << format_full(cmp.mean_a)
                << "," << format_full(cmp.mean_b) << "," << format_full(cmp.p_value) << ","
                << format_full(cmp.p_adjusted) << "," << (cmp.reject ? 1 : 0) << "\n";
        }
    }
    {
        auto out = open_out(fs::path(cfg.out_dir) / "summary.csv");
        out << "method,mean_volatility,p_vs_pearson,significant\n";
        std::printf("%-22s %10s %14s %12s\n", "method", "mean vol", "p vs pearson",
                    "significant");
        for (const auto& res : results) {
            std::string p = "", sig = "", p_short = "";
            for (const auto& cmp : comparisons) {
                if ((cmp.method_a == "pearson" && cmp.method_b == res.method) ||
                    (cmp.method_b == "pearson" && cmp.method_a == res.method)) {
                    p = format_full(cmp.p_adjusted);  // the CSV keeps full precision
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%.4g", cmp.p_adjusted);
                    p_short = buf;
                    sig = cmp.reject ? "1" : "0";
                }
            }
            out << res.method << "," << format_full(res.mean_volatility) << "," << p << ","
                << sig << "\n";
            std::printf("%-22s %9.2f%% %14s %12s\n", res.method.c_str(),
                        100.0 * res.mean_volatility, p_short.empty() ? "-" : p_short.c_str(),
                        sig.empty() ? "-" : sig.c_str());
        }
    }
    return 0;
}

int cmd_report(const RunConfig& cfg) {
    // Full pipeline into one output directory: ingest summary, embeddings,
    // graph artifacts, classification, hedging.
    int rc = cmd_ingest(cfg);
    if (rc == 0) rc = cmd_train(cfg, /*dump_contexts=*/false);
    if (rc == 0) rc = cmd_graph(cfg);
    if (rc == 0) rc = cmd_mismatch(cfg);
    if (rc == 0) rc = cmd_classify(cfg);
    if (rc == 0) rc = cmd_hedge(cfg);
    return rc;
}

int cmd_make_fixture(const RunConfig& cfg, const FixtureConfig& fc) {
    const PriceTable table = make_fixture(fc);
    fs::create_directories(cfg.out_dir);
    auto prices = open_out(fs::path(cfg.out_dir) / "prices.csv");
    prices << "date,ticker,close\n";
    for (std::size_t t = 0; t < table.dates.size(); ++t) {
        for (std::size_t i = 0; i < table.assets.size(); ++i) {
            prices << table.dates[t] << "," << table.assets[i].ticker << ","
                   << format_full(table.prices(i, t)) << "\n";
        }
    }
    auto meta = open_out(fs::path(cfg.out_dir) / "meta.csv");
    meta << "ticker,sector,industry\n";
    for (const auto& a : table.assets) {
        meta << a.ticker << "," << a.sector << "," << a.industry << "\n";
    }
    std::printf("wrote %zu assets x %zu dates under %s\n", table.assets.size(),
                table.dates.size(), cfg.out_dir.c_str());
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    RunConfig cfg;
    FixtureConfig fc;

    CLI::App app{"Stock embeddings from co-occurring daily returns"};
    app.set_config("--config", "", "flat key=value config file; flags take precedence");

    app.add_option("--prices", cfg.prices_path, "price CSV (date,ticker,close)");
    app.add_option("--meta", cfg.meta_path, "metadata CSV (ticker,sector,industry)");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--embeddings", cfg.embeddings_path,
                   "embeddings CSV (default <out>/embeddings.csv)");

    app.add_option("--context-size", cfg.train.context_size, "assets per context set")
        ->check(CLI::PositiveNumber);
    app.add_option("--dimension", cfg.train.dimension, "embedding width")
        ->check(CLI::PositiveNumber);
    app.add_option("--learning-rate", cfg.train.learning_rate, "SGD step size")
        ->check(CLI::PositiveNumber);
    app.add_option("--epochs", cfg.train.epochs, "training epochs")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.train.seed, "RNG seed for every randomized stage");
    app.add_flag("--use-iqr", cfg.train.use_iqr,
                 "drop context sets whose target sat inside the day's IQR");
    app.add_flag("--use-weighting", cfg.train.use_weighting,
                 "weight context members by co-occurrence");
    app.add_flag("!--no-shuffle", cfg.train.shuffle, "keep context sets in build order");

    app.add_option("--train-fraction", cfg.train_fraction,
                   "chronological share of days used for training");
    app.add_option("--k", cfg.knn_k, "neighbours to report")
        ->check(CLI::PositiveNumber);
    app.add_option("--graph-threshold", cfg.graph_threshold, "cosine cut for graph edges");
    app.add_option("--mismatch-threshold", cfg.mismatch_threshold,
                   "cosine cut for cross-sector pairs");
    app.add_option("--pool", cfg.hedge_pool, "dissimilar pool size for robustness reruns")
        ->check(CLI::PositiveNumber);
    app.add_option("--runs", cfg.hedge_runs, "robustness rerun count")
        ->check(CLI::PositiveNumber);
    app.add_option("--alpha", cfg.alpha, "significance level");
    app.add_option("--folds", cfg.folds, "cross-validation folds")
        ->check(CLI::PositiveNumber);

    app.require_subcommand(1);
    auto* ingest = app.add_subcommand("ingest", "validate inputs and report the universe");
    auto* train_cmd = app.add_subcommand("train", "train embeddings and save the CSV");
    bool dump_contexts = false;
    train_cmd->add_flag("--dump-contexts", dump_contexts,
                        "also write the generated context sets");
    std::string ticker, ana_a, ana_b, ana_c;
    auto* knn_cmd = app.add_subcommand("knn", "nearest neighbours of one asset");
    knn_cmd->add_option("--ticker", ticker, "query ticker")->required();
    auto* ana = app.add_subcommand("analogy", "a : b :: c : ?");
    ana->add_option("--a", ana_a)->required();
    ana->add_option("--b", ana_b)->required();
    ana->add_option("--c", ana_c)->required();
    auto* graph = app.add_subcommand("graph", "similarity graph edge list");
    auto* mismatch = app.add_subcommand("mismatch", "high-similarity cross-sector pairs");
    auto* classify = app.add_subcommand("classify", "sector recovery cross-validation");
    auto* hedge = app.add_subcommand("hedge", "out-of-time hedging comparison");
    auto* report = app.add_subcommand("report", "full pipeline into the output directory");

    auto* fixture = app.add_subcommand("make-fixture", "synthetic factor-model dataset");
    fixture->group("");  // internal tool; hidden from --help
    std::string kind = "sectors";
    fixture->add_option("--kind", kind, "sectors | hedge")
        ->check(CLI::IsMember({"sectors", "hedge"}));
    fixture->add_option("--sectors", fc.sectors, "independent sectors");
    fixture->add_option("--per-sector", fc.per_sector, "assets per sector");
    fixture->add_option("--pairs", fc.pairs, "anti-correlated sector pairs");
    fixture->add_option("--days", fc.days, "return observations");
    fixture->add_option("--factor-vol", fc.factor_vol, "daily factor volatility");
    fixture->add_option("--snr", fc.signal_to_noise, "factor vol / idio vol");

    // Shared options live on the app; let every subcommand hand unmatched
    // flags back up so they can be given in either position.
    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("stockemb");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*ingest) return cmd_ingest(cfg);
        if (*train_cmd) return cmd_train(cfg, dump_contexts);
        if (*knn_cmd) return cmd_knn(cfg, ticker);
        if (*ana) return cmd_analogy(cfg, ana_a, ana_b, ana_c);
        if (*graph) return cmd_graph(cfg);
        if (*mismatch) return cmd_mismatch(cfg);
        if (*classify) return cmd_classify(cfg);
        if (*hedge) return cmd_hedge(cfg);
        if (*report) return cmd_report(cfg);
        if (*fixture) {
            fc.kind = (kind == "hedge") ? FixtureConfig::Kind::Hedge
                                        : FixtureConfig::Kind::Sectors;
            fc.seed = cfg.train.seed;
            return cmd_make_fixture(cfg, fc);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

}  // namespace stockemb::cli
