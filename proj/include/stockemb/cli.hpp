#pragma once

#include <string>
#include <vector>

#include "stockemb/model.hpp"

namespace stockemb::cli {

// Everything a pipeline run needs, bindable from flags or a flat key=value
// config file (flags win).
struct RunConfig {
    std::string prices_path;
    std::string meta_path;
    std::string out_dir = "out";
    std::string embeddings_path;  // defaults to <out_dir>/embeddings.csv

    TrainConfig train;

    double train_fraction = 0.7;
    std::size_t knn_k = 3;
    double graph_threshold = 0.7;
    double mismatch_threshold = 0.9;
    std::size_t hedge_pool = 25;
    std::size_t hedge_runs = 100;
    double alpha = 0.01;
    std::size_t folds = 5;
};

// Entry point behind main(); args excludes the program name. Returns the
// process exit code. All output is deterministic given flags + seed, so two
// identical invocations write byte-identical files.
int run(const std::vector<std::string>& args);

}  // namespace stockemb::cli
