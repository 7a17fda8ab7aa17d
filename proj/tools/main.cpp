#include <string>
#include <vector>

#include "stockemb/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stockemb::cli::run(args);
}
