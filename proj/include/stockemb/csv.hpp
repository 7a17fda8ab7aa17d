#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace stockemb {

// Minimal CSV support: comma-separated, optional double-quoted fields on
// input, no embedded newlines. That covers every schema this project reads
// or writes.

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0;  // 1-based, for error messages
};

class CsvReader {
  public:
    explicit CsvReader(const std::filesystem::path& path);

    // Advances to the next non-empty row; false at end of file.
    bool next(CsvRow& row);

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
    std::ifstream in_;
    std::size_t line_ = 0;
};

// Splits one CSV line; `line` is used in parse-error messages only.
std::vector<std::string> split_csv_line(const std::string& text, std::size_t line,
                                        const std::filesystem::path& path);

// Shortest decimal form that round-trips a double exactly (17 significant
// digits); used wherever numeric output must be reproducible.
std::string format_full(double v);

// Fixed 6-decimal form for human-facing report columns.
std::string format_fixed(double v);

// Parses a double, requiring the whole field to be consumed.
double parse_double_field(const std::string& field, std::size_t line,
                          const std::filesystem::path& path);

}  // namespace stockemb
