#include "stockemb/csv.hpp"

#include <cstdio>
#include <cstdlib>

#include "stockemb/errors.hpp"

namespace stockemb {

CsvReader::CsvReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) {
        throw ParseError("cannot open " + path.string());
    }
}

bool CsvReader::next(CsvRow& row) {
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (!text.empty() && text.back() == '\r') text.pop_back();
        if (text.empty()) continue;
        row.fields = split_csv_line(text, line_, path_);
        row.line = line_;
        return true;
    }
    return false;
}

std::vector<std::string> split_csv_line(const std::string& text, std::size_t line,
                                        const std::filesystem::path& path) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {  // escaped quote
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) {
        throw ParseError(path.string() + ":" + std::to_string(line) + ": unterminated quote");
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

double parse_double_field(const std::string& field, std::size_t line,
                          const std::filesystem::path& path) {
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ParseError(path.string() + ":" + std::to_string(line) +
                         ": not a number: '" + field + "'");
    }
    return v;
}

}  // namespace stockemb
