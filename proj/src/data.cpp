#include "stockemb/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iostream>
#include <limits>
#include <unordered_map>

#include "stockemb/csv.hpp"
#include "stockemb/errors.hpp"

namespace stockemb {

namespace {

void emit_warning(std::vector<std::string>* sink, std::string msg) {
    if (sink) {
        sink->push_back(std::move(msg));
    } else {
        std::cerr << "warning: " << msg << "\n";
    }
}

int parse_int(std::string_view s) {
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ParseError("bad date component '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

long parse_date_ordinal(std::string_view iso) {
    // Expect YYYY-MM-DD.
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw ParseError("bad date '" + std::string(iso) + "' (want YYYY-MM-DD)");
    }
    const int y = parse_int(iso.substr(0, 4));
    const int m = parse_int(iso.substr(5, 2));
    const int d = parse_int(iso.substr(8, 2));
    if (m < 1 || m > 12 || d < 1 || d > 31) {
        throw ParseError("bad date '" + std::string(iso) + "'");
    }
    // Howard Hinnant's civil-days formula.
    const int yy = y - (m <= 2);
    const long era = (yy >= 0 ? yy : yy - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(yy - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

PriceTable load_prices(const std::filesystem::path& prices_csv,
                       const std::filesystem::path& meta_csv,
                       std::vector<std::string>* warnings) {
    // Metadata first: ticker -> (sector, industry).
    std::unordered_map<std::string, std::pair<std::string, std::string>> meta;
    {
        CsvReader reader(meta_csv);
        CsvRow row;
        bool first = true;
        while (reader.next(row)) {
            if (first) {
                first = false;
                if (row.fields.size() != 3 || row.fields[0] != "ticker") {
                    throw FormatError(meta_csv.string() +
                                      ": expected header ticker,sector,industry");
                }
                continue;
            }
            if (row.fields.size() != 3) {
                throw ParseError(meta_csv.string() + ":" + std::to_string(row.line) +
                                 ": expected 3 fields, got " +
                                 std::to_string(row.fields.size()));
            }
            const std::string& ticker = row.fields[0];
            if (ticker.empty()) {
                throw ParseError(meta_csv.string() + ":" + std::to_string(row.line) +
                                 ": empty ticker");
            }
            if (!meta.emplace(ticker, std::make_pair(row.fields[1], row.fields[2])).second) {
                throw ValidationError(meta_csv.string() + ":" + std::to_string(row.line) +
                                      ": duplicate ticker '" + ticker + "'");
            }
        }
    }

    // Price rows. Row dates must be non-decreasing through the file (the
    // usual long format groups rows by day); the distinct dates become the
    // shared axis. With that ordering enforced, a duplicate (date, ticker)
    // pair is always adjacent within the ticker's own series.
    std::vector<std::string> dates;
    std::unordered_map<std::string, std::pair<std::size_t, long>> date_info;  // pos, ordinal
    std::unordered_map<std::string, std::vector<std::pair<std::size_t, double>>> series;
    long last_ordinal = std::numeric_limits<long>::min();
    {
        CsvReader reader(prices_csv);
        CsvRow row;
        bool first = true;
        while (reader.next(row)) {
            if (first) {
                first = false;
                if (row.fields.size() != 3 || row.fields[0] != "date") {
                    throw FormatError(prices_csv.string() +
                                      ": expected header date,ticker,close");
                }
                continue;
            }
            if (row.fields.size() != 3) {
                throw ParseError(prices_csv.string() + ":" + std::to_string(row.line) +
                                 ": expected 3 fields, got " +
                                 std::to_string(row.fields.size()));
            }
            const std::string& date = row.fields[0];
            const std::string& ticker = row.fields[1];
            if (ticker.empty()) {
                throw ParseError(prices_csv.string() + ":" + std::to_string(row.line) +
                                 ": empty ticker");
            }
            const double close = parse_double_field(row.fields[2], row.line, prices_csv);
            if (!(close > 0.0) || !std::isfinite(close)) {
                throw ValidationError(prices_csv.string() + ":" + std::to_string(row.line) +
                                      ": non-positive close " + row.fields[2] + " for " +
                                      ticker);
            }
            auto it = date_info.find(date);
            std::size_t pos;
            long ordinal;
            if (it == date_info.end()) {
                try {
                    ordinal = parse_date_ordinal(date);
                } catch (const ParseError& e) {
                    throw ParseError(prices_csv.string() + ":" + std::to_string(row.line) +
                                     ": " + e.what());
                }
                pos = dates.size();
            } else {
                pos = it->second.first;
                ordinal = it->second.second;
            }
            if (ordinal < last_ordinal) {
                throw ValidationError(prices_csv.string() + ":" + std::to_string(row.line) +
                                      ": date " + date + " out of order");
            }
            last_ordinal = ordinal;
            if (it == date_info.end()) {
                dates.push_back(date);
                date_info.emplace(date, std::make_pair(pos, ordinal));
            }
            auto& obs = series[ticker];
            if (!obs.empty() && obs.back().first == pos) {
                throw ValidationError(prices_csv.string() + ":" + std::to_string(row.line) +
                                      ": duplicate observation for (" + date + ", " +
                                      ticker + ")");
            }
            obs.emplace_back(pos, close);
        }
    }
    if (dates.empty()) {
        throw ValidationError(prices_csv.string() + ": no price rows");
    }

    // Universe: alphabetical tickers with full history and metadata.
    std::vector<std::string> tickers;
    tickers.reserve(series.size());
    for (const auto& [ticker, obs] : series) tickers.push_back(ticker);
    std::sort(tickers.begin(), tickers.end());

    PriceTable table;
    table.dates = dates;
    std::vector<const std::vector<std::pair<std::size_t, double>>*> kept;
    for (const auto& ticker : tickers) {
        const auto& obs = series.at(ticker);
        const auto meta_it = meta.find(ticker);
        if (meta_it == meta.end()) {
            emit_warning(warnings, "dropping " + ticker + ": no metadata");
            continue;
        }
        if (obs.size() != dates.size()) {
            emit_warning(warnings, "dropping " + ticker + ": " + std::to_string(obs.size()) +
                                       " of " + std::to_string(dates.size()) + " dates");
            continue;
        }
        AssetMeta am;
        am.index = table.assets.size();
        am.ticker = ticker;
        am.sector = meta_it->second.first;
        am.industry = meta_it->second.second;
        table.assets.push_back(std::move(am));
        kept.push_back(&obs);
    }
    if (table.assets.empty()) {
        throw ValidationError(prices_csv.string() + ": no asset has a complete history");
    }

    table.prices = Matrix(table.assets.size(), dates.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (const auto& [pos, close] : *kept[i]) table.prices(i, pos) = close;
    }
    return table;
}

ReturnsMatrix compute_returns(const PriceTable& table) {
    if (table.dates.size() < 2) {
        throw ValidationError("need at least two dates to compute returns");
    }
    ReturnsMatrix rm;
    rm.assets = table.assets;
    rm.dates.assign(table.dates.begin() + 1, table.dates.end());
    const std::size_t T = table.dates.size() - 1;
    rm.returns = Matrix(table.assets.size(), T);
    for (std::size_t i = 0; i < table.assets.size(); ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            const double prev = table.prices(i, t);
            rm.returns(i, t) = (table.prices(i, t + 1) - prev) / prev;
        }
    }
    return rm;
}

std::pair<ReturnsMatrix, ReturnsMatrix> date_split(const ReturnsMatrix& r,
                                                   double train_fraction) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw ArgumentError("train_fraction must lie in (0, 1)");
    }
    const std::size_t T = r.returns.cols();
    if (T < 2) throw ArgumentError("need at least two return columns to split");
    // The small bias keeps decimal fractions honest: 0.7 * 10 evaluates just
    // below 7 in binary and must still floor to 7.
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(T) + 1e-9));

    auto slice = [&](std::size_t begin, std::size_t end) {
        ReturnsMatrix out;
        out.assets = r.assets;
        out.dates.assign(r.dates.begin() + static_cast<long>(begin),
                         r.dates.begin() + static_cast<long>(end));
        out.returns = Matrix(r.returns.rows(), end - begin);
        for (std::size_t i = 0; i < r.returns.rows(); ++i) {
            for (std::size_t t = begin; t < end; ++t) {
                out.returns(i, t - begin) = r.returns(i, t);
            }
        }
        return out;
    };
    return {slice(0, n_train), slice(n_train, T)};
}

std::size_t asset_index(std::span<const AssetMeta> assets, std::string_view ticker) {
    for (const auto& a : assets) {
        if (a.ticker == ticker) return a.index;
    }
    throw LookupError("unknown ticker '" + std::string(ticker) + "'");
}

}  // namespace stockemb
