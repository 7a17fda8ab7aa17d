#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stockemb/matrix.hpp"

namespace stockemb {

struct AssetMeta {
    std::size_t index = 0;  // contiguous position in the universe
    std::string ticker;
    std::string sector;
    std::string industry;
};

// Close prices on a shared, strictly increasing date axis. Row i belongs to
// assets[i]; every price is positive. Dates are carried as ISO-8601 strings;
// only their ordering ever matters downstream.
struct PriceTable {
    std::vector<AssetMeta> assets;
    std::vector<std::string> dates;  // length T+1
    Matrix prices;                   // |U| x (T+1)
};

// Daily simple returns; column t is the move from price date t to t+1, and
// dates[t] is the later of the two.
struct ReturnsMatrix {
    std::vector<AssetMeta> assets;
    std::vector<std::string> dates;  // length T
    Matrix returns;                  // |U| x T
};

// Days since 1970-01-01 for a YYYY-MM-DD string; parse failures throw
// ParseError. Used only to order and sanity-check date axes.
long parse_date_ordinal(std::string_view iso);

// Reads the long-format price file (header date,ticker,close) plus the
// metadata file (header ticker,sector,industry). The universe is the set of
// tickers that carry metadata and have a price on every date in the file,
// ordered alphabetically; incomplete or unlabelled tickers are dropped and
// reported through `warnings` (or stderr when null). Prices are taken as
// already split/dividend adjusted -- returns are computed from them as-is.
PriceTable load_prices(const std::filesystem::path& prices_csv,
                       const std::filesystem::path& meta_csv,
                       std::vector<std::string>* warnings = nullptr);

// Simple returns r[i][t] = (p[i][t+1] - p[i][t]) / p[i][t].
ReturnsMatrix compute_returns(const PriceTable& table);

// Chronological split: the first floor(train_fraction * T) columns and the
// rest. No shuffling -- evaluation must stay out-of-time.
std::pair<ReturnsMatrix, ReturnsMatrix> date_split(const ReturnsMatrix& r,
                                                   double train_fraction);

// Index of `ticker` in `assets`; LookupError when absent.
std::size_t asset_index(std::span<const AssetMeta> assets, std::string_view ticker);

}  // namespace stockemb
