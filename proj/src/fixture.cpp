#include "stockemb/fixture.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "stockemb/errors.hpp"
#include "stockemb/rng.hpp"

namespace stockemb {

namespace {

// Inverse of the civil-days formula: ordinal -> YYYY-MM-DD.
std::string iso_date(long ordinal) {
    long z = ordinal + 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned long>(z - era * 146097);
    const unsigned long yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned long doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned long mp = (5 * doy + 2) / 153;
    const unsigned long d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned long m = mp < 10 ? mp + 3 : mp - 9;
    const long year = m <= 2 ? y + 1 : y;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04ld-%02lu-%02lu", year, m, d);
    return buf;
}

char letter(std::size_t i) { return static_cast<char>('A' + i); }

const double kAntiLadder[] = {-1.0, -1.5, -2.0, -3.0};

}  // namespace

PriceTable make_fixture(const FixtureConfig& cfg) {
    if (cfg.per_sector == 0 || cfg.days < 2) {
        throw ArgumentError("make_fixture: need assets per sector and at least 2 days");
    }
    if (!(cfg.factor_vol > 0.0) || !(cfg.signal_to_noise > 0.0)) {
        throw ArgumentError("make_fixture: factor_vol and signal_to_noise must be positive");
    }
    const std::size_t n_sectors =
        cfg.kind == FixtureConfig::Kind::Sectors ? cfg.sectors : 2 * cfg.pairs;
    if (n_sectors == 0 || n_sectors > 26 || cfg.per_sector > 26) {
        throw ArgumentError("make_fixture: sector/asset counts must be in 1..26");
    }
    const std::size_t n_factors =
        cfg.kind == FixtureConfig::Kind::Sectors ? n_sectors : cfg.pairs;
    const std::size_t n = n_sectors * cfg.per_sector;
    const double idio_vol = cfg.factor_vol / cfg.signal_to_noise;

    PriceTable table;
    for (std::size_t s = 0; s < n_sectors; ++s) {
        for (std::size_t j = 0; j < cfg.per_sector; ++j) {
            AssetMeta meta;
            meta.index = table.assets.size();
            meta.ticker = std::string{letter(s), letter(j)};
            meta.sector = std::string("SEC") + letter(s);
            meta.industry = meta.sector + "-" + (j % 2 == 0 ? "A" : "B");
            table.assets.push_back(std::move(meta));
        }
    }

    // Weekday-agnostic date axis: consecutive calendar days from 2010-01-04.
    const long start = parse_date_ordinal("2010-01-04");
    table.dates.reserve(cfg.days + 1);
    for (std::size_t t = 0; t <= cfg.days; ++t) {
        table.dates.push_back(iso_date(start + static_cast<long>(t)));
    }

    Rng rng(cfg.seed);
    // Factor paths first, then noise, in a fixed order; adding an asset
    // never changes the factors.
    std::vector<std::vector<double>> factors(cfg.days, std::vector<double>(n_factors));
    for (std::size_t t = 0; t < cfg.days; ++t) {
        for (std::size_t f = 0; f < n_factors; ++f) {
            factors[t][f] = cfg.factor_vol * rng.normal();
        }
    }

    table.prices = Matrix(n, cfg.days + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = i / cfg.per_sector;
        const std::size_t j = i % cfg.per_sector;
        double loading = 1.0;
        std::size_t f = s;
        if (cfg.kind == FixtureConfig::Kind::Hedge) {
            f = s / 2;
            if (s % 2 == 1) loading = kAntiLadder[j % 4];
        }
        double price = 100.0;
        table.prices(i, 0) = price;
        for (std::size_t t = 0; t < cfg.days; ++t) {
            const double r = loading * factors[t][f] + idio_vol * rng.normal();
            price *= 1.0 + r;
            table.prices(i, t + 1) = price;
        }
    }
    return table;
}

}  // namespace stockemb
