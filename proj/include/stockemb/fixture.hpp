#pragma once

#include <cstdint>

#include "stockemb/data.hpp"

namespace stockemb {

// Synthetic factor-model universes for tests and demos. Two layouts:
//
// Sectors: every sector has its own independent daily factor; an asset's
// return is its sector factor plus idiosyncratic noise. Recovers a clean
// block structure, so it is the fixture for embedding-quality and
// classification checks.
//
// Hedge: sectors come in anti-correlated pairs. Assets in the first sector
// of a pair load +1 on the pair's factor; assets in the second load with a
// negative ladder (-1, -1.5, -2, -3 cycling). The steep-loading assets show
// the most negative train-window correlation while making the worst
// equal-weight hedges, which is exactly the trap a correlation argmin walks
// into.
struct FixtureConfig {
    enum class Kind { Sectors, Hedge };
    Kind kind = Kind::Sectors;
    std::size_t sectors = 8;      // Sectors layout; Hedge uses 2 * pairs
    std::size_t per_sector = 8;
    std::size_t pairs = 4;        // Hedge layout only
    std::size_t days = 500;       // return observations; prices span days + 1
    double factor_vol = 0.01;     // daily factor standard deviation
    double signal_to_noise = 1.0; // factor_vol / idiosyncratic_vol
    std::uint64_t seed = 42;
};

// Deterministic given the config. Tickers are generated so that their
// alphabetical order matches (sector, position) order.
PriceTable make_fixture(const FixtureConfig& cfg);

}  // namespace stockemb
