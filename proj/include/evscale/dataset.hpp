#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evscale/errors.hpp"

namespace evscale {

// One region: population N and a station count Y.
struct Row {
    std::int64_t population = 0;  // N >= 1
    std::int64_t count = 0;       // Y >= 0
};

// A count dataset for scaling-law fits. Row order never affects fitted
// quantities; fitting routines re-sort rows into a canonical order internally
// so estimates are bit-identical under permutation.
struct Dataset {
    std::vector<Row> rows;
    std::string label;  // e.g. "EVSE", "Gasoline"

    // Throws DegenerateData unless every N >= 1, every Y >= 0 and there are
    // at least 3 rows.
    void validate() const;

    std::size_t size() const { return rows.size(); }
};

// Rows sorted by (population, count); the canonical evaluation order.
std::vector<Row> canonical_rows(const Dataset& data);

}  // namespace evscale
