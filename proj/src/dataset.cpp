#include "evscale/dataset.hpp"

#include <algorithm>

namespace evscale {

void Dataset::validate() const {
    if (rows.size() < 3)
        throw DegenerateData("dataset '" + label + "' has " + std::to_string(rows.size()) +
                             " rows; fits need at least 3");
    for (const Row& r : rows) {
        if (r.population < 1)
            throw DegenerateData("dataset '" + label + "' has population " +
                                 std::to_string(r.population) + "; every N must be >= 1");
        if (r.count < 0)
            throw DegenerateData("dataset '" + label + "' has negative count " +
                                 std::to_string(r.count));
    }
}

std::vector<Row> canonical_rows(const Dataset& data) {
    std::vector<Row> rows = data.rows;
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.population != b.population) return a.population < b.population;
        return a.count < b.count;
    });
    return rows;
}

}  // namespace evscale
