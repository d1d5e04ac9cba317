// Generates the bundled 50-county synthetic snapshot (population.csv,
// gas.csv, stations.json, counties.geojson). Deterministic: regenerating
// reproduces the committed files byte for byte.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "evscale/synthetic.hpp"

using evscale::Rng;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kSeed = 20260808;
constexpr int kCols = 10;
constexpr int kRows = 5;
constexpr double kLon0 = -120.0;
constexpr double kLat0 = 30.0;

std::string fips_for(int i) { return std::to_string(10001 + 2 * i); }

// Cell origin of county i on the grid.
std::pair<double, double> cell(int i) {
    return {kLon0 + (i % kCols), kLat0 + (i / kCols)};
}

ordered_json ring_from(const std::vector<std::pair<double, double>>& pts) {
    ordered_json ring = ordered_json::array();
    for (const auto& [x, y] : pts) ring.push_back(ordered_json::array({x, y}));
    return ring;
}

ordered_json county_geometry(int i) {
    const auto [x, y] = cell(i);
    ordered_json geom;
    geom["type"] = "Polygon";
    if (i == 7) {
        // L-shaped (concave) county: full lower bar plus a left tower.
        geom["coordinates"] = ordered_json::array({ring_from({{x, y},
                                                              {x + 1.0, y},
                                                              {x + 1.0, y + 0.5},
                                                              {x + 0.5, y + 0.5},
                                                              {x + 0.5, y + 1.0},
                                                              {x, y + 1.0},
                                                              {x, y}})});
    } else if (i == 13) {
        // Square county with an interior hole.
        geom["coordinates"] = ordered_json::array(
            {ring_from({{x, y}, {x + 1.0, y}, {x + 1.0, y + 1.0}, {x, y + 1.0}, {x, y}}),
             ring_from({{x + 0.4, y + 0.4},
                        {x + 0.6, y + 0.4},
                        {x + 0.6, y + 0.6},
                        {x + 0.4, y + 0.6},
                        {x + 0.4, y + 0.4}})});
    } else {
        geom["coordinates"] = ordered_json::array(
            {ring_from({{x, y}, {x + 1.0, y}, {x + 1.0, y + 1.0}, {x, y + 1.0}, {x, y}})});
    }
    return geom;
}

// A point strictly inside county i, clear of the concave notch and the hole.
std::pair<double, double> point_inside(int i, Rng& rng) {
    const auto [x, y] = cell(i);
    if (i == 7)  // lower bar of the L
        return {x + 0.05 + 0.9 * rng.uniform(), y + 0.05 + 0.4 * rng.uniform()};
    if (i == 13)  // strip left of the hole
        return {x + 0.05 + 0.3 * rng.uniform(), y + 0.05 + 0.9 * rng.uniform()};
    return {x + 0.05 + 0.9 * rng.uniform(), y + 0.05 + 0.9 * rng.uniform()};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: evscale_fixture <out_dir>\n";
        return 1;
    }
    const std::filesystem::path out(argv[1]);
    std::filesystem::create_directories(out);

    Rng rng(kSeed);
    const int n_counties = kCols * kRows;

    std::vector<std::int64_t> populations(n_counties);
    std::vector<std::int64_t> gas_counts(n_counties);
    std::vector<std::int64_t> evse_counts(n_counties);
    for (int i = 0; i < n_counties; ++i) {
        const double ln = std::log(2e3) + (std::log(3e6) - std::log(2e3)) * rng.uniform();
        populations[i] = std::llround(std::exp(ln));
        const double n = static_cast<double>(populations[i]);
        gas_counts[i] = evscale::sample_negbin(rng, 0.02 * std::pow(n, 0.77), 5.0);
        evse_counts[i] = evscale::sample_negbin(rng, 3e-5 * std::pow(n, 1.15), 1.2);
    }

    {
        std::ofstream f(out / "population.csv", std::ios::binary);
        f << "fips,population\n";
        for (int i = 0; i < n_counties; ++i) f << fips_for(i) << ',' << populations[i] << '\n';
    }
    {
        // The last county is deliberately absent so the join imputes it.
        std::ofstream f(out / "gas.csv", std::ios::binary);
        f << "fips,gas_stations\n";
        for (int i = 0; i < n_counties - 1; ++i) f << fips_for(i) << ',' << gas_counts[i] << '\n';
    }
    {
        ordered_json features = ordered_json::array();
        for (int i = 0; i < n_counties; ++i) {
            ordered_json feature;
            feature["type"] = "Feature";
            feature["properties"] = ordered_json{{"fips", fips_for(i)}};
            feature["geometry"] = county_geometry(i);
            features.push_back(feature);
        }
        ordered_json fc;
        fc["type"] = "FeatureCollection";
        fc["features"] = features;
        std::ofstream f(out / "counties.geojson", std::ios::binary);
        f << fc.dump(2) << "\n";
    }
    {
        ordered_json stations = ordered_json::array();
        int next_id = 1;
        auto add_station = [&](double lon, double lat) {
            ordered_json st;
            st["id"] = "st" + std::to_string(next_id++);
            st["longitude"] = lon;
            st["latitude"] = lat;
            const std::int64_t level1 = rng.uniform() < 0.2 ? 1 : 0;
            st["level1"] = level1;
            st["level2"] = 1 + rng.poisson(1.5);
            st["dcfast"] = rng.poisson(0.4);
            stations.push_back(st);
        };
        for (int i = 0; i < n_counties; ++i) {
            for (std::int64_t k = 0; k < evse_counts[i]; ++k) {
                const auto [lon, lat] = point_inside(i, rng);
                add_station(lon, lat);
            }
        }
        // Offshore records with no containing county; ingest must report
        // them as unmatched.
        add_station(-150.0, 20.0);
        add_station(-150.5, 20.5);
        add_station(-151.0, 21.0);
        std::ofstream f(out / "stations.json", std::ios::binary);
        f << stations.dump(2) << "\n";
    }

    std::int64_t total_evse = 0;
    for (auto c : evse_counts) total_evse += c;
    std::cout << "wrote " << n_counties << " counties, " << total_evse
              << " stations (+3 offshore) to " << out.string() << "\n";
    return 0;
}
