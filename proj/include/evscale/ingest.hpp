#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "evscale/gap.hpp"

namespace evscale {

// One joined county row; the unit of everything downstream.
struct CountyRecord {
    std::string fips;  // 5-digit code
    std::int64_t population = 0;
    std::int64_t gas_stations = 0;
    std::int64_t evse_stations = 0;
    std::int64_t evse_ports = 0;
    ChargerLevelCounts evse_levels;
    double evse_power_w = 0.0;  // always county_power_w(evse_levels)
};

struct StationRecord {
    std::string id;
    double longitude = 0.0;  // degrees, WGS84
    double latitude = 0.0;
    std::int64_t level1 = 0;
    std::int64_t level2 = 0;
    std::int64_t dcfast = 0;

    std::int64_t ports() const { return level1 + level2 + dcfast; }
};

struct Ring {
    std::vector<std::array<double, 2>> points;  // (lon, lat), closed: first == last
    bool hole = false;
};

struct CountyShape {
    std::string fips;
    std::vector<Ring> rings;
    // Bounding box over outer rings, used as a containment prefilter.
    double min_lon = 0, min_lat = 0, max_lon = 0, max_lat = 0;

    void finalize_bbox();
    bool bbox_contains(double lon, double lat) const {
        return lon >= min_lon && lon <= max_lon && lat >= min_lat && lat <= max_lat;
    }
};

// --- file parsing ------------------------------------------------------

// CSV with a header naming at least `fips,population`. All rows parse or the
// whole file is rejected. Throws MalformedRow / DuplicateFips / IoError.
std::map<std::string, std::int64_t> parse_population_csv(const std::string& path);

// CSV with header `fips,gas_stations`; counts >= 0.
std::map<std::string, std::int64_t> parse_gas_csv(const std::string& path);

struct StationParse {
    std::vector<StationRecord> stations;
    // (id, reason) for records rejected individually, e.g. bad coordinates.
    std::vector<std::pair<std::string, std::string>> rejected;
};

// JSON array of station objects: id, longitude, latitude and optional
// per-level port counts (absent counts read as 0). Out-of-range coordinates
// reject the record, not the file. Throws MalformedJson.
StationParse parse_stations_json(const std::string& path);

// GeoJSON FeatureCollection of Polygon / MultiPolygon features carrying a
// `fips` property. Rings must be closed with at least 4 vertices.
std::vector<CountyShape> parse_counties_geojson(const std::string& path);

// --- geocoding ---------------------------------------------------------

// Even-odd (ray casting) containment across all rings, so holes subtract.
// Points exactly on an edge count as inside.
bool point_in_polygon(double lon, double lat, const CountyShape& shape);

struct CountyAggregate {
    std::int64_t stations = 0;
    std::int64_t ports = 0;
    ChargerLevelCounts levels;
};

struct GeocodeResult {
    std::map<std::string, CountyAggregate> by_fips;
    std::vector<StationRecord> unmatched;  // reported, never dropped
};

// Assigns each station to at most one county: shapes are tried in ascending
// fips order after a bounding-box prefilter, so border ties resolve to the
// lowest fips deterministically.
GeocodeResult geocode_stations(const std::vector<StationRecord>& stations,
                               const std::vector<CountyShape>& shapes);

// --- joining -----------------------------------------------------------

struct JoinResult {
    std::vector<CountyRecord> records;  // sorted by fips, one per population row
    std::int64_t gas_imputed = 0;       // counties missing from the gas map
    std::int64_t evse_imputed = 0;      // counties with no geocoded stations
};

// The population map is the authoritative county universe; missing gas/EVSE
// entries impute to zero and are counted.
JoinResult join_counties(const std::map<std::string, std::int64_t>& population,
                         const std::map<std::string, std::int64_t>& gas,
                         const GeocodeResult& geocoded);

// Convenience overload of the per-county gap op. With use_observed_gs the
// prediction substitutes the county's observed gasoline count for the fitted
// curve (sensitivity analysis).
CountyGap station_gap(const CountyRecord& county, const ScalingFit& gs_fit,
                      const ParityParams& params, bool use_observed_gs = false);

}  // namespace evscale
