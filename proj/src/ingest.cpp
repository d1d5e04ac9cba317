#include "evscale/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace evscale {

namespace {

using json = nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Minimal CSV field splitter; handles double-quoted fields with embedded
// commas, which is all the documented snapshot formats need.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Normalizes a county identifier to the 5-digit zero-padded form.
std::string normalize_fips(const std::string& raw, std::size_t line_no) {
    const std::string s = trim(raw);
    if (s.empty() || s.size() > 5 ||
        !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw MalformedRow(line_no, "bad fips code '" + raw + "'");
    return std::string(5 - s.size(), '0') + s;
}

std::int64_t parse_int_field(const std::string& raw, std::size_t line_no, const char* what) {
    const std::string s = trim(raw);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw MalformedRow(line_no, std::string("bad ") + what + " '" + raw + "'");
    return v;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (table.header.empty()) {
            for (auto& f : fields) f = lower(trim(f));
            table.header = std::move(fields);
        } else {
            table.rows.emplace_back(line_no, std::move(fields));
        }
    }
    if (table.header.empty()) throw IoError("'" + path + "' is empty");
    return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name, const std::string& path) {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end())
        throw MalformedRow(1, "'" + path + "' header lacks required column '" + name + "'");
    return static_cast<std::size_t>(it - table.header.begin());
}

std::map<std::string, std::int64_t> parse_fips_count_csv(const std::string& path,
                                                         const std::string& value_column,
                                                         std::int64_t min_value) {
    const CsvTable table = read_csv(path);
    const std::size_t fips_col = column_index(table, "fips", path);
    const std::size_t value_col = column_index(table, value_column, path);
    std::map<std::string, std::int64_t> out;
    for (const auto& [line_no, fields] : table.rows) {
        if (fields.size() <= std::max(fips_col, value_col))
            throw MalformedRow(line_no, "too few fields");
        const std::string fips = normalize_fips(fields[fips_col], line_no);
        const std::int64_t value = parse_int_field(fields[value_col], line_no, value_column.c_str());
        if (value < min_value)
            throw MalformedRow(line_no, value_column + " " + std::to_string(value) +
                                            " below minimum " + std::to_string(min_value));
        if (!out.emplace(fips, value).second) throw DuplicateFips(fips);
    }
    return out;
}

double json_number(const json& v, const char* what) {
    if (!v.is_number()) throw MalformedJson(std::string("expected number for ") + what);
    return v.get<double>();
}

std::int64_t json_count(const json& obj, const char* key) {
    if (!obj.contains(key)) return 0;
    const json& v = obj.at(key);
    if (v.is_null()) return 0;
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw MalformedJson(std::string("charger count '") + key + "' must be a non-negative integer");
    return v.get<std::int64_t>();
}

// Is p on the closed segment [a, b]? Exact collinearity test; the boundary
// rule is "on-edge counts as inside".
bool on_segment(double px, double py, double ax, double ay, double bx, double by) {
    const double cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
    if (cross != 0.0) return false;
    return px >= std::min(ax, bx) && px <= std::max(ax, bx) && py >= std::min(ay, by) &&
           py <= std::max(ay, by);
}

}  // namespace

void CountyShape::finalize_bbox() {
    bool first = true;
    for (const Ring& ring : rings) {
        if (ring.hole) continue;
        for (const auto& p : ring.points) {
            if (first) {
                min_lon = max_lon = p[0];
                min_lat = max_lat = p[1];
                first = false;
            } else {
                min_lon = std::min(min_lon, p[0]);
                max_lon = std::max(max_lon, p[0]);
                min_lat = std::min(min_lat, p[1]);
                max_lat = std::max(max_lat, p[1]);
            }
        }
    }
}

std::map<std::string, std::int64_t> parse_population_csv(const std::string& path) {
    return parse_fips_count_csv(path, "population", 1);
}

std::map<std::string, std::int64_t> parse_gas_csv(const std::string& path) {
    return parse_fips_count_csv(path, "gas_stations", 0);
}

StationParse parse_stations_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedJson("'" + path + "': " + e.what());
    }
    if (!root.is_array()) throw MalformedJson("'" + path + "': expected a JSON array of stations");

    StationParse out;
    for (const json& obj : root) {
        if (!obj.is_object()) throw MalformedJson("station entries must be JSON objects");
        StationRecord rec;
        if (!obj.contains("id")) throw MalformedJson("station entry lacks 'id'");
        rec.id = obj.at("id").is_string() ? obj.at("id").get<std::string>()
                                          : obj.at("id").dump();
        try {
            rec.longitude = json_number(obj.at("longitude"), "longitude");
            rec.latitude = json_number(obj.at("latitude"), "latitude");
            rec.level1 = json_count(obj, "level1");
            rec.level2 = json_count(obj, "level2");
            rec.dcfast = json_count(obj, "dcfast");
        } catch (const json::exception& e) {
            throw MalformedJson("station '" + rec.id + "': " + e.what());
        }
        if (rec.longitude < -180.0 || rec.longitude > 180.0 || rec.latitude < -90.0 ||
            rec.latitude > 90.0) {
            out.rejected.emplace_back(rec.id, "coordinates out of range (" +
                                                  std::to_string(rec.longitude) + ", " +
                                                  std::to_string(rec.latitude) + ")");
            continue;
        }
        out.stations.push_back(std::move(rec));
    }
    return out;
}

std::vector<CountyShape> parse_counties_geojson(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw MalformedJson("'" + path + "': " + e.what());
    }
    if (!root.is_object() || root.value("type", "") != "FeatureCollection" ||
        !root.contains("features"))
        throw MalformedJson("'" + path + "': expected a GeoJSON FeatureCollection");

    auto parse_ring = [](const json& coords, bool hole) {
        Ring ring;
        ring.hole = hole;
        if (!coords.is_array() || coords.size() < 4)
            throw MalformedJson("polygon ring needs at least 4 vertices");
        for (const json& pt : coords) {
            if (!pt.is_array() || pt.size() < 2)
                throw MalformedJson("ring vertex must be [lon, lat]");
            ring.points.push_back({pt[0].get<double>(), pt[1].get<double>()});
        }
        if (ring.points.front() != ring.points.back())
            throw MalformedJson("polygon ring is not closed");
        return ring;
    };

    std::vector<CountyShape> shapes;
    for (const json& feature : root.at("features")) {
        CountyShape shape;
        const json& props = feature.value("properties", json::object());
        if (!props.contains("fips"))
            throw MalformedJson("feature lacks a 'fips' property");
        const json& fips = props.at("fips");
        shape.fips = fips.is_string() ? fips.get<std::string>() : fips.dump();
        try {
            shape.fips = normalize_fips(shape.fips, 0);
        } catch (const MalformedRow&) {
            throw MalformedJson("feature has invalid fips '" + shape.fips + "'");
        }

        const json& geom = feature.value("geometry", json::object());
        const std::string type = geom.value("type", "");
        const json& coords = geom.value("coordinates", json::array());
        if (type == "Polygon") {
            for (std::size_t i = 0; i < coords.size(); ++i)
                shape.rings.push_back(parse_ring(coords[i], i > 0));
        } else if (type == "MultiPolygon") {
            for (const json& poly : coords)
                for (std::size_t i = 0; i < poly.size(); ++i)
                    shape.rings.push_back(parse_ring(poly[i], i > 0));
        } else {
            throw MalformedJson("feature '" + shape.fips + "': unsupported geometry type '" +
                                type + "'");
        }
        if (shape.rings.empty())
            throw MalformedJson("feature '" + shape.fips + "' has no rings");
        shape.finalize_bbox();
        shapes.push_back(std::move(shape));
    }
    return shapes;
}

bool point_in_polygon(double lon, double lat, const CountyShape& shape) {
    // Even-odd rule over all rings; crossing a hole boundary flips parity, so
    // holes subtract without needing the winding flag.
    bool inside = false;
    for (const Ring& ring : shape.rings) {
        const auto& pts = ring.points;
        for (std::size_t i = 0, j = pts.size() - 1; i < pts.size(); j = i++) {
            const double xi = pts[i][0], yi = pts[i][1];
            const double xj = pts[j][0], yj = pts[j][1];
            if (on_segment(lon, lat, xi, yi, xj, yj)) return true;
            if ((yi > lat) != (yj > lat)) {
                const double x_cross = (xj - xi) * (lat - yi) / (yj - yi) + xi;
                if (lon < x_cross) inside = !inside;
            }
        }
    }
    return inside;
}

GeocodeResult geocode_stations(const std::vector<StationRecord>& stations,
                               const std::vector<CountyShape>& shapes) {
    std::vector<const CountyShape*> ordered;
    ordered.reserve(shapes.size());
    for (const CountyShape& s : shapes) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const CountyShape* a, const CountyShape* b) { return a->fips < b->fips; });

    GeocodeResult res;
    for (const StationRecord& st : stations) {
        const CountyShape* match = nullptr;
        for (const CountyShape* shape : ordered) {
            if (!shape->bbox_contains(st.longitude, st.latitude)) continue;
            if (point_in_polygon(st.longitude, st.latitude, *shape)) {
                match = shape;
                break;
            }
        }
        if (!match) {
            res.unmatched.push_back(st);
            continue;
        }
        CountyAggregate& agg = res.by_fips[match->fips];
        agg.stations += 1;
        agg.ports += st.ports();
        agg.levels.level1 += st.level1;
        agg.levels.level2 += st.level2;
        agg.levels.dcfast += st.dcfast;
    }
    return res;
}

JoinResult join_counties(const std::map<std::string, std::int64_t>& population,
                         const std::map<std::string, std::int64_t>& gas,
                         const GeocodeResult& geocoded) {
    JoinResult out;
    out.records.reserve(population.size());
    for (const auto& [fips, pop] : population) {
        CountyRecord rec;
        rec.fips = fips;
        rec.population = pop;
        if (const auto it = gas.find(fips); it != gas.end()) {
            rec.gas_stations = it->second;
        } else {
            ++out.gas_imputed;
        }
        if (const auto it = geocoded.by_fips.find(fips); it != geocoded.by_fips.end()) {
            rec.evse_stations = it->second.stations;
            rec.evse_ports = it->second.ports;
            rec.evse_levels = it->second.levels;
        } else {
            ++out.evse_imputed;
        }
        rec.evse_power_w = county_power_w(rec.evse_levels);
        out.records.push_back(std::move(rec));
    }
    return out;  // std::map iteration already sorted by fips
}

CountyGap station_gap(const CountyRecord& county, const ScalingFit& gs_fit,
                      const ParityParams& params, bool use_observed_gs) {
    if (use_observed_gs) {
        CountyGap g;
        g.fips = county.fips;
        g.population = county.population;
        g.observed_evse = static_cast<double>(county.evse_stations);
        g.predicted_evse =
            predicted_evse_from_observed(static_cast<double>(county.gas_stations), params);
        g.gap = g.predicted_evse - g.observed_evse;
        return g;
    }
    return station_gap(county.fips, county.population,
                       static_cast<double>(county.evse_stations), gs_fit, params);
}

}  // namespace evscale
