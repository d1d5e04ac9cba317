#include "evscale/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace evscale {

namespace {

using ordered_json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    return out;
}

ordered_json json_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw MalformedJson("'" + path + "': " + e.what());
    }
}

// JSON has no infinity; perfect-fit log-likelihoods serialize as a string tag.
ordered_json encode_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

double decode_double(const ordered_json& v) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        throw MalformedJson("unexpected numeric tag '" + s + "'");
    }
    return v.get<double>();
}

std::int64_t parse_ll(const std::string& s, const std::string& path) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw MalformedRow(0, "'" + path + "': bad integer '" + s + "'");
    return v;
}

double parse_d(const std::string& s, const std::string& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedRow(0, "'" + path + "': bad number '" + s + "'");
    }
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_fit_json(const ScalingFit& fit, const std::string& path) {
    ordered_json j;
    j["family"] = family_name(fit.family);
    j["dataset"] = fit.dataset;
    j["param_names"] = fit.param_names;
    ordered_json params = ordered_json::object();
    for (std::size_t i = 0; i < fit.param_names.size(); ++i)
        params[fit.param_names[i]] = encode_double(fit.params[static_cast<Eigen::Index>(i)]);
    j["params"] = params;
    j["dispersion"] = fit.dispersion ? ordered_json(encode_double(*fit.dispersion))
                                     : ordered_json(nullptr);
    j["log_likelihood"] = encode_double(fit.log_likelihood);
    ordered_json cov = ordered_json::array();
    for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c)
            row.push_back(encode_double(fit.covariance(r, c)));
        cov.push_back(row);
    }
    j["covariance"] = cov;
    j["n_obs"] = fit.n_obs;
    j["n_params"] = fit.n_params;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["dispersion_boundary"] = fit.dispersion_boundary;
    j["degenerate_variance"] = fit.degenerate_variance;
    j["excluded_zeros"] = fit.excluded_zeros;
    j["excluded_fraction"] = encode_double(fit.excluded_fraction);
    ordered_json trace = ordered_json::array();
    for (double v : fit.loglik_trace) trace.push_back(encode_double(v));
    j["loglik_trace"] = trace;

    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

ScalingFit read_fit_json(const std::string& path) {
    const ordered_json j = json_from_file(path);
    ScalingFit fit;
    try {
        fit.family = family_from_name(j.at("family").get<std::string>());
        fit.dataset = j.at("dataset").get<std::string>();
        fit.param_names = j.at("param_names").get<std::vector<std::string>>();
        fit.params.resize(static_cast<Eigen::Index>(fit.param_names.size()));
        for (std::size_t i = 0; i < fit.param_names.size(); ++i)
            fit.params[static_cast<Eigen::Index>(i)] =
                decode_double(j.at("params").at(fit.param_names[i]));
        if (!j.at("dispersion").is_null()) fit.dispersion = decode_double(j.at("dispersion"));
        fit.log_likelihood = decode_double(j.at("log_likelihood"));
        const ordered_json& cov = j.at("covariance");
        const auto rows = static_cast<Eigen::Index>(cov.size());
        fit.covariance.resize(rows, rows == 0 ? 0 : static_cast<Eigen::Index>(cov[0].size()));
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c)
                fit.covariance(r, c) = decode_double(cov[static_cast<std::size_t>(r)]
                                                        [static_cast<std::size_t>(c)]);
        fit.n_obs = j.at("n_obs").get<int>();
        fit.n_params = j.at("n_params").get<int>();
        fit.converged = j.at("converged").get<bool>();
        fit.iterations = j.at("iterations").get<int>();
        fit.dispersion_boundary = j.at("dispersion_boundary").get<bool>();
        fit.degenerate_variance = j.at("degenerate_variance").get<bool>();
        fit.excluded_zeros = j.at("excluded_zeros").get<std::int64_t>();
        fit.excluded_fraction = decode_double(j.at("excluded_fraction"));
        for (const auto& v : j.at("loglik_trace")) fit.loglik_trace.push_back(decode_double(v));
    } catch (const nlohmann::json::exception& e) {
        throw MalformedJson("'" + path + "': " + e.what());
    }
    return fit;
}

void write_counties_csv(const std::vector<CountyRecord>& records, const std::string& path) {
    std::vector<const CountyRecord*> ordered;
    ordered.reserve(records.size());
    for (const auto& r : records) ordered.push_back(&r);
    std::sort(ordered.begin(), ordered.end(),
              [](const CountyRecord* a, const CountyRecord* b) { return a->fips < b->fips; });

    auto out = open_out(path);
    out << "fips,population,gas_stations,evse_stations,evse_ports,"
           "evse_level1,evse_level2,evse_dcfast,evse_power_w\n";
    for (const CountyRecord* r : ordered) {
        out << r->fips << ',' << r->population << ',' << r->gas_stations << ','
            << r->evse_stations << ',' << r->evse_ports << ',' << r->evse_levels.level1 << ','
            << r->evse_levels.level2 << ',' << r->evse_levels.dcfast << ','
            << format_double(r->evse_power_w) << '\n';
    }
}

std::vector<CountyRecord> read_counties_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
    std::vector<CountyRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() != 9) throw MalformedRow(0, "'" + path + "': expected 9 fields");
        CountyRecord r;
        r.fips = f[0];
        r.population = parse_ll(f[1], path);
        r.gas_stations = parse_ll(f[2], path);
        r.evse_stations = parse_ll(f[3], path);
        r.evse_ports = parse_ll(f[4], path);
        r.evse_levels.level1 = parse_ll(f[5], path);
        r.evse_levels.level2 = parse_ll(f[6], path);
        r.evse_levels.dcfast = parse_ll(f[7], path);
        r.evse_power_w = parse_d(f[8], path);
        records.push_back(std::move(r));
    }
    return records;
}

void write_unmatched_json(const std::vector<StationRecord>& unmatched, const std::string& path) {
    ordered_json arr = ordered_json::array();
    for (const StationRecord& s : unmatched) {
        ordered_json j;
        j["id"] = s.id;
        j["longitude"] = s.longitude;
        j["latitude"] = s.latitude;
        j["level1"] = s.level1;
        j["level2"] = s.level2;
        j["dcfast"] = s.dcfast;
        arr.push_back(j);
    }
    auto out = open_out(path);
    out << arr.dump(2) << "\n";
}

Dataset evse_dataset(const std::vector<CountyRecord>& records) {
    Dataset d;
    d.label = "EVSE";
    for (const auto& r : records) d.rows.push_back({r.population, r.evse_stations});
    return d;
}

Dataset gas_dataset(const std::vector<CountyRecord>& records) {
    Dataset d;
    d.label = "Gasoline";
    for (const auto& r : records) d.rows.push_back({r.population, r.gas_stations});
    return d;
}

Dataset read_dataset_csv(const std::string& path, const std::string& label) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
    const auto header = split_line(line);
    if (header.size() < 2 || header[0] != "population" || header[1] != "count")
        throw MalformedRow(1, "'" + path + "': expected header 'population,count'");
    Dataset d;
    d.label = label;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_line(line);
        if (f.size() < 2) throw MalformedRow(line_no, "expected 2 fields");
        d.rows.push_back({parse_ll(f[0], path), parse_ll(f[1], path)});
    }
    return d;
}

void write_comparison_csv(const ModelComparison& cmp, const std::string& path) {
    auto out = open_out(path);
    out << "family,rmsd,r2_mcf,lambda_lr,bic\n";
    for (std::size_t idx : cmp.ranking) {
        const ComparisonEntry& e = cmp.entries[idx];
        out << family_name(e.family) << ',' << format_double(e.rmsd) << ','
            << format_double(e.r2_mcf) << ',' << format_double(e.lambda_lr) << ','
            << format_double(e.bic) << '\n';
    }
}

void write_comparison_json(const ModelComparison& cmp, const std::string& dataset,
                           const std::string& path) {
    ordered_json j;
    j["dataset"] = dataset;
    ordered_json rows = ordered_json::array();
    for (std::size_t idx : cmp.ranking) {
        const ComparisonEntry& e = cmp.entries[idx];
        ordered_json row;
        row["family"] = family_name(e.family);
        row["rmsd"] = encode_double(e.rmsd);
        row["r2_mcf"] = encode_double(e.r2_mcf);
        row["lambda_lr"] = encode_double(e.lambda_lr);
        row["bic"] = encode_double(e.bic);
        row["k"] = e.k;
        row["lrt_df"] = e.lrt_df;
        rows.push_back(row);
    }
    j["ranked"] = rows;
    ordered_json dec = ordered_json::array();
    for (bool b : cmp.decisive) dec.push_back(b);
    j["decisive"] = dec;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

std::string render_comparison_table(const ModelComparison& cmp, const std::string& dataset) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-20s %10s %10s %12s %12s\n", ("[" + dataset + "]").c_str(),
                  "RMSD", "R2_McF", "lambda_LR/1e3", "BIC/1e3");
    os << buf;
    for (std::size_t i = 0; i < cmp.ranking.size(); ++i) {
        const ComparisonEntry& e = cmp.entries[cmp.ranking[i]];
        std::snprintf(buf, sizeof(buf), "%-20s %10.3g %10.3g %12.3g %12.3g%s\n",
                      family_name(e.family).c_str(), e.rmsd, e.r2_mcf, e.lambda_lr / 1e3,
                      e.bic / 1e3,
                      (i + 1 < cmp.ranking.size() && cmp.decisive[i]) ? "   | dBIC > 6" : "");
        os << buf;
    }
    return os.str();
}

void write_gap_csv(const std::vector<CountyGap>& gaps, const std::string& path) {
    auto out = open_out(path);
    out << "fips,population,observed_evse,predicted_evse,gap\n";
    for (const CountyGap& g : gaps) {
        out << g.fips << ',' << g.population << ',' << format_double(g.observed_evse) << ','
            << format_double(g.predicted_evse) << ',' << format_double(g.gap) << '\n';
    }
}

void write_gap_summary_json(const std::vector<CountyGap>& gaps, const ParityParams& params,
                            const std::string& path) {
    double total_gap = 0.0;
    std::int64_t at_parity = 0;
    for (const CountyGap& g : gaps) {
        total_gap += g.gap;
        if (g.gap <= 0.0) ++at_parity;
    }
    ordered_json j;
    j["counties"] = gaps.size();
    j["total_gap"] = encode_double(total_gap);
    j["counties_at_parity"] = at_parity;
    j["p_evse_w"] = params.p_evse_w;
    j["pumps_per_station"] = params.pumps_per_station;
    j["ports_per_station"] = params.ports_per_station;
    j["consumption_ratio"] = params.consumption_ratio;
    j["pump_power_w"] = pump_power_w(params);
    j["parity_ratio"] = parity_ratio(params);
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_meanfield_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    auto out = open_out(path);
    out << "power_w,alpha,v_mps,vbar_mps\n";
    for (const SweepRow& r : rows) {
        out << format_double(r.power_w) << ',' << format_double(r.alpha) << ','
            << format_double(r.v_mps) << ',' << format_double(r.vbar_mps) << '\n';
    }
}

}  // namespace evscale
