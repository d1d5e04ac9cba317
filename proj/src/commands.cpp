#include "evscale/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "evscale/ingest.hpp"
#include "evscale/io.hpp"
#include "evscale/meanfield.hpp"
#include "evscale/stats.hpp"

namespace evscale::cmd {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::string slug(const std::string& label) {
    std::string s;
    for (char c : label)
        s += std::isalnum(static_cast<unsigned char>(c))
                 ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
                 : '_';
    return s;
}

// Resolves --dataset for fit/compare: loads county records or a plain CSV.
Dataset load_dataset(const std::string& dataset, const std::string& input,
                     const std::string& label) {
    if (dataset == "evse") return evse_dataset(read_counties_csv(input));
    if (dataset == "gas") return gas_dataset(read_counties_csv(input));
    if (dataset == "csv") return read_dataset_csv(input, label);
    if (dataset == "synthetic") return read_dataset_csv(input, "Synthetic");
    throw Error("unknown dataset '" + dataset + "' (expected evse, gas, csv or synthetic)");
}

struct FamilyPlan {
    std::vector<Family> main;
    std::vector<NullFamily> nulls;
};

FamilyPlan plan_families(const std::string& family) {
    FamilyPlan plan;
    auto add = [&](Family f) {
        plan.main.push_back(f);
        switch (f) {
            case Family::PowerLawPoisson: plan.nulls.push_back(NullFamily::Poisson); break;
            case Family::PowerLawNegBin: plan.nulls.push_back(NullFamily::NegBin); break;
            case Family::GaussianLinear:
            case Family::GaussianQuadratic: plan.nulls.push_back(NullFamily::Gaussian); break;
            default: break;  // log-log OLS has no null counterpart
        }
    };
    if (family == "all") {
        add(Family::PowerLawPoisson);
        add(Family::PowerLawNegBin);
        add(Family::GaussianLinear);
        add(Family::GaussianQuadratic);
        add(Family::LogLogOLS);
    } else if (family == "poisson") {
        add(Family::PowerLawPoisson);
    } else if (family == "nb") {
        add(Family::PowerLawNegBin);
    } else if (family == "linear") {
        add(Family::GaussianLinear);
    } else if (family == "quadratic") {
        add(Family::GaussianQuadratic);
    } else if (family == "loglog") {
        add(Family::LogLogOLS);
    } else {
        throw Error("unknown family '" + family +
                    "' (expected poisson, nb, linear, quadratic, loglog or all)");
    }
    std::sort(plan.nulls.begin(), plan.nulls.end());
    plan.nulls.erase(std::unique(plan.nulls.begin(), plan.nulls.end()), plan.nulls.end());
    return plan;
}

ScalingFit fit_family(Family f, const Dataset& data, const FitOptions& opts) {
    switch (f) {
        case Family::PowerLawPoisson: return fit_powerlaw_poisson(data, opts);
        case Family::PowerLawNegBin: return fit_powerlaw_negbin(data, opts);
        case Family::GaussianLinear: return fit_gaussian_linear(data);
        case Family::GaussianQuadratic: return fit_gaussian_quadratic(data);
        case Family::LogLogOLS: return fit_loglog_ols(data);
        default: throw Error("fit_family: " + family_name(f) + " is not a main family");
    }
}

// Fits the requested families plus nulls and writes one JSON per fit.
// Returns the names of families that failed to converge.
std::vector<std::string> fit_and_write(const Dataset& data, const FamilyPlan& plan,
                                       const FitOptions& opts, const std::string& out_dir,
                                       std::ostream& log) {
    const std::string ds = slug(data.label);
    std::vector<std::string> unconverged;
    auto emit = [&](const ScalingFit& fit) {
        const std::string path = join_path(out_dir, ds + "_" + family_name(fit.family) + ".json");
        write_fit_json(fit, path);
        log << "wrote " << path << " (logL=" << format_double(fit.log_likelihood)
            << (fit.converged ? "" : ", NOT CONVERGED") << ")\n";
        if (fit.converged && fit.has_param("beta")) {
            try {
                const WaldResult w = wald_test(fit, 1.0);
                const auto [lo, hi] = confidence_interval(fit, 0.95);
                char line[160];
                std::snprintf(line, sizeof(line),
                              "  beta=%.4g SE=%.2g 95%% CI [%.4g, %.4g]  W(beta=1)=%.3g p=%s\n",
                              w.beta_hat, w.se, lo, hi, w.w, w.format_p().c_str());
                log << line;
            } catch (const MissingSE&) {
                // degenerate covariance (perfect log-log fit); nothing to report
            }
        }
        if (!fit.converged) unconverged.push_back(family_name(fit.family));
    };
    for (Family f : plan.main) emit(fit_family(f, data, opts));
    for (NullFamily nf : plan.nulls) emit(fit_null(nf, data, opts));
    return unconverged;
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < points; ++i)
        grid.push_back(std::exp(llo + (lhi - llo) * i / (points - 1)));
    return grid;
}

void write_manifest(const std::vector<std::pair<std::string, std::string>>& figures,
                    const std::string& path) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [figure, file] : figures) {
        nlohmann::ordered_json e;
        e["figure"] = figure;
        e["file"] = file;
        arr.push_back(e);
    }
    j["figures"] = arr;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

}  // namespace

std::vector<double> parse_alpha_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        double lo = 0, hi = 0;
        int points = 0;
        if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &points) != 3 || points < 1)
            throw Error("bad alpha grid '" + spec + "' (expected lo:hi:points)");
        for (int i = 0; i < points; ++i)
            grid.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));
    } else {
        std::string cur;
        std::istringstream ss(spec);
        while (std::getline(ss, cur, ',')) {
            if (cur.empty()) continue;
            grid.push_back(std::stod(cur));
        }
    }
    if (grid.empty()) throw Error("empty alpha grid");
    for (double a : grid)
        if (!(a > 0.0 && a < 1.0))
            throw AlphaOutOfRange("alpha grid value " + std::to_string(a) +
                                  " outside the open interval (0, 1)");
    return grid;
}

void run_ingest(const IngestArgs& args, std::ostream& log) {
    ensure_dir(args.out_dir);
    const auto population = parse_population_csv(args.population_csv);
    const auto gas = parse_gas_csv(args.gas_csv);
    const StationParse stations = parse_stations_json(args.stations_json);
    const auto shapes = parse_counties_geojson(args.counties_geojson);

    const GeocodeResult geocoded = geocode_stations(stations.stations, shapes);
    const JoinResult joined = join_counties(population, gas, geocoded);

    write_counties_csv(joined.records, join_path(args.out_dir, "counties.csv"));
    write_unmatched_json(geocoded.unmatched, join_path(args.out_dir, "unmatched.json"));

    std::int64_t matched = 0;
    for (const auto& [fips, agg] : geocoded.by_fips) matched += agg.stations;
    log << "counties: " << joined.records.size() << "\n"
        << "stations parsed: " << stations.stations.size() << " (rejected "
        << stations.rejected.size() << ")\n"
        << "stations matched: " << matched << ", unmatched: " << geocoded.unmatched.size() << "\n"
        << "imputed zero gas counts: " << joined.gas_imputed
        << ", zero EVSE counts: " << joined.evse_imputed << "\n";
    for (const auto& [id, reason] : stations.rejected)
        log << "rejected station " << id << ": " << reason << "\n";
}

void run_fit(const FitArgs& args, std::ostream& log) {
    ensure_dir(args.out_dir);
    args.options.validate();
    Dataset data;
    if (args.dataset == "synthetic") {
        data = sample_negbin_dataset(args.synth);
        // Persist the draw so downstream commands and reruns see the same rows.
        std::ofstream csv(join_path(args.out_dir, "synthetic.csv"), std::ios::binary);
        if (!csv) throw IoError("cannot write synthetic.csv");
        csv << "population,count\n";
        for (const Row& r : data.rows) csv << r.population << ',' << r.count << '\n';
        log << "sampled synthetic dataset: n=" << data.rows.size() << " seed=" << args.synth.seed
            << "\n";
    } else {
        data = load_dataset(args.dataset, args.input, args.label);
    }

    const FamilyPlan plan = plan_families(args.family);
    const auto unconverged = fit_and_write(data, plan, args.options, args.out_dir, log);
    if (!unconverged.empty()) {
        std::string names;
        for (const auto& n : unconverged) names += (names.empty() ? "" : ", ") + n;
        throw UnconvergedFit("fits did not converge: " + names);
    }
}

void run_compare(const CompareArgs& args, std::ostream& log) {
    ensure_dir(args.out_dir);
    const Dataset data = load_dataset(args.dataset, args.input, args.label);
    const std::string ds = slug(data.label);

    std::vector<ScalingFit> fits;
    for (Family f : {Family::PowerLawPoisson, Family::PowerLawNegBin, Family::GaussianLinear,
                     Family::GaussianQuadratic}) {
        const std::string path = join_path(args.fits_dir, ds + "_" + family_name(f) + ".json");
        if (fs::exists(path)) fits.push_back(read_fit_json(path));
    }
    if (fits.empty())
        throw MissingFit("no fits for dataset '" + data.label + "' under '" + args.fits_dir + "'");

    std::map<Family, ScalingFit> nulls;
    for (Family f : {Family::NullPoisson, Family::NullNegBin, Family::NullGaussian}) {
        const std::string path = join_path(args.fits_dir, ds + "_" + family_name(f) + ".json");
        if (fs::exists(path)) nulls.emplace(f, read_fit_json(path));
    }

    const ModelComparison cmp = compare_models(fits, nulls, data);
    write_comparison_csv(cmp, join_path(args.out_dir, "comparison_" + ds + ".csv"));
    write_comparison_json(cmp, data.label, join_path(args.out_dir, "comparison_" + ds + ".json"));
    log << render_comparison_table(cmp, data.label);
}

void run_gap(const GapArgs& args, std::ostream& log) {
    ensure_dir(args.out_dir);
    args.parity.validate();
    const auto records = read_counties_csv(args.input);
    if (records.empty()) throw DegenerateData("no county records in '" + args.input + "'");
    const ScalingFit gs_fit = read_fit_json(args.gs_fit);
    if (!gs_fit.has_param("beta"))
        throw MissingFit("'" + args.gs_fit + "' is not a power-law fit");
    if (!gs_fit.converged) throw UnconvergedFit("'" + args.gs_fit + "' did not converge");

    std::vector<CountyGap> gaps;
    gaps.reserve(records.size());
    for (const CountyRecord& rec : records)
        gaps.push_back(station_gap(rec, gs_fit, args.parity, args.use_observed_gs));

    write_gap_csv(gaps, join_path(args.out_dir, "county_gap.csv"));
    write_gap_summary_json(gaps, args.parity, join_path(args.out_dir, "gap_summary.json"));

    double total = 0.0;
    std::int64_t at_parity = 0;
    for (const CountyGap& g : gaps) {
        total += g.gap;
        if (g.gap <= 0.0) ++at_parity;
    }
    log << "counties: " << gaps.size() << ", total station gap: " << format_double(total)
        << ", counties at/above parity: " << at_parity << "\n"
        << "pump power: " << format_power_mw(pump_power_w(args.parity)) << ", parity ratio: "
        << parity_ratio(args.parity) << " (" << std::llround(parity_ratio(args.parity))
        << " ports per pump)\n";
}

void run_meanfield(const MeanfieldArgs& args, std::ostream& log) {
    ensure_dir(args.out_dir);
    const auto alpha_grid = parse_alpha_grid(args.alpha_grid);
    const auto rows = sweep_curves(args.power_levels_w, alpha_grid, args.rho, args.cda);
    const std::string path = join_path(args.out_dir, "meanfield.csv");
    write_meanfield_csv(rows, path);
    log << "wrote " << path << " (" << rows.size() << " rows, " << args.power_levels_w.size()
        << " power levels)\n";
    for (double p : args.power_levels_w) {
        DriveCycleParams dp{args.rho, args.cda, p, optimal_alpha()};
        log << "  " << p / 1e3 << " kW @ alpha=1/3: v=" << driving_speed_mps(dp) * kMpsToMph
            << " mph, vbar=" << average_speed_mps(dp) * kMpsToMph << " mph\n";
    }
}

void run_report(const ReportArgs& args, std::ostream& log) {
    ensure_dir(args.out_dir);
    const auto records = read_counties_csv(args.input);
    if (records.empty()) throw DegenerateData("no county records in '" + args.input + "'");

    const FamilyPlan plan = plan_families("all");
    const Dataset evse = evse_dataset(records);
    const Dataset gas = gas_dataset(records);
    std::vector<std::string> unconverged;
    for (const Dataset* data : {&evse, &gas}) {
        auto u = fit_and_write(*data, plan, args.options, args.out_dir, log);
        unconverged.insert(unconverged.end(), u.begin(), u.end());
    }

    for (const Dataset* data : {&evse, &gas}) {
        CompareArgs c;
        c.input = args.input;
        c.dataset = (data == &evse) ? "evse" : "gas";
        c.fits_dir = args.out_dir;
        c.out_dir = args.out_dir;
        run_compare(c, log);
    }

    const std::string gs_fit_path =
        join_path(args.out_dir, "gasoline_" + family_name(Family::PowerLawNegBin) + ".json");
    GapArgs g;
    g.input = args.input;
    g.gs_fit = gs_fit_path;
    g.out_dir = args.out_dir;
    g.parity = args.parity;
    run_gap(g, log);

    MeanfieldArgs mf = args.meanfield;
    mf.out_dir = args.out_dir;
    run_meanfield(mf, log);

    // Figure data files.
    const ScalingFit evse_nb = read_fit_json(
        join_path(args.out_dir, "evse_" + family_name(Family::PowerLawNegBin) + ".json"));
    const ScalingFit gas_nb = read_fit_json(gs_fit_path);

    {
        std::ofstream out(join_path(args.out_dir, "fig1a_station_scaling.csv"), std::ios::binary);
        out << "dataset,fips,population,count,nb_mean\n";
        for (const CountyRecord& r : records)
            out << "EVSE," << r.fips << ',' << r.population << ',' << r.evse_stations << ','
                << format_double(predict(evse_nb, static_cast<double>(r.population), true)) << '\n';
        for (const CountyRecord& r : records)
            out << "Gasoline," << r.fips << ',' << r.population << ',' << r.gas_stations << ','
                << format_double(predict(gas_nb, static_cast<double>(r.population), true)) << '\n';
    }
    {
        const double per_station_w = static_cast<double>(args.parity.pumps_per_station) *
                                     pump_power_w(args.parity) * args.parity.consumption_ratio;
        std::ofstream out(join_path(args.out_dir, "fig1b_power_parity.csv"), std::ios::binary);
        out << "fips,population,evse_power_w,gas_equiv_power_fitted_w,gas_equiv_power_observed_w\n";
        for (const CountyRecord& r : records) {
            const double fitted =
                predict(gas_nb, static_cast<double>(r.population), true) * per_station_w;
            const double observed = static_cast<double>(r.gas_stations) * per_station_w;
            out << r.fips << ',' << r.population << ',' << format_double(r.evse_power_w) << ','
                << format_double(fitted) << ',' << format_double(observed) << '\n';
        }
    }
    {
        // Fig 2b: driving speed against charger power at fixed charge fractions.
        std::ofstream out(join_path(args.out_dir, "fig2b_speed_power.csv"), std::ios::binary);
        out << "alpha,power_w,v_mps\n";
        const auto powers = log_spaced_grid(100.0, 1e6, 200);
        for (double alpha : {0.002, 0.01, 0.05, 0.1, optimal_alpha(), 0.5}) {
            for (double p : powers) {
                DriveCycleParams dp{args.meanfield.rho, args.meanfield.cda, p, alpha};
                out << format_double(alpha) << ',' << format_double(p) << ','
                    << format_double(driving_speed_mps(dp)) << '\n';
            }
        }
    }
    // meanfield.csv and county_gap.csv double as the Fig 2a / Fig 3 data.
    std::error_code ec;
    fs::copy_file(join_path(args.out_dir, "meanfield.csv"),
                  join_path(args.out_dir, "fig2a_average_speed.csv"),
                  fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot copy meanfield.csv: " + ec.message());
    fs::copy_file(join_path(args.out_dir, "county_gap.csv"),
                  join_path(args.out_dir, "fig3_county_gap.csv"),
                  fs::copy_options::overwrite_existing, ec);
    if (ec) throw IoError("cannot copy county_gap.csv: " + ec.message());

    write_manifest({{"1a", "fig1a_station_scaling.csv"},
                    {"1b", "fig1b_power_parity.csv"},
                    {"2a", "fig2a_average_speed.csv"},
                    {"2b", "fig2b_speed_power.csv"},
                    {"3", "fig3_county_gap.csv"}},
                   join_path(args.out_dir, "manifest.json"));
    log << "wrote manifest with 5 figure data files\n";

    if (!unconverged.empty()) {
        std::string names;
        for (const auto& n : unconverged) names += (names.empty() ? "" : ", ") + n;
        throw UnconvergedFit("fits did not converge: " + names);
    }
}

}  // namespace evscale::cmd
