#include "pipeline.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "floodbayes/bayes.hpp"
#include "floodbayes/errors.hpp"
#include "floodbayes/hazard.hpp"
#include "floodbayes/ingest.hpp"
#include "floodbayes/rng.hpp"
#include "floodbayes/stattests.hpp"
#include "floodbayes/uq.hpp"
#include "floodbayes/version.hpp"

namespace floodbayes::cli {

namespace fs = std::filesystem;

RunConfig load_run_config(const fs::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid config JSON: " + std::string(e.what()));
    }

    const auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) {
            field = j.at(key).get<std::decay_t<decltype(field)>>();
        }
    };
    get("stage_csv", base.stage_csv);
    get("index_csv", base.index_csv);
    get("station_meta", base.station_meta);
    if (j.contains("months")) {
        const auto months = j.at("months").get<std::vector<int>>();
        if (months.size() != 2) {
            throw ValidationError("config months must be [start, end]");
        }
        base.start_month = months[0];
        base.end_month = months[1];
    }
    get("min_length", base.min_length);
    get("alpha", base.alpha);
    get("priors", base.priors);
    get("structure", base.structure);
    get("iterations", base.iterations);
    get("burn_in", base.burn_in);
    get("periods", base.periods);
    get("covariate_ref", base.covariate_ref);
    get("interval_mass", base.interval_mass);
    get("parameter_scenarios", base.parameter_scenarios);
    get("measures", base.measures);
    get("ensemble_thin", base.ensemble_thin);
    get("out_dir", base.out_dir);
    if (j.contains("seed")) {
        base.seed = j.at("seed").get<std::uint64_t>();
        base.seed_set = true;
    }
    return base;
}

nlohmann::json config_echo(const RunConfig& config) {
    return {
        {"stage_csv", config.stage_csv},
        {"index_csv", config.index_csv},
        {"station_meta", config.station_meta},
        {"months", {config.start_month, config.end_month}},
        {"min_length", config.min_length},
        {"alpha", config.alpha},
        {"priors", config.priors},
        {"structure", config.structure},
        {"iterations", config.iterations},
        {"burn_in", config.burn_in},
        {"periods", config.periods},
        {"covariate_ref", config.covariate_ref},
        {"interval_mass", config.interval_mass},
        {"parameter_scenarios", config.parameter_scenarios},
        {"measures", config.measures},
        {"ensemble_thin", config.ensemble_thin},
        {"seed", config.seed},
    };
}

namespace {

void write_text_file(const std::string& text, const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << text;
    if (text.empty() || text.back() != '\n') {
        out << '\n';
    }
}

std::string sanitize(std::string name) {
    for (char& c : name) {
        if (c == ':' || c == '/' || c == ' ') {
            c = '_';
        }
    }
    return name;
}

} // namespace

int run_report(const RunConfig& config) {
    if (!config.seed_set) {
        throw ValidationError("report requires an explicit --seed (or a config seed)");
    }
    if (config.stage_csv.empty() || config.index_csv.empty()) {
        throw ValidationError("report requires --stage and --index (or config entries)");
    }

    // Validate and assemble every input before writing anything.
    const auto series_raw = load_annual_maxima(config.stage_csv, config.min_length);
    auto series = series_raw;
    if (!config.station_meta.empty()) {
        series.meta = load_station_meta(config.station_meta);
        series.validate(config.min_length);
    }
    const auto monthly = load_monthly_index(config.index_csv);
    std::vector<int> omitted;
    const auto covariate =
        seasonal_mean_covariate(monthly, config.start_month, config.end_month, &omitted);
    const auto dataset = align(series, covariate);
    const auto covariate_ref = CovariateRef::parse(config.covariate_ref);

    std::vector<PriorSpec> priors;
    for (const auto& name : config.priors) {
        priors.push_back(PriorSpec::from_name(name));
    }
    if (priors.empty()) {
        throw ValidationError("report requires at least one prior");
    }
    std::vector<Measure> measures;
    for (const auto& name : config.measures) {
        measures.push_back(measure_from_string(name));
    }

    const fs::path out_dir(config.out_dir);
    fs::create_directories(out_dir);

    nlohmann::json manifest;
    manifest["tool"] = "floodbayes";
    manifest["version"] = version;
    manifest["config"] = config_echo(config);
    std::vector<std::string> files;

    // Stage 1: aligned dataset.
    save_dataset(dataset, out_dir / "dataset.json");
    files.push_back("dataset.json");
    manifest["ingest"] = {
        {"years", dataset.series.size()},
        {"first_year", dataset.series.years.front()},
        {"last_year", dataset.series.years.back()},
        {"omitted_covariate_years", omitted},
        {"months", {config.start_month, config.end_month}},
    };

    // Stage 2: nonstationarity screening.
    const auto assessment = assess_nonstationarity(dataset.series, config.alpha);
    write_text_file(assessment_to_json(assessment), out_dir / "assessment.json");
    files.push_back("assessment.json");

    // Stage 3: one chain per (prior, structure) cell.
    ChainConfig chain;
    chain.iterations = config.iterations;
    chain.burn_in = config.burn_in;
    chain.seed = config.seed;
    const std::vector<ModelStructure> structures{ModelStructure::stationary,
                                                 ModelStructure::nonstationary};
    const auto cells = fit_scenario_cells(dataset, priors, structures, chain,
                                          config.parameter_scenarios);

    nlohmann::json cell_report = nlohmann::json::array();
    for (std::size_t i = 0; i < priors.size(); ++i) {
        for (std::size_t j = 0; j < structures.size(); ++j) {
            const auto& ensemble = cells.cells[cells.cell_index(i, j)];
            const std::string name = "ensemble_" + sanitize(priors[i].label) + "_" +
                                     to_string(structures[j]) + ".json";
            save_ensemble(ensemble, out_dir / name, config.ensemble_thin);
            files.push_back(name);
            cell_report.push_back({
                {"prior", priors[i].label},
                {"structure", to_string(structures[j])},
                {"file", name},
                {"retained_samples", ensemble.size()},
                {"acceptance_rate", ensemble.acceptance_rate},
                {"warnings", ensemble.warnings},
            });
        }
    }
    manifest["chains"] = cell_report;

    // Stage 4: return-level curves for the headline prior, both structures.
    std::size_t headline = 0;
    for (std::size_t i = 0; i < priors.size(); ++i) {
        if (priors[i].label == "gauss-wide") {
            headline = i;
        }
    }
    manifest["headline_prior"] = priors[headline].label;
    for (std::size_t j = 0; j < structures.size(); ++j) {
        const auto& ensemble = cells.cells[cells.cell_index(headline, j)];
        const auto curve = return_curve(ensemble, config.periods, covariate_ref, dataset,
                                        config.interval_mass);
        const std::string name = std::string("levels_") + to_string(structures[j]) + ".csv";
        write_return_curve_csv(curve, out_dir / name);
        files.push_back(name);

        const auto survival = survival_function(curve.summaries.back().levels);
        const std::string sname = std::string("survival_") + to_string(structures[j]) + ".csv";
        write_survival_csv(survival, out_dir / sname);
        files.push_back(sname);
    }

    // Stage 5: equivalent return period of the stationary design level.
    const double design_period = config.periods.back();
    const auto& st = cells.cells[cells.cell_index(headline, 0)];
    const auto& ns = cells.cells[cells.cell_index(headline, 1)];
    const auto st_dist =
        return_level_ensemble(st, design_period, covariate_ref, dataset, config.interval_mass);
    const double t_eq =
        equivalent_return_period(st_dist.expected, ns, covariate_ref, dataset);
    nlohmann::json equivalent = {
        {"design_return_period", design_period},
        {"stationary_expected_level", st_dist.expected},
        {"equivalent_return_period",
         std::isfinite(t_eq) ? nlohmann::json(t_eq) : nlohmann::json(nullptr)},
        {"covariate_ref", covariate_ref.to_string()},
        {"prior", priors[headline].label},
    };
    write_text_file(equivalent.dump(2), out_dir / "equivalent.json");
    files.push_back("equivalent.json");

    // Stage 6: uncertainty decomposition across (prior, structure, parameter).
    std::vector<PeriodDecomposition> rows;
    nlohmann::json detail = nlohmann::json::array();
    for (double period : config.periods) {
        const auto grid = grid_for_period(cells, period, covariate_ref, dataset);
        PeriodDecomposition row;
        row.return_period = period;
        nlohmann::json entry;
        entry["period"] = period;
        for (Measure m : measures) {
            const auto d = decompose(grid, m);
            if (m == Measure::range) {
                row.range_decomposition = d;
            } else {
                row.variance_decomposition = d;
            }
            entry[to_string(m)] = {
                {"cumulative", d.cumulative},
                {"individual", d.individual},
                {"total", d.total},
            };
            if (m == Measure::variance) {
                row.anova = anova_effects(grid);
                nlohmann::json interactions = nlohmann::json::array();
                for (const auto& i : row.anova.interaction_variance) {
                    interactions.push_back({{"sources",
                                             {grid.source_names[i.first],
                                              grid.source_names[i.second]}},
                                            {"variance", i.variance}});
                }
                entry["anova"] = {
                    {"grand_mean", row.anova.grand_mean},
                    {"total_variance", row.anova.total_variance},
                    {"main_effect_variance", row.anova.main_effect_variance},
                    {"interaction_variance", interactions},
                    {"residual_variance", row.anova.residual_variance},
                };
            }
        }
        detail.push_back(entry);
        rows.push_back(std::move(row));
    }
    const std::vector<std::string> source_names{"prior", "structure", "parameter"};
    write_decomposition_csv(rows, source_names, out_dir / "sensitivity.csv");
    files.push_back("sensitivity.csv");
    nlohmann::json sensitivity_report = {
        {"sources", source_names},
        {"covariate_ref", covariate_ref.to_string()},
        {"parameter_scenarios", config.parameter_scenarios},
        {"periods", detail},
    };
    write_text_file(sensitivity_report.dump(2), out_dir / "sensitivity.json");
    files.push_back("sensitivity.json");

    manifest["files"] = files;
    write_text_file(manifest.dump(2), out_dir / "manifest.json");

    std::cout << "report written to " << out_dir.string() << " (" << files.size() + 1
              << " files)\n";
    return 0;
}

} // namespace floodbayes::cli
