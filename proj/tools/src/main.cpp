// Command-line front end: ingest, assess, fit, levels, equivalent,
// sensitivity, report. Exit codes: 0 success, 2 validation failure,
// 3 numerical failure.

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "floodbayes/bayes.hpp"
#include "floodbayes/errors.hpp"
#include "floodbayes/hazard.hpp"
#include "floodbayes/ingest.hpp"
#include "floodbayes/rng.hpp"
#include "floodbayes/stattests.hpp"
#include "floodbayes/uq.hpp"
#include "floodbayes/version.hpp"
#include "json.hpp"
#include "pipeline.hpp"

namespace fb = floodbayes;
namespace fs = std::filesystem;
using floodbayes::cli::RunConfig;

namespace {

std::pair<int, int> parse_months(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw fb::ValidationError("months must be start:end, e.g. 6:11");
    }
    try {
        return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw fb::ValidationError("months must be start:end, e.g. 6:11");
    }
}

void ensure_parent_dir(const fs::path& path) {
    const auto parent = path.parent_path();
    if (!parent.empty()) {
        fs::create_directories(parent);
    }
}

void write_text_file(const std::string& text, const fs::path& path) {
    ensure_parent_dir(path);
    std::ofstream out(path);
    if (!out) {
        throw fb::ValidationError("cannot write file: " + path.string());
    }
    out << text;
    if (text.empty() || text.back() != '\n') {
        out << '\n';
    }
}

fb::ModelStructure resolve_structure(const std::string& requested,
                                     const fb::AlignedDataset& dataset, double alpha) {
    if (requested == "auto") {
        return fb::assess_nonstationarity(dataset.series, alpha).recommended_structure;
    }
    return fb::structure_from_string(requested);
}

/// Options the subcommands share with the config file; a value given on the
/// command line always wins over the config entry.
struct Common {
    CLI::App* app = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_dir_opt = nullptr;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string config_path;
};

void merge_common(Common& common, RunConfig& config) {
    if (!common.config_path.empty()) {
        config = fb::cli::load_run_config(common.config_path, config);
    }
    if (common.seed_opt->count() > 0) {
        config.seed = common.seed;
        config.seed_set = true;
    }
    if (common.out_dir_opt->count() > 0) {
        config.out_dir = common.out_dir;
    }
}

int guarded(const std::function<int()>& action) {
    try {
        return action();
    } catch (const fb::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const fb::ValidationError& e) {
        std::cerr << "validation failure: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "validation failure: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian return-level analysis of annual-maximum river stage records"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(fb::version));

    Common common;
    common.app = &app;
    common.seed_opt = app.add_option("--seed", common.seed, "Base seed (explicit, no default)");
    common.out_dir_opt = app.add_option("--out-dir", common.out_dir, "Output directory");
    app.add_option("--config", common.config_path,
                   "JSON config supplying defaults for any option not given");

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "Load and align stage and covariate records");
    struct {
        std::string stage, index, station, months = "6:11", out;
        int min_length = fb::AnnualMaximaSeries::default_min_length;
        CLI::Option *stage_opt, *index_opt, *months_opt, *min_length_opt, *out_opt;
    } ing;
    ing.stage_opt = ingest->add_option("--stage", ing.stage, "Stage CSV (year,stage_m)");
    ing.index_opt = ingest->add_option("--index", ing.index, "Monthly index CSV (year,month,value)");
    ingest->add_option("--station", ing.station, "Station metadata JSON");
    ing.months_opt = ingest->add_option("--months", ing.months,
                                        "Seasonal mean window, start:end (default 6:11)");
    ing.min_length_opt =
        ingest->add_option("--min-length", ing.min_length, "Minimum record length");
    ing.out_opt = ingest->add_option("--out", ing.out, "Output dataset JSON")->required();

    // ---- assess ----
    auto* assess = app.add_subcommand("assess", "Change-point and trend screening");
    struct {
        std::string data, out;
        double alpha = 0.05;
        CLI::Option* alpha_opt;
    } ass;
    assess->add_option("--data", ass.data, "Dataset JSON from ingest")->required();
    ass.alpha_opt = assess->add_option("--alpha", ass.alpha, "Significance level");
    assess->add_option("--out", ass.out, "Optional report file");

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "Posterior sampling for one prior and structure");
    struct {
        std::string data, structure = "auto", prior = "gauss-wide", out, steps;
        std::int64_t iterations = 100000, burn_in = 10000;
        std::size_t thin = 1;
        double alpha = 0.05;
        bool no_adapt = false;
        CLI::Option *structure_opt, *prior_opt, *iterations_opt, *burn_in_opt, *alpha_opt;
    } ft;
    fit->add_option("--data", ft.data, "Dataset JSON from ingest")->required();
    ft.structure_opt = fit->add_option("--structure", ft.structure,
                                       "stationary | nonstationary | auto");
    ft.prior_opt = fit->add_option("--prior", ft.prior,
                                   "uniform | gauss-wide | gauss-narrow | gauss:<variance>");
    ft.iterations_opt = fit->add_option("--iterations", ft.iterations, "Chain length");
    ft.burn_in_opt = fit->add_option("--burn-in", ft.burn_in, "Discarded initial iterations");
    ft.alpha_opt = fit->add_option("--alpha", ft.alpha, "Significance level for --structure auto");
    fit->add_option("--steps", ft.steps, "Proposal scales mu0,mu1,sigma,xi");
    fit->add_flag("--no-adapt", ft.no_adapt, "Disable burn-in step-size adaptation");
    fit->add_option("--thin", ft.thin, "Export stride (1 = full ensemble)");
    fit->add_option("--out", ft.out, "Output ensemble JSON")->required();

    // ---- levels ----
    auto* levels = app.add_subcommand("levels", "Return-level curve from an ensemble");
    struct {
        std::string ensemble, data, covariate = "last-year", out, survival_out;
        std::vector<double> periods{2, 5, 10, 25, 50, 100};
        double interval = 0.9;
        double survival_period = 0.0;
        CLI::Option *periods_opt, *covariate_opt, *interval_opt;
    } lv;
    levels->add_option("--ensemble", lv.ensemble, "Ensemble JSON from fit")->required();
    levels->add_option("--data", lv.data, "Dataset JSON from ingest")->required();
    lv.periods_opt = levels->add_option("--periods", lv.periods, "Return periods, years")
                         ->delimiter(',');
    lv.covariate_opt = levels->add_option("--covariate", lv.covariate,
                                          "last-year | mean | fixed:<value>");
    lv.interval_opt = levels->add_option("--interval", lv.interval, "Credible interval mass");
    levels->add_option("--out", lv.out, "Output CSV")->required();
    levels->add_option("--survival-out", lv.survival_out,
                       "Optional survival-function CSV for one period");
    levels->add_option("--survival-period", lv.survival_period,
                       "Period for --survival-out (default: largest)");

    // ---- equivalent ----
    auto* equivalent =
        app.add_subcommand("equivalent", "Equivalent return period of a stationary level");
    struct {
        std::string ensemble, data, covariate = "last-year", out;
        double level = 0.0;
        CLI::Option* covariate_opt;
    } eq;
    equivalent->add_option("--ensemble", eq.ensemble, "Nonstationary ensemble JSON")->required();
    equivalent->add_option("--data", eq.data, "Dataset JSON from ingest")->required();
    equivalent->add_option("--stationary-level", eq.level, "Design level, meters")->required();
    eq.covariate_opt = equivalent->add_option("--covariate", eq.covariate,
                                              "last-year | mean | fixed:<value>");
    equivalent->add_option("--out", eq.out, "Optional JSON output file");

    // ---- sensitivity ----
    auto* sensitivity =
        app.add_subcommand("sensitivity", "Uncertainty decomposition across sources");
    struct {
        std::string data, covariate = "last-year";
        std::vector<std::string> priors{"uniform", "gauss-wide", "gauss-narrow"};
        std::vector<std::string> measures;
        std::vector<double> periods{2, 5, 10, 25, 50, 100};
        std::int64_t iterations = 100000, burn_in = 10000;
        std::size_t parameter_scenarios = 1000;
        CLI::Option *priors_opt, *measures_opt, *periods_opt, *covariate_opt, *iterations_opt,
            *burn_in_opt, *scenarios_opt;
    } sv;
    sensitivity->add_option("--data", sv.data, "Dataset JSON from ingest")->required();
    sv.periods_opt =
        sensitivity->add_option("--periods", sv.periods, "Return periods, years")->delimiter(',');
    sv.priors_opt =
        sensitivity->add_option("--priors", sv.priors, "Prior scenario set")->delimiter(',');
    sv.measures_opt = sensitivity->add_option("--measure", sv.measures,
                                              "range and/or variance (repeatable)");
    sv.covariate_opt = sensitivity->add_option("--covariate", sv.covariate,
                                               "last-year | mean | fixed:<value>");
    sv.iterations_opt = sensitivity->add_option("--iterations", sv.iterations, "Chain length");
    sv.burn_in_opt = sensitivity->add_option("--burn-in", sv.burn_in, "Discarded iterations");
    sv.scenarios_opt = sensitivity->add_option("--parameter-scenarios", sv.parameter_scenarios,
                                               "Thinned samples per cell");

    // ---- report ----
    auto* report = app.add_subcommand("report", "Full pipeline with a run manifest");
    struct {
        std::string stage, index, station, structure, covariate, months;
        std::vector<std::string> priors;
        std::vector<double> periods;
        std::int64_t iterations = 0, burn_in = -1;
        double alpha = -1.0, interval = -1.0;
        std::size_t parameter_scenarios = 0, thin = 0;
    } rp;
    report->add_option("--stage", rp.stage, "Stage CSV");
    report->add_option("--index", rp.index, "Monthly index CSV");
    report->add_option("--station", rp.station, "Station metadata JSON");
    report->add_option("--months", rp.months, "Seasonal window start:end");
    report->add_option("--alpha", rp.alpha, "Significance level");
    report->add_option("--priors", rp.priors, "Prior scenario set")->delimiter(',');
    report->add_option("--periods", rp.periods, "Return periods")->delimiter(',');
    report->add_option("--covariate", rp.covariate, "Covariate reference");
    report->add_option("--iterations", rp.iterations, "Chain length");
    report->add_option("--burn-in", rp.burn_in, "Discarded iterations");
    report->add_option("--interval", rp.interval, "Credible interval mass");
    report->add_option("--parameter-scenarios", rp.parameter_scenarios,
                       "Thinned samples per cell");
    report->add_option("--ensemble-thin", rp.thin, "Export stride for cell ensembles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        app.exit(e);
        return 2;
    }

    if (ingest->parsed()) {
        return guarded([&] {
            RunConfig config;
            merge_common(common, config);
            if (ing.stage_opt->count() > 0) config.stage_csv = ing.stage;
            if (ing.index_opt->count() > 0) config.index_csv = ing.index;
            if (ing.months_opt->count() > 0) {
                std::tie(config.start_month, config.end_month) = parse_months(ing.months);
            }
            if (ing.min_length_opt->count() > 0) config.min_length = ing.min_length;
            if (config.stage_csv.empty() || config.index_csv.empty()) {
                throw fb::ValidationError("ingest requires --stage and --index");
            }

            auto series = fb::load_annual_maxima(config.stage_csv, config.min_length);
            if (!ing.station.empty()) {
                series.meta = fb::load_station_meta(ing.station);
                series.validate(config.min_length);
            }
            const auto monthly = fb::load_monthly_index(config.index_csv);
            std::vector<int> omitted;
            const auto covariate = fb::seasonal_mean_covariate(
                monthly, config.start_month, config.end_month, &omitted);
            const auto dataset = fb::align(series, covariate);

            ensure_parent_dir(ing.out);
            fb::save_dataset(dataset, ing.out);

            nlohmann::json summary = {
                {"written", ing.out},
                {"years", dataset.series.size()},
                {"first_year", dataset.series.years.front()},
                {"last_year", dataset.series.years.back()},
                {"months", {config.start_month, config.end_month}},
                {"omitted_covariate_years", omitted},
            };
            std::cout << summary.dump(2) << '\n';
            return 0;
        });
    }

    if (assess->parsed()) {
        return guarded([&] {
            RunConfig config;
            merge_common(common, config);
            if (ass.alpha_opt->count() > 0) config.alpha = ass.alpha;

            const auto dataset = fb::load_dataset(ass.data);
            const auto assessment = fb::assess_nonstationarity(dataset.series, config.alpha);
            const auto text = fb::assessment_to_json(assessment);
            if (!ass.out.empty()) {
                write_text_file(text, ass.out);
            }
            std::cout << text << '\n';
            return 0;
        });
    }

    if (fit->parsed()) {
        return guarded([&] {
            RunConfig config;
            merge_common(common, config);
            if (ft.structure_opt->count() > 0) config.structure = ft.structure;
            if (ft.prior_opt->count() > 0) config.priors = {ft.prior};
            if (ft.iterations_opt->count() > 0) config.iterations = ft.iterations;
            if (ft.burn_in_opt->count() > 0) config.burn_in = ft.burn_in;
            if (ft.alpha_opt->count() > 0) config.alpha = ft.alpha;
            if (!config.seed_set) {
                throw fb::ValidationError("fit requires an explicit --seed");
            }

            const auto dataset = fb::load_dataset(ft.data);
            const auto structure = resolve_structure(config.structure, dataset, config.alpha);
            const auto prior = fb::PriorSpec::from_name(
                ft.prior_opt->count() > 0 ? ft.prior : config.priors.front());

            fb::ChainConfig chain;
            chain.iterations = config.iterations;
            chain.burn_in = config.burn_in;
            chain.seed = fb::derive_seed(config.seed, "fit");
            chain.adapt_during_burnin = !ft.no_adapt;
            if (!ft.steps.empty()) {
                std::vector<double> steps;
                std::stringstream ss(ft.steps);
                std::string part;
                while (std::getline(ss, part, ',')) {
                    steps.push_back(std::stod(part));
                }
                chain.initial_step_sizes = steps;
            }

            const auto ensemble = fb::mh_sample(dataset, structure, prior, chain);
            ensure_parent_dir(ft.out);
            fb::save_ensemble(ensemble, ft.out, ft.thin);

            const auto map = fb::map_estimate(ensemble);
            nlohmann::json summary = {
                {"written", ft.out},
                {"structure", fb::to_string(structure)},
                {"prior", prior.label},
                {"retained_samples", ensemble.size()},
                {"exported_samples", (ensemble.size() + ft.thin - 1) / ft.thin},
                {"acceptance_rate", ensemble.acceptance_rate},
                {"warnings", ensemble.warnings},
                {"map", {{"mu0", map.mu0}, {"mu1", map.mu1}, {"sigma", map.sigma},
                         {"xi", map.xi}}},
            };
            std::cout << summary.dump(2) << '\n';
            return 0;
        });
    }

    if (levels->parsed()) {
        return guarded([&] {
            RunConfig config;
            merge_common(common, config);
            if (lv.periods_opt->count() > 0) config.periods = lv.periods;
            if (lv.covariate_opt->count() > 0) config.covariate_ref = lv.covariate;
            if (lv.interval_opt->count() > 0) config.interval_mass = lv.interval;

            const auto dataset = fb::load_dataset(lv.data);
            const auto ensemble = fb::load_ensemble(lv.ensemble);
            const auto ref = fb::CovariateRef::parse(config.covariate_ref);
            const auto curve = fb::return_curve(ensemble, config.periods, ref, dataset,
                                                config.interval_mass);
            ensure_parent_dir(lv.out);
            fb::write_return_curve_csv(curve, lv.out);

            if (!lv.survival_out.empty()) {
                double period = lv.survival_period > 0.0 ? lv.survival_period
                                                         : config.periods.back();
                const auto dist =
                    fb::return_level_ensemble(ensemble, period, ref, dataset,
                                              config.interval_mass);
                fb::write_survival_csv(fb::survival_function(dist.levels), lv.survival_out);
            }

            nlohmann::json summary = {
                {"written", lv.out},
                {"periods", config.periods},
                {"covariate_ref", ref.to_string()},
                {"expected", curve.summaries.back().expected},
                {"map_level", curve.summaries.back().map_level},
            };
            std::cout << summary.dump(2) << '\n';
            return 0;
        });
    }

    if (equivalent->parsed()) {
        return guarded([&] {
            RunConfig config;
            merge_common(common, config);
            if (eq.covariate_opt->count() > 0) config.covariate_ref = eq.covariate;

            const auto dataset = fb::load_dataset(eq.data);
            const auto ensemble = fb::load_ensemble(eq.ensemble);
            const auto ref = fb::CovariateRef::parse(config.covariate_ref);
            const double t_eq =
                fb::equivalent_return_period(eq.level, ensemble, ref, dataset);

            nlohmann::json out = {
                {"stationary_level", eq.level},
                {"covariate_ref", ref.to_string()},
                {"equivalent_return_period",
                 std::isfinite(t_eq) ? nlohmann::json(t_eq) : nlohmann::json(nullptr)},
            };
            const auto text = out.dump(2);
            if (!eq.out.empty()) {
                write_text_file(text, eq.out);
            }
            std::cout << text << '\n';
            return 0;
        });
    }

    if (sensitivity->parsed()) {
        return guarded([&] {
            RunConfig config;
            merge_common(common, config);
            if (sv.periods_opt->count() > 0) config.periods = sv.periods;
            if (sv.priors_opt->count() > 0) config.priors = sv.priors;
            if (sv.measures_opt->count() > 0) config.measures = sv.measures;
            if (sv.covariate_opt->count() > 0) config.covariate_ref = sv.covariate;
            if (sv.iterations_opt->count() > 0) config.iterations = sv.iterations;
            if (sv.burn_in_opt->count() > 0) config.burn_in = sv.burn_in;
            if (sv.scenarios_opt->count() > 0) config.parameter_scenarios = sv.parameter_scenarios;
            if (!config.seed_set) {
                throw fb::ValidationError("sensitivity requires an explicit --seed");
            }

            const auto dataset = fb::load_dataset(sv.data);
            const auto files = fb::cli::run_sensitivity(dataset, config);
            nlohmann::json summary = {{"out_dir", config.out_dir}, {"files", files}};
            std::cout << summary.dump(2) << '\n';
            return 0;
        });
    }

    if (report->parsed()) {
        return guarded([&] {
            RunConfig config;
            merge_common(common, config);
            if (report->count("--stage") > 0) config.stage_csv = rp.stage;
            if (report->count("--index") > 0) config.index_csv = rp.index;
            if (report->count("--station") > 0) config.station_meta = rp.station;
            if (report->count("--months") > 0) {
                std::tie(config.start_month, config.end_month) = parse_months(rp.months);
            }
            if (report->count("--alpha") > 0) config.alpha = rp.alpha;
            if (report->count("--priors") > 0) config.priors = rp.priors;
            if (report->count("--periods") > 0) config.periods = rp.periods;
            if (report->count("--covariate") > 0) config.covariate_ref = rp.covariate;
            if (report->count("--iterations") > 0) config.iterations = rp.iterations;
            if (report->count("--burn-in") > 0) config.burn_in = rp.burn_in;
            if (report->count("--interval") > 0) config.interval_mass = rp.interval;
            if (report->count("--parameter-scenarios") > 0) {
                config.parameter_scenarios = rp.parameter_scenarios;
            }
            if (report->count("--ensemble-thin") > 0) config.ensemble_thin = rp.thin;
            if (report->count("--structure") > 0) config.structure = rp.structure;
            return fb::cli::run_report(config);
        });
    }

    return 2;
}
