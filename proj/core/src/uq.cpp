#include "floodbayes/uq.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <numeric>
#include <utility>

#include "floodbayes/errors.hpp"
#include "floodbayes/rng.hpp"

namespace floodbayes {

namespace {

double long_mean(std::span<const double> x) {
    long double sum = 0.0L;
    for (double v : x) {
        sum += v;
    }
    return static_cast<double>(sum / static_cast<long double>(x.size()));
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

/// Odometer over mixed radices; calls fn with each coordinate tuple.
template <typename Fn>
void for_each_combo(std::span<const std::size_t> radices, Fn&& fn) {
    std::vector<std::size_t> coords(radices.size(), 0);
    while (true) {
        fn(coords);
        std::size_t i = coords.size();
        while (i > 0) {
            --i;
            if (++coords[i] < radices[i]) {
                break;
            }
            coords[i] = 0;
            if (i == 0) {
                return;
            }
        }
        if (radices.empty()) {
            return;
        }
    }
}

} // namespace

const char* to_string(Measure m) { return m == Measure::range ? "range" : "variance"; }

Measure measure_from_string(const std::string& s) {
    if (s == "range") return Measure::range;
    if (s == "variance") return Measure::variance;
    throw ValidationError("unknown measure '" + s + "' (expected range or variance)");
}

std::size_t ScenarioGrid::cell_count() const {
    std::size_t n = 1;
    for (std::size_t c : scenario_counts) {
        n *= c;
    }
    return scenario_counts.empty() ? 0 : n;
}

double ScenarioGrid::at(std::span<const std::size_t> coords) const {
    if (coords.size() != scenario_counts.size()) {
        throw ValidationError("scenario grid: coordinate arity mismatch");
    }
    std::size_t idx = 0;
    for (std::size_t z = 0; z < coords.size(); ++z) {
        if (coords[z] >= scenario_counts[z]) {
            throw ValidationError("scenario grid: coordinate out of range");
        }
        idx = idx * scenario_counts[z] + coords[z];
    }
    return estimates[idx];
}

void ScenarioGrid::validate() const {
    if (scenario_counts.empty()) {
        throw ValidationError("scenario grid: needs at least one source");
    }
    if (source_names.size() != scenario_counts.size()) {
        throw ValidationError("scenario grid: source_names/scenario_counts mismatch");
    }
    for (std::size_t c : scenario_counts) {
        if (c == 0) {
            throw ValidationError("scenario grid: empty source");
        }
    }
    if (estimates.size() != cell_count()) {
        throw ValidationError("scenario grid: incomplete table (" +
                              std::to_string(estimates.size()) + " of " +
                              std::to_string(cell_count()) + " cells)");
    }
    for (double v : estimates) {
        if (!std::isfinite(v)) {
            throw ValidationError("scenario grid: nonfinite estimate");
        }
    }
}

double range_measure(std::span<const double> y) {
    if (y.empty()) {
        throw ValidationError("range_measure: empty input");
    }
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    return *hi - *lo;
}

double variance_measure(std::span<const double> y) {
    if (y.empty()) {
        throw ValidationError("variance_measure: empty input");
    }
    const double mean = long_mean(y);
    long double ss = 0.0L;
    for (double v : y) {
        const long double d = v - mean;
        ss += d * d;
    }
    return static_cast<double>(ss / static_cast<long double>(y.size()));
}

namespace {

double apply_measure(std::span<const double> y, Measure m) {
    return m == Measure::range ? range_measure(y) : variance_measure(y);
}

} // namespace

double conditional_cumulative(const ScenarioGrid& grid, std::size_t z,
                              std::span<const std::size_t> fixed_after, Measure measure) {
    grid.validate();
    const std::size_t sources = grid.source_count();
    if (z < 1 || z > sources) {
        throw ValidationError("conditional_cumulative: z out of 1..Z");
    }
    if (fixed_after.size() != sources - z) {
        throw ValidationError("conditional_cumulative: fixed_after arity mismatch");
    }

    const std::span<const std::size_t> head_counts(grid.scenario_counts.data(), z);
    std::vector<std::size_t> coords(sources, 0);
    for (std::size_t j = z; j < sources; ++j) {
        coords[j] = fixed_after[j - z];
    }

    std::vector<double> values;
    values.reserve(std::accumulate(head_counts.begin(), head_counts.end(), std::size_t{1},
                                   std::multiplies<>()));
    for_each_combo(head_counts, [&](const std::vector<std::size_t>& head) {
        std::copy(head.begin(), head.end(), coords.begin());
        values.push_back(grid.at(coords));
    });
    return apply_measure(values, measure);
}

double marginal_cumulative(const ScenarioGrid& grid, std::size_t z, Measure measure) {
    grid.validate();
    const std::size_t sources = grid.source_count();
    if (z < 1 || z > sources) {
        throw ValidationError("marginal_cumulative: z out of 1..Z");
    }
    const std::span<const std::size_t> tail_counts(grid.scenario_counts.data() + z, sources - z);

    long double sum = 0.0L;
    std::size_t count = 0;
    for_each_combo(tail_counts, [&](const std::vector<std::size_t>& tail) {
        sum += conditional_cumulative(grid, z, tail, measure);
        ++count;
    });
    return static_cast<double>(sum / static_cast<long double>(count));
}

UncertaintyDecomposition decompose(const ScenarioGrid& grid, Measure measure) {
    grid.validate();
    const std::size_t sources = grid.source_count();

    UncertaintyDecomposition d;
    d.measure = measure;
    d.cumulative.resize(sources);
    d.individual.resize(sources);
    for (std::size_t z = 1; z <= sources; ++z) {
        d.cumulative[z - 1] = marginal_cumulative(grid, z, measure);
    }
    d.total = d.cumulative.back();

    const double tol = 1e-9 * std::max(1.0, std::abs(d.total));
    for (std::size_t z = 0; z < sources; ++z) {
        const double prev = z == 0 ? 0.0 : d.cumulative[z - 1];
        double diff = d.cumulative[z] - prev;
        if (diff < -tol) {
            throw NumericError("decompose: cumulative uncertainty decreased at source '" +
                               grid.source_names[z] + "' by " + std::to_string(-diff));
        }
        if (diff < 0.0) {
            diff = 0.0; // floating point noise only; real violations throw above
        }
        d.individual[z] = diff;
    }
    return d;
}

AnovaEffects anova_effects(const ScenarioGrid& grid) {
    grid.validate();
    const std::size_t sources = grid.source_count();
    const auto& counts = grid.scenario_counts;

    AnovaEffects fx;
    fx.grand_mean = long_mean(grid.estimates);
    fx.total_variance = variance_measure(grid.estimates);

    // Scenario-conditional means per source and per source pair.
    std::vector<std::vector<long double>> sums1(sources);
    for (std::size_t z = 0; z < sources; ++z) {
        sums1[z].assign(counts[z], 0.0L);
    }
    std::vector<std::vector<long double>> sums2;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t z = 0; z < sources; ++z) {
        for (std::size_t h = z + 1; h < sources; ++h) {
            pairs.emplace_back(z, h);
            sums2.emplace_back(counts[z] * counts[h], 0.0L);
        }
    }

    const std::size_t total_cells = grid.cell_count();
    for_each_combo(counts, [&](const std::vector<std::size_t>& coords) {
        const double v = grid.at(coords);
        for (std::size_t z = 0; z < sources; ++z) {
            sums1[z][coords[z]] += v;
        }
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const auto [z, h] = pairs[k];
            sums2[k][coords[z] * counts[h] + coords[h]] += v;
        }
    });

    std::vector<std::vector<double>> mains(sources);
    for (std::size_t z = 0; z < sources; ++z) {
        const double cells_per = static_cast<double>(total_cells / counts[z]);
        mains[z].resize(counts[z]);
        long double var = 0.0L;
        for (std::size_t x = 0; x < counts[z]; ++x) {
            mains[z][x] = static_cast<double>(sums1[z][x]) / cells_per - fx.grand_mean;
            var += static_cast<long double>(mains[z][x]) * mains[z][x];
        }
        fx.main_effect_variance.push_back(
            static_cast<double>(var / static_cast<long double>(counts[z])));
    }

    long double explained = 0.0L;
    for (double v : fx.main_effect_variance) {
        explained += v;
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [z, h] = pairs[k];
        const double cells_per = static_cast<double>(total_cells / (counts[z] * counts[h]));
        long double var = 0.0L;
        for (std::size_t x = 0; x < counts[z]; ++x) {
            for (std::size_t y = 0; y < counts[h]; ++y) {
                const double cell_mean =
                    static_cast<double>(sums2[k][x * counts[h] + y]) / cells_per;
                const double beta = cell_mean - mains[z][x] - mains[h][y] - fx.grand_mean;
                var += static_cast<long double>(beta) * beta;
            }
        }
        const double pair_var =
            static_cast<double>(var / static_cast<long double>(counts[z] * counts[h]));
        fx.interaction_variance.push_back({z, h, pair_var});
        explained += pair_var;
    }
    fx.residual_variance = static_cast<double>(fx.total_variance - explained);
    return fx;
}

ScenarioCells fit_scenario_cells(const AlignedDataset& data, std::vector<PriorSpec> priors,
                                 std::vector<ModelStructure> structures,
                                 const ChainConfig& base_config,
                                 std::size_t parameter_scenarios, bool parallel) {
    data.validate();
    base_config.validate();
    if (priors.empty() || structures.empty()) {
        throw ValidationError("fit_scenario_cells: need at least one prior and one structure");
    }
    const std::size_t retained =
        static_cast<std::size_t>(base_config.iterations - base_config.burn_in);
    if (parameter_scenarios == 0 || parameter_scenarios > retained) {
        throw ValidationError("parameter_scenarios must lie in 1.." + std::to_string(retained));
    }

    ScenarioCells cells;
    cells.priors = std::move(priors);
    cells.structures = std::move(structures);
    cells.parameter_scenarios = parameter_scenarios;

    const std::size_t n_cells = cells.priors.size() * cells.structures.size();
    cells.cells.resize(n_cells);
    cells.thinned.resize(n_cells);

    const auto run_cell = [&](std::size_t idx) {
        const std::size_t i = idx / cells.structures.size();
        const std::size_t j = idx % cells.structures.size();
        ChainConfig config = base_config;
        config.seed = derive_seed(base_config.seed, "cell", idx);
        try {
            cells.cells[idx] = mh_sample(data, cells.structures[j], cells.priors[i], config);
        } catch (const Error& e) {
            throw NumericError("scenario cell (prior '" + cells.priors[i].label +
                               "', structure " + std::string(to_string(cells.structures[j])) +
                               "): " + e.what());
        }
        auto& thin = cells.thinned[idx];
        thin.reserve(parameter_scenarios);
        for (std::size_t k = 0; k < parameter_scenarios; ++k) {
            thin.push_back(cells.cells[idx].samples[k * retained / parameter_scenarios]);
        }
    };

    if (parallel && n_cells > 1) {
        std::vector<std::future<void>> futures;
        futures.reserve(n_cells);
        for (std::size_t idx = 0; idx < n_cells; ++idx) {
            futures.push_back(std::async(std::launch::async, run_cell, idx));
        }
        for (auto& f : futures) {
            f.get();
        }
    } else {
        for (std::size_t idx = 0; idx < n_cells; ++idx) {
            run_cell(idx);
        }
    }
    return cells;
}

ScenarioGrid grid_for_period(const ScenarioCells& cells, double return_period,
                             const CovariateRef& covariate_ref, const AlignedDataset& data) {
    const double phi = covariate_ref.resolve(data);

    ScenarioGrid grid;
    grid.source_names = {"prior", "structure", "parameter"};
    grid.scenario_counts = {cells.priors.size(), cells.structures.size(),
                            cells.parameter_scenarios};
    grid.estimates.reserve(grid.cell_count());
    for (std::size_t i = 0; i < cells.priors.size(); ++i) {
        for (std::size_t j = 0; j < cells.structures.size(); ++j) {
            const auto& thin = cells.thinned[cells.cell_index(i, j)];
            for (std::size_t k = 0; k < cells.parameter_scenarios; ++k) {
                grid.estimates.push_back(
                    return_level(thin[k], return_period, cells.structures[j], phi));
            }
        }
    }
    grid.validate();
    return grid;
}

ScenarioGrid build_scenario_grid(const AlignedDataset& data,
                                 const std::vector<PriorSpec>& priors,
                                 const std::vector<ModelStructure>& structures,
                                 double return_period, const CovariateRef& covariate_ref,
                                 const ChainConfig& base_config,
                                 std::size_t parameter_scenarios) {
    const ScenarioCells cells =
        fit_scenario_cells(data, priors, structures, base_config, parameter_scenarios);
    return grid_for_period(cells, return_period, covariate_ref, data);
}

void write_decomposition_csv(std::span<const PeriodDecomposition> rows,
                             std::span<const std::string> source_names,
                             const std::filesystem::path& path) {
    std::string text = "period,measure,source,individual,share\n";
    const auto emit = [&](double period, const UncertaintyDecomposition& d) {
        for (std::size_t z = 0; z < d.individual.size(); ++z) {
            append_double(text, period);
            text.push_back(',');
            text += to_string(d.measure);
            text.push_back(',');
            text += source_names[z];
            text.push_back(',');
            append_double(text, d.individual[z]);
            text.push_back(',');
            append_double(text, d.total > 0.0 ? d.individual[z] / d.total : 0.0);
            text.push_back('\n');
        }
    };
    for (const auto& row : rows) {
        emit(row.return_period, row.range_decomposition);
        emit(row.return_period, row.variance_decomposition);
    }
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << text;
}

} // namespace floodbayes
