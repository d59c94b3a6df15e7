#ifndef FLOODBAYES_UQ_HPP
#define FLOODBAYES_UQ_HPP

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "floodbayes/hazard.hpp"

namespace floodbayes {

enum class Measure { range, variance };

const char* to_string(Measure m);
Measure measure_from_string(const std::string& s);

/// Fully crossed table of return-level estimates, one scenario per
/// uncertainty source. Flat row-major storage with the first source slowest.
struct ScenarioGrid {
    std::vector<std::string> source_names; // default: prior, structure, parameter
    std::vector<std::size_t> scenario_counts;
    std::vector<double> estimates;

    std::size_t source_count() const { return scenario_counts.size(); }
    std::size_t cell_count() const;
    double at(std::span<const std::size_t> coords) const;
    void validate() const;
};

/// max - min of a nonempty sequence.
double range_measure(std::span<const double> y);

/// Population variance (1/n) sum (y_i - mean)^2 of a nonempty sequence.
double variance_measure(std::span<const double> y);

/// Spread of the estimates when the first z sources vary jointly and the
/// remaining sources are pinned to fixed_after (one scenario index per
/// source z+1..Z). z counts leading sources, 1 <= z <= Z.
double conditional_cumulative(const ScenarioGrid& grid, std::size_t z,
                              std::span<const std::size_t> fixed_after, Measure measure);

/// Average of conditional_cumulative over every fixed_after combination.
double marginal_cumulative(const ScenarioGrid& grid, std::size_t z, Measure measure);

/// Ordered attribution of spread to sources: cumulative[z-1] is the marginal
/// cumulative uncertainty up to source z, individual terms are successive
/// differences and telescope to the total.
struct UncertaintyDecomposition {
    Measure measure = Measure::range;
    std::vector<double> cumulative;
    std::vector<double> individual;
    double total = 0.0;
};

/// Throws NumericError if the cumulative sequence decreases beyond floating
/// point noise; sub-noise negatives in the differences are floored at zero.
UncertaintyDecomposition decompose(const ScenarioGrid& grid, Measure measure);

/// Functional-ANOVA variance components of the grid: main effects as
/// scenario-conditional means minus the grand mean, pairwise interactions as
/// two-way conditional means minus both mains and the grand mean.
/// residual_variance carries all order-3+ interaction mass, so the listed
/// components plus the residual always reconstruct total_variance.
struct AnovaEffects {
    double grand_mean = 0.0;
    double total_variance = 0.0;
    std::vector<double> main_effect_variance; // per source
    struct Interaction {
        std::size_t first = 0;
        std::size_t second = 0;
        double variance = 0.0;
    };
    std::vector<Interaction> interaction_variance; // all pairs, first < second
    double residual_variance = 0.0;
};

AnovaEffects anova_effects(const ScenarioGrid& grid);

/// One MCMC chain per (prior, structure) cell, each thinned to the same
/// number of equally spaced retained samples; thinned index k is the shared
/// parameter-scenario coordinate across cells. Cell seeds derive from
/// base_config.seed via derive_seed(seed, "cell", cell_index) with
/// cell_index = prior_index * n_structures + structure_index.
struct ScenarioCells {
    std::vector<PriorSpec> priors;
    std::vector<ModelStructure> structures;
    std::size_t parameter_scenarios = 0;
    std::vector<ParameterEnsemble> cells;        // prior-major order
    std::vector<std::vector<GevParams>> thinned; // per cell

    std::size_t cell_index(std::size_t prior, std::size_t structure) const {
        return prior * structures.size() + structure;
    }
};

ScenarioCells fit_scenario_cells(const AlignedDataset& data, std::vector<PriorSpec> priors,
                                 std::vector<ModelStructure> structures,
                                 const ChainConfig& base_config,
                                 std::size_t parameter_scenarios, bool parallel = true);

/// (prior, structure, parameter) grid of T-year levels from fitted cells.
ScenarioGrid grid_for_period(const ScenarioCells& cells, double return_period,
                             const CovariateRef& covariate_ref, const AlignedDataset& data);

/// fit_scenario_cells + grid_for_period in one call.
ScenarioGrid build_scenario_grid(const AlignedDataset& data,
                                 const std::vector<PriorSpec>& priors,
                                 const std::vector<ModelStructure>& structures,
                                 double return_period, const CovariateRef& covariate_ref,
                                 const ChainConfig& base_config,
                                 std::size_t parameter_scenarios);

/// CSV rows `period,measure,source,individual,share` for a set of per-period
/// decompositions.
struct PeriodDecomposition {
    double return_period = 0.0;
    UncertaintyDecomposition range_decomposition;
    UncertaintyDecomposition variance_decomposition;
    AnovaEffects anova;
};

void write_decomposition_csv(std::span<const PeriodDecomposition> rows,
                             std::span<const std::string> source_names,
                             const std::filesystem::path& path);

} // namespace floodbayes

#endif
