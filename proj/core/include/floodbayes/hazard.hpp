#ifndef FLOODBAYES_HAZARD_HPP
#define FLOODBAYES_HAZARD_HPP

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "floodbayes/bayes.hpp"

namespace floodbayes {

/// Covariate value at which nonstationary return levels are evaluated.
/// last_year anchors at the final record year (the "current climate"
/// convention); fixed_value and empirical_mean support sensitivity runs.
struct CovariateRef {
    enum class Mode { last_year, fixed_value, empirical_mean };

    Mode mode = Mode::last_year;
    double value = 0.0; // used by fixed_value only

    double resolve(const AlignedDataset& data) const;

    /// "last-year" | "mean" | "fixed:<value>"
    static CovariateRef parse(const std::string& text);
    std::string to_string() const;
};

/// T-year level: the quantile at probability 1 - 1/T with the location taken
/// at the reference covariate. Requires T > 1.
double return_level(const GevParams& p, double return_period, ModelStructure structure,
                    double covariate_ref_value);

/// Per-sample return levels for one period plus ensemble summaries.
struct ReturnLevelDistribution {
    double return_period = 0.0;
    std::vector<double> levels; // one per retained sample
    double expected = 0.0;      // mean of levels
    double median = 0.0;
    double mode_estimate = 0.0; // densest histogram bin center
    double lower = 0.0;         // equal-tailed credible interval
    double upper = 0.0;
    double interval_mass = 0.9;
    double map_level = 0.0;     // level at the MAP parameter vector
};

struct ReturnCurve {
    std::vector<double> periods;
    std::vector<ReturnLevelDistribution> summaries;
};

ReturnLevelDistribution return_level_ensemble(const ParameterEnsemble& ensemble,
                                              double return_period,
                                              const CovariateRef& covariate_ref,
                                              const AlignedDataset& data,
                                              double interval_mass = 0.9);

/// Summaries for a strictly increasing list of periods, all > 1.
ReturnCurve return_curve(const ParameterEnsemble& ensemble, std::span<const double> periods,
                         const CovariateRef& covariate_ref, const AlignedDataset& data,
                         double interval_mass = 0.9);

/// Recurrence interval assigned to a stationary design level under the
/// nonstationary ensemble: the reciprocal of the ensemble-mean exceedance
/// probability at the reference covariate. +infinity when the level sits
/// above every sample's support.
double equivalent_return_period(double stationary_level, const ParameterEnsemble& ns_ensemble,
                                const CovariateRef& covariate_ref, const AlignedDataset& data);

/// Empirical survival S(x) = fraction of levels strictly above x, evaluated
/// at the sorted unique levels. Nonincreasing; S(max) = 0.
std::vector<std::pair<double, double>> survival_function(std::span<const double> levels);

/// Plot-ready CSV, header `period,expected,median,mode,lo,hi,map_level`.
void write_return_curve_csv(const ReturnCurve& curve, const std::filesystem::path& path);

/// Plot-ready CSV, header `level,survival`.
void write_survival_csv(std::span<const std::pair<double, double>> survival,
                        const std::filesystem::path& path);

} // namespace floodbayes

#endif
