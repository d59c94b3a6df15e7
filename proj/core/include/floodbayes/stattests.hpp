#ifndef FLOODBAYES_STATTESTS_HPP
#define FLOODBAYES_STATTESTS_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "floodbayes/gev.hpp"
#include "floodbayes/types.hpp"

namespace floodbayes {

/// Pettitt change-point test. tau is the 1-based index of the last point of
/// the first segment; ties in the arg-max resolve to the earliest index.
struct ChangePointResult {
    std::size_t tau = 0;
    long long statistic_k = 0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool significant = false;
};

enum class TrendDirection { increasing, decreasing, none };

const char* to_string(TrendDirection d);

/// Mann-Kendall monotonic trend test with tie-corrected variance and
/// continuity correction.
struct TrendResult {
    long long statistic_s = 0;
    double variance_s = 0.0;
    double z_score = 0.0;
    double p_value = 1.0;
    double alpha = 0.05;
    bool significant = false;
    TrendDirection direction = TrendDirection::none;
};

/// Screening outcome. When the change point is significant the series is
/// split at tau and each subseries is trend-tested; otherwise the whole
/// series is. A subseries too short to test is reported absent with a
/// warning.
struct NonstationarityAssessment {
    ChangePointResult change_point;
    std::optional<TrendResult> trend_full;
    std::optional<TrendResult> trend_before;
    std::optional<TrendResult> trend_after;
    ModelStructure recommended_structure = ModelStructure::stationary;
    std::vector<std::string> warnings;
};

ChangePointResult pettitt_test(std::span<const double> values, double alpha = 0.05);

TrendResult mann_kendall_test(std::span<const double> values, double alpha = 0.05);

NonstationarityAssessment assess_nonstationarity(const AnnualMaximaSeries& series,
                                                 double alpha = 0.05);

/// JSON report mirroring NonstationarityAssessment.
std::string assessment_to_json(const NonstationarityAssessment& a);

} // namespace floodbayes

#endif
