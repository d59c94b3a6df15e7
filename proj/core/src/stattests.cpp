#include "floodbayes/stattests.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "floodbayes/errors.hpp"
#include "json.hpp"

namespace floodbayes {

namespace {

int sgn(double d) { return (d > 0.0) - (d < 0.0); }

void require_length(std::span<const double> values, std::size_t min_n, const char* test) {
    if (values.size() < min_n) {
        throw ValidationError(std::string(test) + ": need at least " + std::to_string(min_n) +
                              " values, got " + std::to_string(values.size()));
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ValidationError(std::string(test) + ": values must be finite");
        }
    }
}

/// Two-sided tail probability of the standard normal.
double normal_two_sided_p(double z) {
    return std::erfc(std::abs(z) / std::sqrt(2.0));
}

} // namespace

const char* to_string(TrendDirection d) {
    switch (d) {
    case TrendDirection::increasing: return "increasing";
    case TrendDirection::decreasing: return "decreasing";
    default: return "none";
    }
}

ChangePointResult pettitt_test(std::span<const double> values, double alpha) {
    require_length(values, 4, "pettitt_test");
    const std::size_t n = values.size();

    // U_t = sum_{i<=t} sum_{j>t} sgn(x_i - x_j), built incrementally:
    // U_t = U_{t-1} + sum_{k != t} sgn(x_t - x_k).
    ChangePointResult r;
    r.alpha = alpha;
    long long u = 0;
    long long best = -1;
    for (std::size_t t = 1; t <= n - 1; ++t) {
        long long row = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k != t - 1) {
                row += sgn(values[t - 1] - values[k]);
            }
        }
        u += row;
        const long long a = std::llabs(u);
        if (a > best) {
            best = a;
            r.tau = t;
        }
    }
    r.statistic_k = best;
    const double nn = static_cast<double>(n);
    const double k = static_cast<double>(best);
    r.p_value = std::min(1.0, 2.0 * std::exp(-6.0 * k * k / (nn * nn * nn + nn * nn)));
    r.significant = r.p_value < alpha;
    return r;
}

TrendResult mann_kendall_test(std::span<const double> values, double alpha) {
    require_length(values, 4, "mann_kendall_test");
    const std::size_t n = values.size();

    TrendResult r;
    r.alpha = alpha;
    long long s = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            s += sgn(values[j] - values[i]);
        }
    }
    r.statistic_s = s;

    // Tie-corrected variance: [n(n-1)(2n+5) - sum_g t_g(t_g-1)(2t_g+5)] / 18.
    std::map<double, long long> groups;
    for (double v : values) {
        ++groups[v];
    }
    double tie_term = 0.0;
    for (const auto& [value, count] : groups) {
        (void)value;
        const double t = static_cast<double>(count);
        tie_term += t * (t - 1.0) * (2.0 * t + 5.0);
    }
    const double nn = static_cast<double>(n);
    r.variance_s = (nn * (nn - 1.0) * (2.0 * nn + 5.0) - tie_term) / 18.0;

    if (r.variance_s <= 0.0) {
        // All values tied: degenerate, no trend information.
        r.variance_s = 0.0;
        r.z_score = 0.0;
        r.p_value = 1.0;
        r.significant = false;
        r.direction = TrendDirection::none;
        return r;
    }

    const double sd = std::sqrt(r.variance_s);
    if (s > 0) {
        r.z_score = (static_cast<double>(s) - 1.0) / sd;
    } else if (s < 0) {
        r.z_score = (static_cast<double>(s) + 1.0) / sd;
    } else {
        r.z_score = 0.0;
    }
    r.p_value = s == 0 ? 1.0 : normal_two_sided_p(r.z_score);
    r.significant = r.p_value < alpha;
    r.direction = s > 0   ? TrendDirection::increasing
                  : s < 0 ? TrendDirection::decreasing
                          : TrendDirection::none;
    return r;
}

NonstationarityAssessment assess_nonstationarity(const AnnualMaximaSeries& series,
                                                 double alpha) {
    series.validate();
    const auto& x = series.values;

    NonstationarityAssessment a;
    a.change_point = pettitt_test(x, alpha);

    if (a.change_point.significant) {
        // Single change point only; the series splits at tau and each side is
        // trend-tested when long enough.
        const std::size_t tau = a.change_point.tau;
        const std::span<const double> before(x.data(), tau);
        const std::span<const double> after(x.data() + tau, x.size() - tau);
        if (before.size() >= 4) {
            a.trend_before = mann_kendall_test(before, alpha);
        } else {
            a.warnings.push_back("subseries before change point too short for trend test (n = " +
                                 std::to_string(before.size()) + ")");
        }
        if (after.size() >= 4) {
            a.trend_after = mann_kendall_test(after, alpha);
        } else {
            a.warnings.push_back("subseries after change point too short for trend test (n = " +
                                 std::to_string(after.size()) + ")");
        }
        a.recommended_structure = ModelStructure::nonstationary;
    } else {
        a.trend_full = mann_kendall_test(x, alpha);
        a.recommended_structure = a.trend_full->significant ? ModelStructure::nonstationary
                                                            : ModelStructure::stationary;
    }
    return a;
}

namespace {

nlohmann::json trend_to_json(const TrendResult& t) {
    return {
        {"statistic_S", t.statistic_s}, {"variance_S", t.variance_s},
        {"z_score", t.z_score},         {"p_value", t.p_value},
        {"alpha", t.alpha},             {"significant", t.significant},
        {"direction", to_string(t.direction)},
    };
}

} // namespace

std::string assessment_to_json(const NonstationarityAssessment& a) {
    nlohmann::json j;
    j["change_point"] = {
        {"tau", a.change_point.tau},
        {"statistic_K", a.change_point.statistic_k},
        {"p_value", a.change_point.p_value},
        {"alpha", a.change_point.alpha},
        {"significant", a.change_point.significant},
    };
    j["trend_full"] = a.trend_full ? trend_to_json(*a.trend_full) : nlohmann::json(nullptr);
    j["trend_before"] = a.trend_before ? trend_to_json(*a.trend_before) : nlohmann::json(nullptr);
    j["trend_after"] = a.trend_after ? trend_to_json(*a.trend_after) : nlohmann::json(nullptr);
    j["recommended_structure"] = to_string(a.recommended_structure);
    j["warnings"] = a.warnings;
    return j.dump(2);
}

} // namespace floodbayes
