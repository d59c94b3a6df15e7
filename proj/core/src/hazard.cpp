#include "floodbayes/hazard.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "floodbayes/errors.hpp"

namespace floodbayes {

namespace {

/// Compensated (Kahan) mean; summary statistics are compared against
/// independently recomputed means at tight tolerances.
double kahan_mean(std::span<const double> x) {
    double sum = 0.0;
    double carry = 0.0;
    for (double v : x) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(x.size());
}

double sorted_quantile(const std::vector<double>& sorted, double p) {
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double sorted_median(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) {
        return sorted[n / 2];
    }
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

/// Densest-bin center with Freedman-Diaconis bin width; degenerate spreads
/// fall back to the median.
double histogram_mode(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    const double iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
    const double span = sorted.back() - sorted.front();
    if (!(width > 0.0) || !(span > 0.0)) {
        return sorted_median(sorted);
    }
    const std::size_t bins = std::min<std::size_t>(
        static_cast<std::size_t>(std::ceil(span / width)), 4 * n);
    std::vector<std::size_t> counts(bins, 0);
    for (double v : sorted) {
        std::size_t idx = static_cast<std::size_t>((v - sorted.front()) / span * bins);
        idx = std::min(idx, bins - 1);
        ++counts[idx];
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < bins; ++i) {
        if (counts[i] > counts[best]) {
            best = i;
        }
    }
    return sorted.front() + (static_cast<double>(best) + 0.5) * span / bins;
}

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

} // namespace

double CovariateRef::resolve(const AlignedDataset& data) const {
    switch (mode) {
    case Mode::fixed_value:
        if (!std::isfinite(value)) {
            throw ValidationError("covariate reference: fixed value must be finite");
        }
        return value;
    case Mode::empirical_mean: {
        if (data.covariate.values.empty()) {
            throw ValidationError("covariate reference: empty covariate");
        }
        return kahan_mean(data.covariate.values);
    }
    case Mode::last_year:
    default:
        if (data.covariate.values.empty()) {
            throw ValidationError("covariate reference: empty covariate");
        }
        return data.covariate.values.back();
    }
}

CovariateRef CovariateRef::parse(const std::string& text) {
    CovariateRef ref;
    if (text == "last-year") {
        ref.mode = Mode::last_year;
    } else if (text == "mean") {
        ref.mode = Mode::empirical_mean;
    } else if (text.rfind("fixed:", 0) == 0) {
        ref.mode = Mode::fixed_value;
        try {
            ref.value = std::stod(text.substr(6));
        } catch (const std::exception&) {
            throw ValidationError("covariate reference: cannot parse '" + text + "'");
        }
    } else {
        throw ValidationError("covariate reference must be last-year, mean, or fixed:<value>");
    }
    return ref;
}

std::string CovariateRef::to_string() const {
    switch (mode) {
    case Mode::fixed_value: {
        std::string s = "fixed:";
        append_double(s, value);
        return s;
    }
    case Mode::empirical_mean:
        return "mean";
    case Mode::last_year:
    default:
        return "last-year";
    }
}

double return_level(const GevParams& p, double return_period, ModelStructure structure,
                    double covariate_ref_value) {
    if (!(return_period > 1.0)) {
        throw std::domain_error("return_level: return period must exceed 1 year");
    }
    const double mu = structure == ModelStructure::nonstationary
                          ? location_at(p, covariate_ref_value)
                          : p.mu0;
    return gev_quantile(1.0 - 1.0 / return_period, mu, p.sigma, p.xi);
}

ReturnLevelDistribution return_level_ensemble(const ParameterEnsemble& ensemble,
                                              double return_period,
                                              const CovariateRef& covariate_ref,
                                              const AlignedDataset& data,
                                              double interval_mass) {
    if (ensemble.samples.empty()) {
        throw ValidationError("return_level_ensemble: empty ensemble");
    }
    if (!(interval_mass > 0.0 && interval_mass < 1.0)) {
        throw ValidationError("credible interval mass must lie in (0, 1)");
    }
    const double phi = covariate_ref.resolve(data);

    ReturnLevelDistribution dist;
    dist.return_period = return_period;
    dist.interval_mass = interval_mass;
    dist.levels.reserve(ensemble.size());
    for (const GevParams& p : ensemble.samples) {
        dist.levels.push_back(return_level(p, return_period, ensemble.structure, phi));
    }

    std::vector<double> sorted = dist.levels;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    dist.expected = kahan_mean(dist.levels);
    dist.median = sorted_median(sorted);
    dist.mode_estimate = histogram_mode(sorted);

    // Equal-tailed order-statistic interval: drop round(alpha*n) samples per
    // tail so the empirical coverage stays within 1/n of the requested mass.
    const double tail = 0.5 * (1.0 - interval_mass);
    std::size_t drop = static_cast<std::size_t>(std::llround(tail * static_cast<double>(n)));
    drop = std::min(drop, (n - 1) / 2);
    dist.lower = sorted[drop];
    dist.upper = sorted[n - 1 - drop];

    dist.map_level = return_level(map_estimate(ensemble), return_period, ensemble.structure, phi);
    return dist;
}

ReturnCurve return_curve(const ParameterEnsemble& ensemble, std::span<const double> periods,
                         const CovariateRef& covariate_ref, const AlignedDataset& data,
                         double interval_mass) {
    if (periods.empty()) {
        throw ValidationError("return_curve: no return periods given");
    }
    for (std::size_t i = 0; i < periods.size(); ++i) {
        if (!(periods[i] > 1.0)) {
            throw std::domain_error("return_curve: return periods must exceed 1 year");
        }
        if (i > 0 && !(periods[i] > periods[i - 1])) {
            throw ValidationError("return_curve: periods must be strictly increasing");
        }
    }
    ReturnCurve curve;
    curve.periods.assign(periods.begin(), periods.end());
    curve.summaries.reserve(periods.size());
    for (double t : periods) {
        curve.summaries.push_back(
            return_level_ensemble(ensemble, t, covariate_ref, data, interval_mass));
    }
    return curve;
}

double equivalent_return_period(double stationary_level, const ParameterEnsemble& ns_ensemble,
                                const CovariateRef& covariate_ref, const AlignedDataset& data) {
    if (!std::isfinite(stationary_level)) {
        throw ValidationError("equivalent_return_period: level must be finite");
    }
    if (ns_ensemble.samples.empty()) {
        throw ValidationError("equivalent_return_period: empty ensemble");
    }
    const double phi = covariate_ref.resolve(data);

    std::vector<double> exceedance;
    exceedance.reserve(ns_ensemble.size());
    for (const GevParams& p : ns_ensemble.samples) {
        const double mu = ns_ensemble.structure == ModelStructure::nonstationary
                              ? location_at(p, phi)
                              : p.mu0;
        exceedance.push_back(std::max(0.0, 1.0 - gev_cdf(stationary_level, mu, p.sigma, p.xi)));
    }
    const double mean_exceedance = kahan_mean(exceedance);
    if (mean_exceedance <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 1.0 / mean_exceedance;
}

std::vector<std::pair<double, double>> survival_function(std::span<const double> levels) {
    if (levels.empty()) {
        throw ValidationError("survival_function: empty input");
    }
    std::vector<double> sorted(levels.begin(), levels.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());

    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) {
            continue; // keep unique levels only
        }
        const double above = static_cast<double>(sorted.size() - (i + 1));
        out.emplace_back(sorted[i], above / n);
    }
    return out;
}

void write_return_curve_csv(const ReturnCurve& curve, const std::filesystem::path& path) {
    std::string text = "period,expected,median,mode,lo,hi,map_level\n";
    for (const auto& s : curve.summaries) {
        append_double(text, s.return_period);
        text.push_back(',');
        append_double(text, s.expected);
        text.push_back(',');
        append_double(text, s.median);
        text.push_back(',');
        append_double(text, s.mode_estimate);
        text.push_back(',');
        append_double(text, s.lower);
        text.push_back(',');
        append_double(text, s.upper);
        text.push_back(',');
        append_double(text, s.map_level);
        text.push_back('\n');
    }
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << text;
}

void write_survival_csv(std::span<const std::pair<double, double>> survival,
                        const std::filesystem::path& path) {
    std::string text = "level,survival\n";
    for (const auto& [level, s] : survival) {
        append_double(text, level);
        text.push_back(',');
        append_double(text, s);
        text.push_back('\n');
    }
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << text;
}

} // namespace floodbayes
