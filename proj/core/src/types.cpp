#include "floodbayes/types.hpp"

#include <cmath>
#include <string>

#include "floodbayes/errors.hpp"

namespace floodbayes {

void StationMeta::validate() const {
    if (record_start_year > record_end_year) {
        throw ValidationError("station " + station_id + ": record_start_year " +
                              std::to_string(record_start_year) + " > record_end_year " +
                              std::to_string(record_end_year));
    }
    if (!(basin_area_km2 > 0.0)) {
        throw ValidationError("station " + station_id + ": basin_area_km2 must be > 0");
    }
    if (!(latitude >= -90.0 && latitude <= 90.0)) {
        throw ValidationError("station " + station_id + ": latitude out of [-90, 90]");
    }
    if (!(longitude >= -180.0 && longitude <= 180.0)) {
        throw ValidationError("station " + station_id + ": longitude out of [-180, 180]");
    }
}

void AnnualMaximaSeries::validate(int min_length) const {
    if (years.size() != values.size()) {
        throw ValidationError("annual maxima series: years/values length mismatch");
    }
    for (std::size_t i = 1; i < years.size(); ++i) {
        if (years[i] != years[i - 1] + 1) {
            if (years[i] <= years[i - 1]) {
                throw ValidationError("annual maxima series: years not strictly increasing at " +
                                      std::to_string(years[i]));
            }
            throw ValidationError("annual maxima series: missing year " +
                                  std::to_string(years[i - 1] + 1));
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] <= 0.0) {
            throw ValidationError("annual maxima series: nonpositive or nonfinite stage in year " +
                                  std::to_string(years[i]));
        }
    }
    if (static_cast<int>(years.size()) < min_length) {
        throw ValidationError("annual maxima series length " + std::to_string(years.size()) +
                              " below minimum " + std::to_string(min_length));
    }
    if (meta) {
        meta->validate();
        if (years.front() < meta->record_start_year || years.back() > meta->record_end_year) {
            throw ValidationError("annual maxima series: years " + std::to_string(years.front()) +
                                  "-" + std::to_string(years.back()) +
                                  " outside the station record " +
                                  std::to_string(meta->record_start_year) + "-" +
                                  std::to_string(meta->record_end_year));
        }
    }
}

void MonthlyIndexSeries::validate() const {
    for (const auto& e : entries) {
        if (e.month < 1 || e.month > 12) {
            throw ValidationError("monthly index: month " + std::to_string(e.month) +
                                  " out of 1-12 in year " + std::to_string(e.year));
        }
        if (!std::isfinite(e.value)) {
            throw ValidationError("monthly index: nonfinite value at " + std::to_string(e.year) +
                                  "-" + std::to_string(e.month));
        }
    }
    for (std::size_t i = 0; i < entries.size(); ++i) {
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            if (entries[i].year == entries[j].year && entries[i].month == entries[j].month) {
                throw ValidationError("monthly index: duplicate entry for " +
                                      std::to_string(entries[i].year) + "-" +
                                      std::to_string(entries[i].month));
            }
        }
    }
}

void CovariateSeries::validate() const {
    if (years.size() != values.size()) {
        throw ValidationError("covariate series: years/values length mismatch");
    }
    for (std::size_t i = 1; i < years.size(); ++i) {
        if (years[i] <= years[i - 1]) {
            throw ValidationError("covariate series: years not strictly increasing at " +
                                  std::to_string(years[i]));
        }
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ValidationError("covariate series: nonfinite value");
        }
    }
}

void AlignedDataset::validate() const {
    series.validate();
    covariate.validate();
    if (covariate.years != series.years) {
        throw ValidationError("aligned dataset: covariate years do not match stage years");
    }
}

} // namespace floodbayes
