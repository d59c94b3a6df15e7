#ifndef FLOODBAYES_TYPES_HPP
#define FLOODBAYES_TYPES_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace floodbayes {

/// Gauging-station descriptor, matching the usual station inventory columns.
struct StationMeta {
    std::string station_id;
    std::string name;
    std::string river_basin;
    double latitude = 0.0;  // decimal degrees
    double longitude = 0.0; // decimal degrees
    double basin_area_km2 = 0.0;
    int record_start_year = 0;
    int record_end_year = 0;

    void validate() const;
};

/// Instantaneous annual-maximum stage record for one station.
/// Years are consecutive integers with no gaps; stages are meters, positive.
struct AnnualMaximaSeries {
    std::vector<int> years;
    std::vector<double> values;
    std::optional<StationMeta> meta;

    static constexpr int default_min_length = 10;

    std::size_t size() const { return years.size(); }
    void validate(int min_length = default_min_length) const;
};

struct MonthlyIndexEntry {
    int year = 0;
    int month = 0; // 1-12
    double value = 0.0;
};

/// Monthly climate-index series (e.g. a sea surface temperature dipole index).
struct MonthlyIndexSeries {
    std::vector<MonthlyIndexEntry> entries;
    void validate() const;
};

/// One scalar covariate value per year.
struct CovariateSeries {
    std::vector<int> years;
    std::vector<double> values;

    std::size_t size() const { return years.size(); }
    void validate() const;
};

/// Stage series plus covariate restricted to exactly the stage years.
struct AlignedDataset {
    AnnualMaximaSeries series;
    CovariateSeries covariate;

    std::size_t size() const { return series.size(); }
    void validate() const;
};

} // namespace floodbayes

#endif
