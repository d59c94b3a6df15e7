#ifndef FLOODBAYES_INGEST_HPP
#define FLOODBAYES_INGEST_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "floodbayes/types.hpp"

namespace floodbayes {

/// Canonical long-format CSVs, one observation per row, UTF-8, '.' decimal:
/// stage files carry the header `year,stage_m`, monthly index files carry
/// `year,month,value`. Wide layouts must be converted upstream.
AnnualMaximaSeries load_annual_maxima(const std::filesystem::path& path,
                                      int min_length = AnnualMaximaSeries::default_min_length);

MonthlyIndexSeries load_monthly_index(const std::filesystem::path& path);

StationMeta load_station_meta(const std::filesystem::path& path);

/// Arithmetic mean of the monthly index over the inclusive month window
/// (default June-November), one value per year. Years missing any window
/// month are omitted, never imputed; omitted years are appended to
/// *omitted_years when given. Cross-year windows are unsupported.
CovariateSeries seasonal_mean_covariate(const MonthlyIndexSeries& monthly,
                                        int start_month = 6, int end_month = 11,
                                        std::vector<int>* omitted_years = nullptr);

/// Restrict the covariate to exactly the stage years, order-matched. Throws
/// naming the first stage year missing from the covariate.
AlignedDataset align(const AnnualMaximaSeries& series, const CovariateSeries& covariate);

/// Single JSON document with fields `meta`, `years`, `stage_m`, `covariate`.
std::string dataset_to_json(const AlignedDataset& data);
AlignedDataset dataset_from_json(const std::string& text);

void save_dataset(const AlignedDataset& data, const std::filesystem::path& path);
AlignedDataset load_dataset(const std::filesystem::path& path);

} // namespace floodbayes

#endif
