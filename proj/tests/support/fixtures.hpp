#ifndef FLOODBAYES_TESTS_FIXTURES_HPP
#define FLOODBAYES_TESTS_FIXTURES_HPP

// Deterministic synthetic fixtures shared by the unit, CLI and acceptance
// suites. Everything is a pure function of the seed.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "floodbayes/rng.hpp"
#include "floodbayes/types.hpp"

namespace fixtures {

std::vector<double> white_noise(std::uint64_t seed, std::size_t n, double mean = 5.0,
                                double sd = 0.5);

/// Level shift of `shift` after `break_after` points, gaussian noise.
std::vector<double> step_series(std::uint64_t seed, std::size_t n, std::size_t break_after,
                                double level, double shift, double sd);

std::vector<double> ramp_series(std::uint64_t seed, std::size_t n, double start, double slope,
                                double sd);

/// GEV draw by inversion.
double gev_draw(floodbayes::Rng& rng, double mu, double sigma, double xi);

std::vector<double> gev_sample(std::uint64_t seed, std::size_t n, double mu, double sigma,
                               double xi);

floodbayes::AnnualMaximaSeries series_from_values(int first_year,
                                                  const std::vector<double>& values);

/// Dataset with an all-zero covariate (for stationary analyses).
floodbayes::AlignedDataset zero_covariate_dataset(int first_year,
                                                  const std::vector<double>& values);

/// Trending synthetic station: a monthly dipole-style index whose
/// June-November mean rises roughly linearly across the record, and stage
/// generated from a GEV whose location follows that seasonal mean.
struct SyntheticStation {
    floodbayes::StationMeta meta;
    floodbayes::MonthlyIndexSeries monthly;
    floodbayes::AnnualMaximaSeries stage;
    floodbayes::CovariateSeries seasonal; // June-November means, all years
    floodbayes::AlignedDataset dataset;
    double true_mu0 = 0.0;
    double true_mu1 = 0.0;
    double true_sigma = 0.0;
    double true_xi = 0.0;
};

inline constexpr std::uint64_t synthetic_station_seed = 902713;

SyntheticStation make_trending_station(std::uint64_t seed = synthetic_station_seed);

/// Stationary heavy-tailed record (xi well above zero), zero covariate.
floodbayes::AlignedDataset make_heavy_tail_dataset(std::uint64_t seed = 4451,
                                                   std::size_t n = 40);

// CSV/JSON writers matching the canonical ingest schemas. Values are written
// with shortest round-trip formatting so a load reproduces them exactly.
void write_stage_csv(const floodbayes::AnnualMaximaSeries& series,
                     const std::filesystem::path& path);
void write_monthly_csv(const floodbayes::MonthlyIndexSeries& monthly,
                       const std::filesystem::path& path);
void write_station_json(const floodbayes::StationMeta& meta,
                        const std::filesystem::path& path);

/// stage.csv, dmi_monthly.csv and station.json under dir.
void write_station_bundle(const SyntheticStation& station, const std::filesystem::path& dir);

} // namespace fixtures

#endif
