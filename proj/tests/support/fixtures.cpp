#include "fixtures.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "floodbayes/gev.hpp"

namespace fixtures {

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("fixtures: cannot write " + path.string());
    }
    out << text;
}

} // namespace

std::vector<double> white_noise(std::uint64_t seed, std::size_t n, double mean, double sd) {
    floodbayes::Rng rng(seed);
    std::vector<double> x(n);
    for (double& v : x) {
        v = rng.normal(mean, sd);
    }
    return x;
}

std::vector<double> step_series(std::uint64_t seed, std::size_t n, std::size_t break_after,
                                double level, double shift, double sd) {
    floodbayes::Rng rng(seed);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.normal(i < break_after ? level : level + shift, sd);
    }
    return x;
}

std::vector<double> ramp_series(std::uint64_t seed, std::size_t n, double start, double slope,
                                double sd) {
    floodbayes::Rng rng(seed);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.normal(start + slope * static_cast<double>(i), sd);
    }
    return x;
}

double gev_draw(floodbayes::Rng& rng, double mu, double sigma, double xi) {
    double u = rng.uniform01();
    while (u <= 0.0) {
        u = rng.uniform01();
    }
    return floodbayes::gev_quantile(u, mu, sigma, xi);
}

std::vector<double> gev_sample(std::uint64_t seed, std::size_t n, double mu, double sigma,
                               double xi) {
    floodbayes::Rng rng(seed);
    std::vector<double> x(n);
    for (double& v : x) {
        v = gev_draw(rng, mu, sigma, xi);
    }
    return x;
}

floodbayes::AnnualMaximaSeries series_from_values(int first_year,
                                                  const std::vector<double>& values) {
    floodbayes::AnnualMaximaSeries series;
    series.values = values;
    series.years.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        series.years[i] = first_year + static_cast<int>(i);
    }
    return series;
}

floodbayes::AlignedDataset zero_covariate_dataset(int first_year,
                                                  const std::vector<double>& values) {
    floodbayes::AlignedDataset data;
    data.series = series_from_values(first_year, values);
    data.covariate.years = data.series.years;
    data.covariate.values.assign(values.size(), 0.0);
    return data;
}

SyntheticStation make_trending_station(std::uint64_t seed) {
    constexpr int first_year = 1960;
    constexpr std::size_t n_years = 60;

    SyntheticStation st;
    st.true_mu0 = 5.0;
    st.true_mu1 = 1.0;
    st.true_sigma = 0.45;
    st.true_xi = 0.05;

    floodbayes::Rng index_rng(floodbayes::derive_seed(seed, "monthly-index"));
    for (std::size_t i = 0; i < n_years; ++i) {
        const int year = first_year + static_cast<int>(i);
        const double base =
            -1.2 + 2.4 * static_cast<double>(i) / static_cast<double>(n_years - 1);
        for (int month = 1; month <= 12; ++month) {
            const double seasonal =
                0.22 * std::sin(2.0 * 3.14159265358979323846 * (month - 1) / 12.0);
            st.monthly.entries.push_back(
                {year, month, base + seasonal + index_rng.normal(0.0, 0.10)});
        }
    }

    // Realized June-November means drive the stage record.
    st.seasonal.years.resize(n_years);
    st.seasonal.values.resize(n_years);
    for (std::size_t i = 0; i < n_years; ++i) {
        double sum = 0.0;
        for (int month = 6; month <= 11; ++month) {
            sum += st.monthly.entries[i * 12 + (month - 1)].value;
        }
        st.seasonal.years[i] = first_year + static_cast<int>(i);
        st.seasonal.values[i] = sum / 6.0;
    }

    floodbayes::Rng stage_rng(floodbayes::derive_seed(seed, "stage"));
    std::vector<double> stage(n_years);
    for (std::size_t i = 0; i < n_years; ++i) {
        const double mu = st.true_mu0 + st.true_mu1 * st.seasonal.values[i];
        stage[i] = gev_draw(stage_rng, mu, st.true_sigma, st.true_xi);
    }
    st.stage = series_from_values(first_year, stage);

    st.meta.station_id = "900";
    st.meta.name = "Synthetic Gorge";
    st.meta.river_basin = "Synthetic";
    st.meta.latitude = 28.0;
    st.meta.longitude = 84.5;
    st.meta.basin_area_km2 = 4200.0;
    st.meta.record_start_year = first_year;
    st.meta.record_end_year = first_year + static_cast<int>(n_years) - 1;
    st.stage.meta = st.meta;

    st.dataset.series = st.stage;
    st.dataset.covariate = st.seasonal;
    st.dataset.validate();
    return st;
}

floodbayes::AlignedDataset make_heavy_tail_dataset(std::uint64_t seed, std::size_t n) {
    return zero_covariate_dataset(1980, gev_sample(seed, n, 5.0, 1.0, 0.25));
}

void write_stage_csv(const floodbayes::AnnualMaximaSeries& series,
                     const std::filesystem::path& path) {
    std::string text = "year,stage_m\n";
    for (std::size_t i = 0; i < series.years.size(); ++i) {
        text += std::to_string(series.years[i]);
        text.push_back(',');
        append_double(text, series.values[i]);
        text.push_back('\n');
    }
    write_text(text, path);
}

void write_monthly_csv(const floodbayes::MonthlyIndexSeries& monthly,
                       const std::filesystem::path& path) {
    std::string text = "year,month,value\n";
    for (const auto& e : monthly.entries) {
        text += std::to_string(e.year);
        text.push_back(',');
        text += std::to_string(e.month);
        text.push_back(',');
        append_double(text, e.value);
        text.push_back('\n');
    }
    write_text(text, path);
}

void write_station_json(const floodbayes::StationMeta& meta,
                        const std::filesystem::path& path) {
    std::string text = "{\n";
    text += "  \"station_id\": \"" + meta.station_id + "\",\n";
    text += "  \"name\": \"" + meta.name + "\",\n";
    text += "  \"river_basin\": \"" + meta.river_basin + "\",\n";
    text += "  \"latitude\": ";
    append_double(text, meta.latitude);
    text += ",\n  \"longitude\": ";
    append_double(text, meta.longitude);
    text += ",\n  \"basin_area_km2\": ";
    append_double(text, meta.basin_area_km2);
    text += ",\n  \"record_start_year\": " + std::to_string(meta.record_start_year);
    text += ",\n  \"record_end_year\": " + std::to_string(meta.record_end_year);
    text += "\n}\n";
    write_text(text, path);
}

void write_station_bundle(const SyntheticStation& station, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_stage_csv(station.stage, dir / "stage.csv");
    write_monthly_csv(station.monthly, dir / "dmi_monthly.csv");
    write_station_json(station.meta, dir / "station.json");
}

} // namespace fixtures
