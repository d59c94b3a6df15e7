#include "floodbayes/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "floodbayes/errors.hpp"
#include "json.hpp"

namespace floodbayes {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open file: " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

int parse_int(const std::string& s, std::size_t line, const char* what) {
    int value = 0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw FormatError(std::string("cannot parse ") + what + " '" + s + "'", line);
    }
    return value;
}

double parse_double(const std::string& s, std::size_t line, const char* what) {
    double value = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw FormatError(std::string("cannot parse ") + what + " '" + s + "'", line);
    }
    return value;
}

} // namespace

AnnualMaximaSeries load_annual_maxima(const std::filesystem::path& path, int min_length) {
    const auto lines = read_lines(path);

    AnnualMaximaSeries series;
    if (!lines.empty()) {
        if (lines[0] != "year,stage_m") {
            throw FormatError("expected header 'year,stage_m', got '" + lines[0] + "'", 1);
        }
        std::vector<std::pair<int, double>> rows;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) {
                continue;
            }
            const auto fields = split_csv(lines[i]);
            if (fields.size() != 2) {
                throw FormatError("expected 2 fields, got " + std::to_string(fields.size()),
                                  i + 1);
            }
            rows.emplace_back(parse_int(fields[0], i + 1, "year"),
                              parse_double(fields[1], i + 1, "stage"));
        }
        std::stable_sort(rows.begin(), rows.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [year, stage] : rows) {
            series.years.push_back(year);
            series.values.push_back(stage);
        }
    }
    series.validate(min_length);
    return series;
}

MonthlyIndexSeries load_monthly_index(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) {
        throw FormatError("empty monthly index file: " + path.string(), 0);
    }
    if (lines[0] != "year,month,value") {
        throw FormatError("expected header 'year,month,value', got '" + lines[0] + "'", 1);
    }

    MonthlyIndexSeries monthly;
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) {
            continue;
        }
        const auto fields = split_csv(lines[i]);
        if (fields.size() != 3) {
            throw FormatError("expected 3 fields, got " + std::to_string(fields.size()), i + 1);
        }
        MonthlyIndexEntry e;
        e.year = parse_int(fields[0], i + 1, "year");
        e.month = parse_int(fields[1], i + 1, "month");
        e.value = parse_double(fields[2], i + 1, "index value");
        if (e.month < 1 || e.month > 12) {
            throw ValidationError("month " + std::to_string(e.month) + " out of 1-12 (line " +
                                  std::to_string(i + 1) + ")");
        }
        if (!seen.insert({e.year, e.month}).second) {
            throw ValidationError("duplicate monthly entry for " + std::to_string(e.year) + "-" +
                                  std::to_string(e.month) + " (line " + std::to_string(i + 1) +
                                  ")");
        }
        monthly.entries.push_back(e);
    }
    // Canonical order makes downstream results independent of row order.
    std::sort(monthly.entries.begin(), monthly.entries.end(),
              [](const MonthlyIndexEntry& a, const MonthlyIndexEntry& b) {
                  return a.year != b.year ? a.year < b.year : a.month < b.month;
              });
    monthly.validate();
    return monthly;
}

StationMeta load_station_meta(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid station metadata JSON: " + std::string(e.what()));
    }
    StationMeta meta;
    try {
        meta.station_id = j.at("station_id").get<std::string>();
        meta.name = j.at("name").get<std::string>();
        meta.river_basin = j.at("river_basin").get<std::string>();
        meta.latitude = j.at("latitude").get<double>();
        meta.longitude = j.at("longitude").get<double>();
        meta.basin_area_km2 = j.at("basin_area_km2").get<double>();
        meta.record_start_year = j.at("record_start_year").get<int>();
        meta.record_end_year = j.at("record_end_year").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("station metadata: " + std::string(e.what()));
    }
    meta.validate();
    return meta;
}

CovariateSeries seasonal_mean_covariate(const MonthlyIndexSeries& monthly, int start_month,
                                        int end_month, std::vector<int>* omitted_years) {
    if (start_month < 1 || start_month > 12 || end_month < 1 || end_month > 12) {
        throw ValidationError("seasonal window months must lie in 1-12");
    }
    if (start_month > end_month) {
        throw ValidationError("cross-year seasonal windows are unsupported (start_month > end_month)");
    }
    monthly.validate();

    std::map<int, std::map<int, double>> by_year;
    for (const auto& e : monthly.entries) {
        by_year[e.year][e.month] = e.value;
    }

    CovariateSeries covariate;
    const int window = end_month - start_month + 1;
    for (const auto& [year, months] : by_year) {
        double sum = 0.0;
        int have = 0;
        for (int m = start_month; m <= end_month; ++m) {
            auto it = months.find(m);
            if (it != months.end()) {
                sum += it->second;
                ++have;
            }
        }
        if (have == window) {
            covariate.years.push_back(year);
            covariate.values.push_back(sum / window);
        } else if (omitted_years) {
            omitted_years->push_back(year);
        }
    }
    if (covariate.years.empty()) {
        throw ValidationError("seasonal mean covariate: no year has the full month window");
    }
    covariate.validate();
    return covariate;
}

AlignedDataset align(const AnnualMaximaSeries& series, const CovariateSeries& covariate) {
    series.validate();
    covariate.validate();

    std::map<int, double> by_year;
    for (std::size_t i = 0; i < covariate.years.size(); ++i) {
        by_year[covariate.years[i]] = covariate.values[i];
    }

    AlignedDataset data;
    data.series = series;
    for (int year : series.years) {
        auto it = by_year.find(year);
        if (it == by_year.end()) {
            throw ValidationError("covariate missing stage year " + std::to_string(year));
        }
        data.covariate.years.push_back(year);
        data.covariate.values.push_back(it->second);
    }
    data.validate();
    return data;
}

namespace {

nlohmann::json meta_to_json(const StationMeta& m) {
    return {
        {"station_id", m.station_id},
        {"name", m.name},
        {"river_basin", m.river_basin},
        {"latitude", m.latitude},
        {"longitude", m.longitude},
        {"basin_area_km2", m.basin_area_km2},
        {"record_start_year", m.record_start_year},
        {"record_end_year", m.record_end_year},
    };
}

} // namespace

std::string dataset_to_json(const AlignedDataset& data) {
    data.validate();
    nlohmann::json j;
    j["meta"] = data.series.meta ? meta_to_json(*data.series.meta) : nlohmann::json(nullptr);
    j["years"] = data.series.years;
    j["stage_m"] = data.series.values;
    j["covariate"] = data.covariate.values;
    return j.dump(2);
}

AlignedDataset dataset_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid dataset JSON: " + std::string(e.what()));
    }
    AlignedDataset data;
    try {
        data.series.years = j.at("years").get<std::vector<int>>();
        data.series.values = j.at("stage_m").get<std::vector<double>>();
        data.covariate.years = data.series.years;
        data.covariate.values = j.at("covariate").get<std::vector<double>>();
        if (!j.at("meta").is_null()) {
            const auto& m = j.at("meta");
            StationMeta meta;
            meta.station_id = m.at("station_id").get<std::string>();
            meta.name = m.at("name").get<std::string>();
            meta.river_basin = m.at("river_basin").get<std::string>();
            meta.latitude = m.at("latitude").get<double>();
            meta.longitude = m.at("longitude").get<double>();
            meta.basin_area_km2 = m.at("basin_area_km2").get<double>();
            meta.record_start_year = m.at("record_start_year").get<int>();
            meta.record_end_year = m.at("record_end_year").get<int>();
            data.series.meta = meta;
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("dataset JSON: " + std::string(e.what()));
    }
    data.validate();
    return data;
}

void save_dataset(const AlignedDataset& data, const std::filesystem::path& path) {
    const std::string text = dataset_to_json(data);
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << text << '\n';
}

AlignedDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return dataset_from_json(buffer.str());
}

} // namespace floodbayes
