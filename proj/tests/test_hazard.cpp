#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include "doctest.h"
#include "floodbayes/errors.hpp"
#include "floodbayes/hazard.hpp"
#include "floodbayes/rng.hpp"
#include "support/fixtures.hpp"

using namespace floodbayes;
namespace fs = std::filesystem;

namespace {

/// Hand-built ensemble with random but valid samples; fast and MCMC-free.
ParameterEnsemble synthetic_ensemble(std::uint64_t seed, std::size_t n,
                                     ModelStructure structure = ModelStructure::stationary,
                                     double xi_center = 0.05) {
    Rng rng(seed);
    ParameterEnsemble e;
    e.structure = structure;
    e.prior = PriorSpec::gaussian(100.0);
    e.config.seed = seed;
    e.acceptance_rate = 0.3;
    for (std::size_t i = 0; i < n; ++i) {
        GevParams p;
        p.mu0 = rng.normal(6.0, 0.3);
        p.mu1 = structure == ModelStructure::nonstationary ? rng.normal(1.0, 0.2) : 0.0;
        p.sigma = 0.4 + 0.3 * rng.uniform01();
        p.xi = rng.normal(xi_center, 0.08);
        e.samples.push_back(p);
        e.log_posteriors.push_back(-50.0 - rng.uniform01());
    }
    return e;
}

ParameterEnsemble degenerate_ensemble(const GevParams& p, ModelStructure structure) {
    ParameterEnsemble e;
    e.structure = structure;
    e.prior = PriorSpec::gaussian(100.0);
    e.acceptance_rate = 0.3;
    e.samples = {p};
    e.log_posteriors = {-1.0};
    return e;
}

long double independent_mean(const std::vector<double>& x) {
    long double sum = 0.0L;
    for (double v : x) {
        sum += v;
    }
    return sum / static_cast<long double>(x.size());
}

} // namespace

TEST_SUITE("hazard") {

TEST_CASE("return level closed forms") {
    const GevParams gumbel{0.0, 0.0, 1.0, 0.0};
    CHECK(return_level(gumbel, 100.0, ModelStructure::stationary, 0.0) ==
          doctest::Approx(-std::log(-std::log(0.99))).epsilon(1e-12));
    CHECK(return_level(gumbel, 100.0, ModelStructure::stationary, 0.0) ==
          doctest::Approx(4.6001).epsilon(1e-4));
    CHECK(return_level(gumbel, 2.0, ModelStructure::stationary, 0.0) ==
          doctest::Approx(-std::log(std::log(2.0))).epsilon(1e-12));
    CHECK(return_level({3.0, 0.0, 2.0, 0.0}, 2.0, ModelStructure::stationary, 0.0) ==
          doctest::Approx(3.0 + 2.0 * 0.3665).epsilon(1e-3));

    // Stationary levels ignore the covariate reference.
    const GevParams st{5.0, 0.0, 1.0, 0.1};
    CHECK(return_level(st, 50.0, ModelStructure::stationary, -3.0) ==
          return_level(st, 50.0, ModelStructure::stationary, 9.0));

    CHECK_THROWS_AS(return_level(gumbel, 1.0, ModelStructure::stationary, 0.0),
                    std::domain_error);
    CHECK_THROWS_AS(return_level(gumbel, 0.5, ModelStructure::stationary, 0.0),
                    std::domain_error);
}

TEST_CASE("return level is strictly increasing in the period") {
    Rng rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        const GevParams p{rng.normal(5.0, 1.0), 0.0, 0.3 + rng.uniform01(),
                          rng.normal(0.0, 0.2)};
        double prev = -1e30;
        for (double t : {1.5, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0, 500.0}) {
            const double level = return_level(p, t, ModelStructure::stationary, 0.0);
            CHECK(level > prev);
            prev = level;
        }
    }
}

TEST_CASE("covariate reference resolution") {
    const auto station = fixtures::make_trending_station();
    const auto& data = station.dataset;

    CHECK(CovariateRef{}.resolve(data) == data.covariate.values.back());
    CHECK(CovariateRef::parse("last-year").resolve(data) == data.covariate.values.back());
    CHECK(CovariateRef::parse("mean").resolve(data) ==
          doctest::Approx(static_cast<double>(independent_mean(data.covariate.values)))
              .epsilon(1e-14));
    CHECK(CovariateRef::parse("fixed:0.75").resolve(data) == doctest::Approx(0.75));
    CHECK(CovariateRef::parse("fixed:0.75").to_string() == "fixed:0.75");
    CHECK_THROWS_AS(CovariateRef::parse("nonsense"), ValidationError);
}

TEST_CASE("degenerate one-sample ensemble collapses every summary") {
    const GevParams p{6.0, 0.0, 0.5, 0.1};
    const auto e = degenerate_ensemble(p, ModelStructure::stationary);
    const auto data = fixtures::zero_covariate_dataset(
        1970, fixtures::white_noise(1, 12, 5.0, 0.3));
    const auto dist = return_level_ensemble(e, 100.0, CovariateRef{}, data);
    const double level = return_level(p, 100.0, ModelStructure::stationary, 0.0);
    CHECK(dist.expected == doctest::Approx(level).epsilon(1e-14));
    CHECK(dist.median == dist.expected);
    CHECK(dist.map_level == dist.expected);
    CHECK(dist.lower == dist.upper);
    CHECK(dist.upper == doctest::Approx(level).epsilon(1e-14));
}

TEST_CASE("ensemble expectation matches an independent mean") {
    const auto e = synthetic_ensemble(21, 5000);
    const auto data = fixtures::zero_covariate_dataset(
        1970, fixtures::white_noise(2, 12, 5.0, 0.3));
    const auto dist = return_level_ensemble(e, 100.0, CovariateRef{}, data);
    CHECK(dist.levels.size() == e.size());
    CHECK(dist.expected ==
          doctest::Approx(static_cast<double>(independent_mean(dist.levels))).epsilon(1e-12));
    CHECK(dist.lower <= dist.median);
    CHECK(dist.median <= dist.upper);
}

TEST_CASE("credible interval coverage stays within 1/n of the mass") {
    for (std::size_t n : {7u, 50u, 1000u, 9001u}) {
        const auto e = synthetic_ensemble(100 + n, n);
        const auto data = fixtures::zero_covariate_dataset(
            1970, fixtures::white_noise(3, 12, 5.0, 0.3));
        for (double mass : {0.9, 0.5}) {
            const auto dist = return_level_ensemble(e, 50.0, CovariateRef{}, data, mass);
            std::size_t inside = 0;
            for (double level : dist.levels) {
                inside += (level >= dist.lower && level <= dist.upper) ? 1 : 0;
            }
            const double coverage = static_cast<double>(inside) / static_cast<double>(n);
            CHECK(std::abs(coverage - mass) <= 1.0 / static_cast<double>(n) + 1e-12);
        }
    }
}

TEST_CASE("upper-bounded samples never exceed their bound") {
    const auto e = synthetic_ensemble(33, 2000, ModelStructure::stationary, -0.2);
    const auto data = fixtures::zero_covariate_dataset(
        1970, fixtures::white_noise(4, 12, 5.0, 0.3));
    const auto dist = return_level_ensemble(e, 500.0, CovariateRef{}, data);
    for (std::size_t i = 0; i < e.size(); ++i) {
        const auto& p = e.samples[i];
        if (p.xi < 0.0) {
            CHECK(dist.levels[i] <= p.mu0 - p.sigma / p.xi + 1e-12);
        }
    }
}

TEST_CASE("return curve summaries are monotone and consistent") {
    const auto e = synthetic_ensemble(55, 3000);
    const auto data = fixtures::zero_covariate_dataset(
        1970, fixtures::white_noise(5, 12, 5.0, 0.3));
    const std::vector<double> periods{2, 5, 10, 25, 50, 100};
    const auto curve = return_curve(e, periods, CovariateRef{}, data);
    REQUIRE(curve.summaries.size() == 6);
    for (std::size_t i = 1; i < curve.summaries.size(); ++i) {
        CHECK(curve.summaries[i].expected >= curve.summaries[i - 1].expected);
    }
    // Spread grows with the horizon.
    CHECK(curve.summaries.back().upper - curve.summaries.back().lower >=
          curve.summaries.front().upper - curve.summaries.front().lower);

    const std::vector<double> one{100.0};
    const auto single = return_curve(e, one, CovariateRef{}, data);
    CHECK(single.summaries[0].expected == curve.summaries.back().expected);
    CHECK(single.summaries[0].lower == curve.summaries.back().lower);

    CHECK_THROWS_AS(return_curve(e, std::vector<double>{10.0, 5.0}, CovariateRef{}, data),
                    ValidationError);
}

TEST_CASE("equivalent return period is self-consistent") {
    const GevParams gumbel{0.0, 0.0, 1.0, 0.0};
    const auto e = degenerate_ensemble(gumbel, ModelStructure::stationary);
    const auto data = fixtures::zero_covariate_dataset(
        1970, fixtures::white_noise(6, 12, 5.0, 0.3));
    const double level100 = return_level(gumbel, 100.0, ModelStructure::stationary, 0.0);
    CHECK(equivalent_return_period(level100, e, CovariateRef{}, data) ==
          doctest::Approx(100.0).epsilon(1e-9));

    // A level above every sample's support maps to an infinite period.
    const auto bounded = degenerate_ensemble({5.0, 0.0, 1.0, -0.5}, ModelStructure::stationary);
    CHECK(equivalent_return_period(100.0, bounded, CovariateRef{}, data) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("an upward shift cuts the equivalent return period") {
    // Nonstationary ensemble whose location at the reference covariate sits
    // above the stationary fit that produced the design level.
    const auto ns = synthetic_ensemble(77, 4000, ModelStructure::nonstationary);
    auto data = fixtures::zero_covariate_dataset(1970, fixtures::white_noise(7, 12, 5.0, 0.3));
    data.covariate.values.assign(data.covariate.values.size(), 0.0);
    data.covariate.values.back() = 1.5; // last-year covariate well above the record mean

    const GevParams stationary_fit{6.0, 0.0, 0.55, 0.05};
    const double design = return_level(stationary_fit, 100.0, ModelStructure::stationary, 0.0);
    const double t_eq = equivalent_return_period(design, ns, CovariateRef{}, data);
    CHECK(t_eq < 100.0);
    CHECK(t_eq > 1.0);
}

TEST_CASE("empirical survival function") {
    const std::vector<double> levels{1.0, 2.0, 3.0};
    const auto s = survival_function(levels);
    REQUIRE(s.size() == 3);
    CHECK(s[0].first == 1.0);
    CHECK(s[0].second == doctest::Approx(2.0 / 3.0));
    CHECK(s[1].second == doctest::Approx(1.0 / 3.0));
    CHECK(s[2].second == 0.0);

    // All-equal levels step from 1 to 0 at the common value.
    const auto flat = survival_function(std::vector<double>{4.0, 4.0, 4.0});
    REQUIRE(flat.size() == 1);
    CHECK(flat[0].first == 4.0);
    CHECK(flat[0].second == 0.0);

    // Survival plus the empirical cdf is one everywhere.
    const auto e = synthetic_ensemble(91, 500);
    const auto data = fixtures::zero_covariate_dataset(
        1970, fixtures::white_noise(8, 12, 5.0, 0.3));
    const auto dist = return_level_ensemble(e, 100.0, CovariateRef{}, data);
    const auto surv = survival_function(dist.levels);
    std::vector<double> sorted = dist.levels;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [level, sv] : surv) {
        const auto le = std::upper_bound(sorted.begin(), sorted.end(), level) - sorted.begin();
        const double cdf = static_cast<double>(le) / static_cast<double>(sorted.size());
        CHECK(sv + cdf == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sv >= 0.0);
    }
    for (std::size_t i = 1; i < surv.size(); ++i) {
        CHECK(surv[i].second <= surv[i - 1].second);
    }
}

TEST_CASE("csv exports") {
    const auto e = synthetic_ensemble(101, 200);
    const auto data = fixtures::zero_covariate_dataset(
        1970, fixtures::white_noise(9, 12, 5.0, 0.3));
    const std::vector<double> periods{2, 10, 100};
    const auto curve = return_curve(e, periods, CovariateRef{}, data);

    const fs::path dir =
        fs::temp_directory_path() / ("floodbayes_hazard_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    write_return_curve_csv(curve, dir / "levels.csv");
    std::ifstream in(dir / "levels.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "period,expected,median,mode,lo,hi,map_level");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        rows += line.empty() ? 0 : 1;
    }
    CHECK(rows == 3);

    const auto surv = survival_function(curve.summaries.back().levels);
    write_survival_csv(surv, dir / "surv.csv");
    std::ifstream sin(dir / "surv.csv");
    std::getline(sin, header);
    CHECK(header == "level,survival");
    fs::remove_all(dir);
}

} // TEST_SUITE
