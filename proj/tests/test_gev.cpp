#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "floodbayes/errors.hpp"
#include "floodbayes/gev.hpp"
#include "floodbayes/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace floodbayes;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST_SUITE("gev") {

TEST_CASE("location is linear in the covariate") {
    CHECK(location_at({5.0, 0.0, 1.0, 0.0}, 0.7) == 5.0);
    CHECK(location_at({5.0, 2.0, 1.0, 0.0}, 0.5) == doctest::Approx(6.0));
    CHECK(location_at({5.0, 2.0, 1.0, 0.0}, 0.0) == 5.0);
}

TEST_CASE("log density closed forms and support") {
    // Gumbel at the location: s = 0, density exp(-1).
    CHECK(gev_logpdf(0.0, 0.0, 1.0, 0.0) == doctest::Approx(-1.0));
    // 1 + xi*s = -2 <= 0: outside the support.
    CHECK(gev_logpdf(-6.0, 0.0, 1.0, 0.5) == -inf);
    CHECK_THROWS_AS(gev_logpdf(0.0, 0.0, -1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(gev_logpdf(0.0, 0.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("density integrates to one over the support") {
    for (double xi : {-0.4, 0.0, 0.3}) {
        const auto pdf = [xi](double x) { return std::exp(gev_logpdf(x, 0.0, 1.0, xi)); };
        double lo;
        double hi;
        if (xi > 0.0) {
            lo = -1.0 / xi;
            hi = 2000.0; // tail mass beyond is ~(1+xi*hi)^(-1/xi) < 1e-9
        } else if (xi < 0.0) {
            lo = -30.0;
            hi = -1.0 / xi;
        } else {
            lo = -15.0;
            hi = 40.0;
        }
        const double mass = oracles::integrate(pdf, lo, hi, 1e-10);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("cdf closed forms and limits") {
    CHECK(gev_cdf(0.0, 0.0, 1.0, 0.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(gev_cdf(1e12, 0.0, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK(gev_cdf(1e12, 0.0, 1.0, 0.3) == doctest::Approx(1.0));
    // Clamps outside one-sided supports.
    CHECK(gev_cdf(-100.0, 0.0, 1.0, 0.5) == 0.0);
    CHECK(gev_cdf(100.0, 0.0, 1.0, -0.5) == 1.0);
}

TEST_CASE("cdf is nondecreasing on a dense grid") {
    Rng rng(101);
    for (int rep = 0; rep < 10; ++rep) {
        const double mu = rng.normal(0.0, 3.0);
        const double sigma = 0.1 + 2.0 * rng.uniform01();
        const double xi = -0.45 + 0.9 * rng.uniform01();
        double prev = -1.0;
        for (int i = 0; i < 1000; ++i) {
            const double x = mu - 10.0 * sigma + 20.0 * sigma * i / 999.0;
            const double c = gev_cdf(x, mu, sigma, xi);
            CHECK(c >= prev);
            CHECK(c >= 0.0);
            CHECK(c <= 1.0);
            prev = c;
        }
    }
}

TEST_CASE("quantile closed forms") {
    // p = exp(-1) maps to the location for every shape.
    for (double xi : {-0.3, 0.0, 0.2, 1.0}) {
        CHECK(gev_quantile(std::exp(-1.0), 2.5, 0.7, xi) == doctest::Approx(2.5).epsilon(1e-12));
    }
    CHECK(gev_quantile(0.99, 0.0, 1.0, 0.0) ==
          doctest::Approx(-std::log(-std::log(0.99))).epsilon(1e-12));
    CHECK(gev_quantile(0.99, 0.0, 1.0, 0.0) == doctest::Approx(4.6001).epsilon(1e-4));
    CHECK_THROWS_AS(gev_quantile(0.0, 0.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(gev_quantile(1.0, 0.0, 1.0, 0.0), std::domain_error);
}

TEST_CASE("quantile and cdf invert each other") {
    Rng rng(2024);
    for (int rep = 0; rep < 100; ++rep) {
        const double mu = rng.normal(0.0, 5.0);
        const double sigma = 0.1 + 3.0 * rng.uniform01();
        const double xi = -0.45 + 0.9 * rng.uniform01();
        const double u = 0.01 + 0.98 * rng.uniform01();
        const double x = gev_quantile(u, mu, sigma, xi);
        CHECK(gev_cdf(x, mu, sigma, xi) == doctest::Approx(u).epsilon(1e-9));
        const double p = gev_cdf(x, mu, sigma, xi);
        CHECK(gev_quantile(p, mu, sigma, xi) == doctest::Approx(x).epsilon(1e-9));
    }
}

TEST_CASE("gumbel branch is continuous at the shape tolerance") {
    for (double x = -3.0; x <= 6.0; x += 0.25) {
        const double a = gev_logpdf(x, 0.0, 1.0, 1e-8);
        const double b = gev_logpdf(x, 0.0, 1.0, 0.0);
        CHECK(std::abs(a - b) < 1e-5);
    }
}

TEST_CASE("quantile location-scale equivariance") {
    Rng rng(77);
    for (int rep = 0; rep < 50; ++rep) {
        const double mu = rng.normal(0.0, 2.0);
        const double sigma = 0.2 + rng.uniform01();
        const double xi = -0.4 + 0.8 * rng.uniform01();
        const double a = rng.normal(0.0, 3.0);
        const double c = 0.5 + 2.0 * rng.uniform01();
        const double p = 0.05 + 0.9 * rng.uniform01();
        const double lhs = gev_quantile(p, a + c * mu, c * sigma, xi);
        const double rhs = a + c * gev_quantile(p, mu, sigma, xi);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("cdf derivative matches the density") {
    Rng rng(55);
    for (int rep = 0; rep < 50; ++rep) {
        const double mu = rng.normal(0.0, 2.0);
        const double sigma = 0.3 + rng.uniform01();
        const double xi = -0.35 + 0.7 * rng.uniform01();
        const double u = 0.05 + 0.9 * rng.uniform01();
        const double x = gev_quantile(u, mu, sigma, xi);
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        const double fd = (gev_cdf(x + h, mu, sigma, xi) - gev_cdf(x - h, mu, sigma, xi)) /
                          (2.0 * h);
        CHECK(fd == doctest::Approx(std::exp(gev_logpdf(x, mu, sigma, xi))).epsilon(1e-6));
    }
}

TEST_CASE("support trichotomy") {
    // xi > 0: lower bound at mu - sigma/xi.
    CHECK(gev_in_support(-1.99, 0.0, 1.0, 0.5));
    CHECK_FALSE(gev_in_support(-2.01, 0.0, 1.0, 0.5));
    // xi < 0: upper bound at mu - sigma/xi.
    CHECK(gev_in_support(1.99, 0.0, 1.0, -0.5));
    CHECK_FALSE(gev_in_support(2.01, 0.0, 1.0, -0.5));
    // xi = 0: unbounded.
    CHECK(gev_in_support(-1e9, 0.0, 1.0, 0.0));
    CHECK(gev_in_support(1e9, 0.0, 1.0, 0.0));
}

TEST_CASE("log likelihood sums per-observation densities") {
    const auto single = fixtures::zero_covariate_dataset(2000, {4.2});
    const GevParams p{4.0, 0.0, 0.8, 0.1};
    CHECK(log_likelihood(single, ModelStructure::stationary, p) ==
          doctest::Approx(gev_logpdf(4.2, 4.0, 0.8, 0.1)));

    const auto a = fixtures::zero_covariate_dataset(2000, {4.2, 5.0, 4.7});
    const auto b = fixtures::zero_covariate_dataset(2003, {6.0, 3.9});
    auto both = fixtures::zero_covariate_dataset(2000, {4.2, 5.0, 4.7, 6.0, 3.9});
    const double sum = log_likelihood(a, ModelStructure::stationary, p) +
                       log_likelihood(b, ModelStructure::stationary, p);
    CHECK(log_likelihood(both, ModelStructure::stationary, p) == doctest::Approx(sum));

    // An observation below a xi > 0 lower bound sinks the whole likelihood.
    const auto bad = fixtures::zero_covariate_dataset(2000, {4.2, 0.5});
    CHECK(log_likelihood(bad, ModelStructure::stationary, GevParams{4.0, 0.0, 0.5, 0.5}) ==
          -inf);
}

TEST_CASE("nonstationary likelihood uses the per-year covariate") {
    AlignedDataset data = fixtures::zero_covariate_dataset(2000, {4.0, 5.0, 6.0});
    data.covariate.values = {0.0, 1.0, 2.0};
    const GevParams p{4.0, 1.0, 0.5, 0.0};
    double expected = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        expected += gev_logpdf(data.series.values[i], 4.0 + data.covariate.values[i], 0.5, 0.0);
    }
    CHECK(log_likelihood(data, ModelStructure::nonstationary, p) == doctest::Approx(expected));

    data.covariate.values.pop_back();
    CHECK_THROWS_AS(log_likelihood(data, ModelStructure::nonstationary, p), ValidationError);
}

} // TEST_SUITE
