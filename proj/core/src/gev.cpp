#include "floodbayes/gev.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "floodbayes/errors.hpp"

namespace floodbayes {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();

void require_scale(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw ValidationError("gev: scale must be positive and finite");
    }
}
} // namespace

const char* to_string(ModelStructure s) {
    return s == ModelStructure::stationary ? "stationary" : "nonstationary";
}

ModelStructure structure_from_string(const std::string& s) {
    if (s == "stationary") return ModelStructure::stationary;
    if (s == "nonstationary") return ModelStructure::nonstationary;
    throw ValidationError("unknown model structure '" + s + "'");
}

void GevParams::validate(ModelStructure structure) const {
    if (!std::isfinite(mu0) || !std::isfinite(mu1) || !std::isfinite(sigma) ||
        !std::isfinite(xi)) {
        throw ValidationError("gev parameters must be finite");
    }
    require_scale(sigma);
    if (structure == ModelStructure::stationary && mu1 != 0.0) {
        throw ValidationError("stationary structure requires mu1 == 0");
    }
}

double gev_logpdf(double x, double mu, double sigma, double xi) {
    require_scale(sigma);
    const double s = (x - mu) / sigma;
    if (std::abs(xi) < gev_xi_tol) {
        return -std::log(sigma) - s - std::exp(-s);
    }
    const double t = 1.0 + xi * s;
    if (t <= 0.0) {
        return neg_inf;
    }
    // t^(-1/xi) through exp/log keeps precision for small |xi|.
    const double inv = std::exp(-std::log(t) / xi);
    return -std::log(sigma) - (1.0 + 1.0 / xi) * std::log(t) - inv;
}

double gev_cdf(double x, double mu, double sigma, double xi) {
    require_scale(sigma);
    const double s = (x - mu) / sigma;
    if (std::abs(xi) < gev_xi_tol) {
        return std::exp(-std::exp(-s));
    }
    const double t = 1.0 + xi * s;
    if (t <= 0.0) {
        return xi > 0.0 ? 0.0 : 1.0;
    }
    return std::exp(-std::exp(-std::log(t) / xi));
}

double gev_quantile(double p, double mu, double sigma, double xi) {
    require_scale(sigma);
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("gev_quantile: p must lie in (0, 1)");
    }
    const double g = -std::log(p); // in (0, inf)
    if (std::abs(xi) < gev_xi_tol) {
        return mu - sigma * std::log(g);
    }
    return mu + sigma / xi * (std::pow(g, -xi) - 1.0);
}

bool gev_in_support(double x, double mu, double sigma, double xi) {
    require_scale(sigma);
    if (std::abs(xi) < gev_xi_tol) {
        return std::isfinite(x);
    }
    return 1.0 + xi * (x - mu) / sigma > 0.0;
}

double log_likelihood(const AlignedDataset& data, ModelStructure structure,
                      const GevParams& p) {
    p.validate(structure);
    const auto& obs = data.series.values;
    const auto& phi = data.covariate.values;
    if (structure == ModelStructure::nonstationary && phi.size() != obs.size()) {
        throw ValidationError("log_likelihood: covariate not aligned to observations");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double mu =
            structure == ModelStructure::nonstationary ? location_at(p, phi[i]) : p.mu0;
        const double term = gev_logpdf(obs[i], mu, p.sigma, p.xi);
        if (term == neg_inf) {
            return neg_inf;
        }
        sum += term;
    }
    return sum;
}

} // namespace floodbayes
