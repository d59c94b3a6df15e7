#ifndef FLOODBAYES_GEV_HPP
#define FLOODBAYES_GEV_HPP

#include <string>

#include "floodbayes/types.hpp"

namespace floodbayes {

enum class ModelStructure { stationary, nonstationary };

const char* to_string(ModelStructure s);
ModelStructure structure_from_string(const std::string& s);

/// GEV parameter vector with a covariate-linear location:
///
///   mu(phi) = mu0 + mu1 * phi,   scale sigma > 0,   shape xi.
///
/// mu1 is exactly zero under the stationary structure; sigma and xi never
/// depend on the covariate.
struct GevParams {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double sigma = 1.0;
    double xi = 0.0;

    void validate(ModelStructure structure) const;
};

/// Shapes below this magnitude are evaluated on the Gumbel branch to avoid
/// cancellation in (1 + xi*s)^(-1/xi).
inline constexpr double gev_xi_tol = 1e-8;

inline double location_at(const GevParams& p, double covariate_value) {
    return p.mu0 + p.mu1 * covariate_value;
}

/// Log density. Outside the support returns -infinity. The three shape
/// regimes: xi = 0 unbounded (Gumbel), xi > 0 lower-bounded at mu - sigma/xi
/// (Frechet), xi < 0 upper-bounded at mu - sigma/xi (Weibull).
double gev_logpdf(double x, double mu, double sigma, double xi);

/// Distribution function; clamps to 0 below a bounded-left support and to 1
/// above a bounded-right support.
double gev_cdf(double x, double mu, double sigma, double xi);

/// Inverse distribution function for p in (0, 1).
double gev_quantile(double p, double mu, double sigma, double xi);

bool gev_in_support(double x, double mu, double sigma, double xi);

/// Sum of log densities of the aligned observations, with the location taken
/// at each year's covariate (nonstationary) or fixed at mu0 (stationary).
/// Returns -infinity when any observation falls outside the support.
double log_likelihood(const AlignedDataset& data, ModelStructure structure,
                      const GevParams& p);

} // namespace floodbayes

#endif
