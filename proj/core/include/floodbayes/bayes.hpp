#ifndef FLOODBAYES_BAYES_HPP
#define FLOODBAYES_BAYES_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "floodbayes/gev.hpp"
#include "floodbayes/types.hpp"

namespace floodbayes {

enum class PriorFamily { uniform, gaussian };

const char* to_string(PriorFamily f);

/// Hyperparameters for one scalar parameter: (mean, variance) under the
/// gaussian family, (lower, upper) under the uniform family.
struct ParamPrior {
    double a = 0.0;
    double b = 1.0;
};

/// Independent per-parameter priors on the natural parameters
/// (mu0, mu1, sigma, xi). sigma <= 0 always carries zero prior mass.
struct PriorSpec {
    PriorFamily family = PriorFamily::gaussian;
    ParamPrior mu0;
    ParamPrior mu1;
    ParamPrior sigma;
    ParamPrior xi;
    std::string label;

    /// Zero-mean gaussian with the given variance on every parameter.
    static PriorSpec gaussian(double variance, std::string label = {});

    /// Bounded noninformative box: mu0, mu1 in [-100, 100], sigma in
    /// (0, 100], xi in [-5, 5]. Bounds keep the posterior proper.
    static PriorSpec uniform_box(std::string label = {});

    /// Parse a named preset: "uniform", "gauss-wide" (variance 100),
    /// "gauss-narrow" (variance 1), or "gauss:<variance>".
    static PriorSpec from_name(const std::string& name);

    void validate() const;
};

struct ChainConfig {
    std::int64_t iterations = 100000;
    std::int64_t burn_in = 10000;
    std::uint64_t seed = 0;
    /// Proposal scales for (mu0, mu1, sigma, xi); empty derives them from
    /// the data. All entries must be positive when given.
    std::vector<double> initial_step_sizes;
    bool adapt_during_burnin = true;

    void validate() const;
};

/// Post-burn-in random-walk Metropolis samples with matched log-posterior
/// values. Immutable after construction; safe to share across threads.
struct ParameterEnsemble {
    std::vector<GevParams> samples;
    std::vector<double> log_posteriors;
    ModelStructure structure = ModelStructure::stationary;
    PriorSpec prior;
    double acceptance_rate = 0.0;
    ChainConfig config;
    std::vector<std::string> warnings;

    std::size_t size() const { return samples.size(); }
    void validate() const;
};

/// Sum of independent per-parameter log prior densities over the active
/// parameters (mu0, mu1 when nonstationary, sigma, xi). -infinity when
/// sigma <= 0 or a parameter leaves a uniform box.
double log_prior(const GevParams& p, const PriorSpec& spec, ModelStructure structure);

/// Unnormalized log posterior: log_likelihood + log_prior.
double log_posterior(const AlignedDataset& data, ModelStructure structure,
                     const GevParams& p, const PriorSpec& spec);

/// Gumbel moment estimates (xi = 0, mu1 = 0); the chain and simplex starts.
GevParams moment_start(const AlignedDataset& data, ModelStructure structure);

/// Random-walk Metropolis: one joint Gaussian proposal over the active
/// parameters per iteration, accepted with probability min(1, exp(delta)).
/// The first burn_in iterations are discarded; proposal scales adapt only
/// during burn-in (Robbins-Monro toward 30% acceptance) and are frozen
/// afterwards so retained samples target the exact posterior. Fully
/// deterministic given config.seed.
ParameterEnsemble mh_sample(const AlignedDataset& data, ModelStructure structure,
                            const PriorSpec& spec, const ChainConfig& config);

/// Retained sample with the highest log posterior; earliest index on ties.
std::size_t map_index(const ParameterEnsemble& ensemble);
GevParams map_estimate(const ParameterEnsemble& ensemble);

/// Frequentist comparison fit: Nelder-Mead ascent on the log-likelihood from
/// the moment start. The result never scores below the start point.
GevParams mle_fit(const AlignedDataset& data, ModelStructure structure);

/// Column-wise JSON (mu0, mu1, sigma, xi, log_posterior) with config echo.
/// thin_stride > 1 exports every stride-th retained sample.
std::string ensemble_to_json(const ParameterEnsemble& ensemble, std::size_t thin_stride = 1);
ParameterEnsemble ensemble_from_json(const std::string& text);

void save_ensemble(const ParameterEnsemble& ensemble, const std::filesystem::path& path,
                   std::size_t thin_stride = 1);
ParameterEnsemble load_ensemble(const std::filesystem::path& path);

} // namespace floodbayes

#endif
