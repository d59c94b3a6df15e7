#include "floodbayes/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "floodbayes/errors.hpp"
#include "floodbayes/rng.hpp"
#include "json.hpp"

namespace floodbayes {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double euler_gamma = 0.57721566490153286;
constexpr double pi = 3.14159265358979323846;

double normal_logpdf(double x, double mean, double variance) {
    const double d = x - mean;
    return -0.5 * std::log(2.0 * pi * variance) - d * d / (2.0 * variance);
}

double uniform_logpdf(double x, double lower, double upper) {
    if (x < lower || x > upper) {
        return neg_inf;
    }
    return -std::log(upper - lower);
}

// Active-parameter views: index order mu0, (mu1), sigma, xi.
std::vector<double*> active_fields(GevParams& p, ModelStructure structure) {
    if (structure == ModelStructure::nonstationary) {
        return {&p.mu0, &p.mu1, &p.sigma, &p.xi};
    }
    return {&p.mu0, &p.sigma, &p.xi};
}

std::vector<const ParamPrior*> active_priors(const PriorSpec& spec, ModelStructure structure) {
    if (structure == ModelStructure::nonstationary) {
        return {&spec.mu0, &spec.mu1, &spec.sigma, &spec.xi};
    }
    return {&spec.mu0, &spec.sigma, &spec.xi};
}

double sample_sd(const std::vector<double>& x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return x.size() > 1 ? std::sqrt(ss / (x.size() - 1)) : 0.0;
}

// Proposal scales shaped like the asymptotic posterior spreads; a global
// factor is adapted on top of these during burn-in.
std::vector<double> default_steps(const AlignedDataset& data, ModelStructure structure) {
    const double n = static_cast<double>(data.series.values.size());
    double scale_hat = sample_sd(data.series.values) * std::sqrt(6.0) / pi;
    if (!(scale_hat > 0.0)) {
        scale_hat = 1e-3;
    }
    double phi_sd = sample_sd(data.covariate.values);
    if (!(phi_sd > 0.0)) {
        phi_sd = 1.0;
    }
    const double root_n = std::sqrt(n);
    std::vector<double> steps(4);
    steps[0] = scale_hat / root_n;
    steps[1] = structure == ModelStructure::nonstationary ? scale_hat / (root_n * phi_sd)
                                                          : scale_hat / root_n;
    steps[2] = 0.7 * scale_hat / root_n;
    steps[3] = 1.0 / root_n;
    return steps;
}

} // namespace

const char* to_string(PriorFamily f) {
    return f == PriorFamily::uniform ? "uniform" : "gaussian";
}

PriorSpec PriorSpec::gaussian(double variance, std::string label) {
    PriorSpec spec;
    spec.family = PriorFamily::gaussian;
    spec.mu0 = spec.mu1 = spec.sigma = spec.xi = ParamPrior{0.0, variance};
    spec.label = label.empty() ? "gauss:" + std::to_string(variance) : std::move(label);
    spec.validate();
    return spec;
}

PriorSpec PriorSpec::uniform_box(std::string label) {
    PriorSpec spec;
    spec.family = PriorFamily::uniform;
    spec.mu0 = ParamPrior{-100.0, 100.0};
    spec.mu1 = ParamPrior{-100.0, 100.0};
    spec.sigma = ParamPrior{0.0, 100.0}; // sigma <= 0 is excluded separately
    spec.xi = ParamPrior{-5.0, 5.0};
    spec.label = label.empty() ? "uniform" : std::move(label);
    spec.validate();
    return spec;
}

PriorSpec PriorSpec::from_name(const std::string& name) {
    if (name == "uniform") {
        return uniform_box("uniform");
    }
    if (name == "gauss-wide") {
        return gaussian(100.0, "gauss-wide");
    }
    if (name == "gauss-narrow") {
        return gaussian(1.0, "gauss-narrow");
    }
    if (name.rfind("gauss:", 0) == 0) {
        const double variance = std::stod(name.substr(6));
        return gaussian(variance, name);
    }
    throw ValidationError("unknown prior '" + name +
                          "' (expected uniform, gauss-wide, gauss-narrow, or gauss:<variance>)");
}

void PriorSpec::validate() const {
    for (const ParamPrior* p : {&mu0, &mu1, &sigma, &xi}) {
        if (family == PriorFamily::gaussian) {
            if (!(p->b > 0.0) || !std::isfinite(p->b) || !std::isfinite(p->a)) {
                throw ValidationError("gaussian prior requires finite mean and variance > 0");
            }
        } else {
            if (!(p->a < p->b) || !std::isfinite(p->a) || !std::isfinite(p->b)) {
                throw ValidationError("uniform prior requires finite lower < upper");
            }
        }
    }
}

void ChainConfig::validate() const {
    if (iterations <= 0) {
        throw ValidationError("chain iterations must be positive");
    }
    if (burn_in < 0 || burn_in >= iterations) {
        throw ValidationError("burn_in must satisfy 0 <= burn_in < iterations");
    }
    if (!initial_step_sizes.empty()) {
        if (initial_step_sizes.size() != 4) {
            throw ValidationError("initial_step_sizes needs 4 entries (mu0, mu1, sigma, xi)");
        }
        for (double s : initial_step_sizes) {
            if (!(s > 0.0) || !std::isfinite(s)) {
                throw ValidationError("initial_step_sizes entries must be positive");
            }
        }
    }
}

void ParameterEnsemble::validate() const {
    if (samples.size() != log_posteriors.size()) {
        throw ValidationError("ensemble: samples/log_posteriors length mismatch");
    }
    if (samples.empty()) {
        throw ValidationError("ensemble is empty");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i].validate(structure);
        if (!std::isfinite(log_posteriors[i])) {
            throw ValidationError("ensemble: nonfinite log posterior at sample " +
                                  std::to_string(i));
        }
    }
    if (!(acceptance_rate >= 0.0 && acceptance_rate <= 1.0)) {
        throw ValidationError("ensemble: acceptance rate out of [0, 1]");
    }
}

double log_prior(const GevParams& p, const PriorSpec& spec, ModelStructure structure) {
    spec.validate();
    if (!(p.sigma > 0.0)) {
        return neg_inf;
    }
    GevParams copy = p;
    const auto fields = active_fields(copy, structure);
    const auto priors = active_priors(spec, structure);
    double sum = 0.0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const double v = *fields[i];
        const ParamPrior& pr = *priors[i];
        const double term = spec.family == PriorFamily::gaussian
                                ? normal_logpdf(v, pr.a, pr.b)
                                : uniform_logpdf(v, pr.a, pr.b);
        if (term == neg_inf) {
            return neg_inf;
        }
        sum += term;
    }
    return sum;
}

double log_posterior(const AlignedDataset& data, ModelStructure structure, const GevParams& p,
                     const PriorSpec& spec) {
    if (!std::isfinite(p.mu0) || !std::isfinite(p.mu1) || !std::isfinite(p.sigma) ||
        !std::isfinite(p.xi) || !(p.sigma > 0.0)) {
        return neg_inf;
    }
    const double prior = log_prior(p, spec, structure);
    if (prior == neg_inf) {
        return neg_inf;
    }
    const double like = log_likelihood(data, structure, p);
    if (!std::isfinite(like)) {
        return neg_inf;
    }
    return prior + like;
}

GevParams moment_start(const AlignedDataset& data, ModelStructure structure) {
    (void)structure;
    const auto& x = data.series.values;
    if (x.empty()) {
        throw ValidationError("moment_start: empty dataset");
    }
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double scale_hat = sample_sd(x) * std::sqrt(6.0) / pi;
    if (!(scale_hat > 0.0)) {
        scale_hat = std::max(1e-6, 1e-3 * std::abs(mean));
    }
    GevParams p;
    p.mu0 = mean - euler_gamma * scale_hat;
    p.mu1 = 0.0;
    p.sigma = scale_hat;
    p.xi = 0.0;
    return p;
}

ParameterEnsemble mh_sample(const AlignedDataset& data, ModelStructure structure,
                            const PriorSpec& spec, const ChainConfig& config) {
    data.validate();
    spec.validate();
    config.validate();

    GevParams current = moment_start(data, structure);
    std::vector<double> steps =
        config.initial_step_sizes.empty() ? default_steps(data, structure)
                                          : config.initial_step_sizes;

    Rng rng(config.seed);

    double lp = log_posterior(data, structure, current, spec);
    for (int attempt = 0; attempt < 100 && !std::isfinite(lp); ++attempt) {
        GevParams jittered = current;
        jittered.mu0 += steps[0] * 10.0 * rng.normal();
        jittered.sigma = current.sigma * std::exp(0.3 * rng.normal());
        jittered.xi = 0.1 * rng.normal();
        if (structure == ModelStructure::nonstationary) {
            jittered.mu1 = steps[1] * 10.0 * rng.normal();
        }
        const double candidate = log_posterior(data, structure, jittered, spec);
        if (std::isfinite(candidate)) {
            current = jittered;
            lp = candidate;
        }
    }
    if (!std::isfinite(lp)) {
        throw NumericError("mh_sample: no finite-posterior starting point found");
    }

    const auto fields = active_fields(current, structure);
    const std::size_t dim = fields.size();
    const std::size_t step_index[4] = {0, structure == ModelStructure::nonstationary ? 1u : 2u,
                                       structure == ModelStructure::nonstationary ? 2u : 3u, 3};

    ParameterEnsemble out;
    out.structure = structure;
    out.prior = spec;
    out.config = config;
    const std::size_t retained = static_cast<std::size_t>(config.iterations - config.burn_in);
    out.samples.reserve(retained);
    out.log_posteriors.reserve(retained);

    double log_scale = 0.0;
    std::int64_t accepted_post = 0;

    for (std::int64_t t = 1; t <= config.iterations; ++t) {
        GevParams proposal = current;
        const auto proposal_fields = active_fields(proposal, structure);
        const double scale = std::exp(log_scale);
        for (std::size_t i = 0; i < dim; ++i) {
            *proposal_fields[i] += scale * steps[step_index[i]] * rng.normal();
        }

        double lp_prop = log_posterior(data, structure, proposal, spec);
        if (std::isnan(lp_prop)) {
            lp_prop = neg_inf;
        }
        const double delta = lp_prop - lp;
        const double accept_prob = delta >= 0.0 ? 1.0 : std::exp(delta);
        const bool accept = rng.uniform01() < accept_prob;
        if (accept) {
            current = proposal;
            lp = lp_prop;
        }

        if (config.adapt_during_burnin && t <= config.burn_in) {
            // Robbins-Monro on the global proposal scale toward 30% acceptance.
            const double gain = 1.0 / std::pow(static_cast<double>(t), 0.6);
            log_scale += gain * (accept_prob - 0.30);
            log_scale = std::clamp(log_scale, -12.0, 12.0);
        }

        if (t > config.burn_in) {
            out.samples.push_back(current);
            out.log_posteriors.push_back(lp);
            accepted_post += accept ? 1 : 0;
        }
    }

    out.acceptance_rate = static_cast<double>(accepted_post) / static_cast<double>(retained);
    if (out.acceptance_rate < 0.05 || out.acceptance_rate > 0.8) {
        std::ostringstream msg;
        msg << "acceptance rate " << out.acceptance_rate << " outside [0.05, 0.8]";
        out.warnings.push_back(msg.str());
    }
    out.validate();
    return out;
}

std::size_t map_index(const ParameterEnsemble& ensemble) {
    if (ensemble.samples.empty()) {
        throw ValidationError("map_index: empty ensemble");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < ensemble.log_posteriors.size(); ++i) {
        if (ensemble.log_posteriors[i] > ensemble.log_posteriors[best]) {
            best = i;
        }
    }
    return best;
}

GevParams map_estimate(const ParameterEnsemble& ensemble) {
    return ensemble.samples[map_index(ensemble)];
}

namespace {

// Minimal Nelder-Mead minimizer. Points outside the likelihood support score
// +infinity and are contracted away; the best vertex never regresses.
struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const std::vector<double>& spread,
                          int max_evals) {
    const std::size_t dim = x0.size();
    std::vector<std::vector<double>> xs(dim + 1, x0);
    std::vector<double> fs(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) {
        xs[i + 1][i] += spread[i];
    }
    int evals = 0;
    for (std::size_t i = 0; i <= dim; ++i) {
        fs[i] = f(xs[i]);
        ++evals;
    }

    const auto order = [&] {
        std::vector<std::size_t> idx(dim + 1);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> nxs(dim + 1);
        std::vector<double> nfs(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) {
            nxs[i] = xs[idx[i]];
            nfs[i] = fs[idx[i]];
        }
        xs = std::move(nxs);
        fs = std::move(nfs);
    };

    while (evals < max_evals) {
        order();
        if (std::isfinite(fs[dim]) && fs[dim] - fs[0] < 1e-10 * (1.0 + std::abs(fs[0]))) {
            return {xs[0], fs[0], true};
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                centroid[j] += xs[i][j] / dim;
            }
        }
        const auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t j = 0; j < dim; ++j) {
                x[j] = centroid[j] + coef * (xs[dim][j] - centroid[j]);
            }
            return x;
        };

        const auto reflected = blend(-1.0);
        const double fr = f(reflected);
        ++evals;
        if (fr < fs[0]) {
            const auto expanded = blend(-2.0);
            const double fe = f(expanded);
            ++evals;
            if (fe < fr) {
                xs[dim] = expanded;
                fs[dim] = fe;
            } else {
                xs[dim] = reflected;
                fs[dim] = fr;
            }
        } else if (fr < fs[dim - 1]) {
            xs[dim] = reflected;
            fs[dim] = fr;
        } else {
            const auto contracted = blend(fr < fs[dim] ? -0.5 : 0.5);
            const double fc = f(contracted);
            ++evals;
            if (fc < std::min(fr, fs[dim])) {
                xs[dim] = contracted;
                fs[dim] = fc;
            } else {
                for (std::size_t i = 1; i <= dim; ++i) {
                    for (std::size_t j = 0; j < dim; ++j) {
                        xs[i][j] = xs[0][j] + 0.5 * (xs[i][j] - xs[0][j]);
                    }
                    fs[i] = f(xs[i]);
                    ++evals;
                }
            }
        }
    }
    order();
    return {xs[0], fs[0], false};
}

} // namespace

GevParams mle_fit(const AlignedDataset& data, ModelStructure structure) {
    data.validate();
    const GevParams start = moment_start(data, structure);
    const std::size_t dim = structure == ModelStructure::nonstationary ? 4 : 3;

    const auto unpack = [&](const std::vector<double>& x) {
        GevParams p;
        p.mu0 = x[0];
        if (structure == ModelStructure::nonstationary) {
            p.mu1 = x[1];
            p.sigma = x[2];
            p.xi = x[3];
        } else {
            p.mu1 = 0.0;
            p.sigma = x[1];
            p.xi = x[2];
        }
        return p;
    };
    const auto objective = [&](const std::vector<double>& x) {
        const GevParams p = unpack(x);
        if (!(p.sigma > 0.0)) {
            return std::numeric_limits<double>::infinity();
        }
        const double ll = log_likelihood(data, structure, p);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    std::vector<double> x0;
    std::vector<double> spread;
    const auto steps = default_steps(data, structure);
    if (structure == ModelStructure::nonstationary) {
        x0 = {start.mu0, 0.0, start.sigma, start.xi};
        spread = {10.0 * steps[0], 10.0 * steps[1], 5.0 * steps[2], 5.0 * steps[3]};
    } else {
        x0 = {start.mu0, start.sigma, start.xi};
        spread = {10.0 * steps[0], 5.0 * steps[2], 5.0 * steps[3]};
    }

    const auto result = nelder_mead(objective, x0, spread, 500 * static_cast<int>(dim));
    const GevParams fitted = unpack(result.x);
    if (!result.converged) {
        std::ostringstream msg;
        msg << "mle_fit did not converge; best point mu0=" << fitted.mu0 << " mu1=" << fitted.mu1
            << " sigma=" << fitted.sigma << " xi=" << fitted.xi
            << " log_likelihood=" << -result.f;
        throw NumericError(msg.str());
    }
    fitted.validate(structure);
    return fitted;
}

namespace {

nlohmann::json prior_to_json(const PriorSpec& spec) {
    const auto pp = [](const ParamPrior& p) { return nlohmann::json{p.a, p.b}; };
    return {
        {"family", to_string(spec.family)}, {"label", spec.label}, {"mu0", pp(spec.mu0)},
        {"mu1", pp(spec.mu1)},              {"sigma", pp(spec.sigma)}, {"xi", pp(spec.xi)},
    };
}

PriorSpec prior_from_json(const nlohmann::json& j) {
    PriorSpec spec;
    const std::string family = j.at("family").get<std::string>();
    spec.family = family == "uniform" ? PriorFamily::uniform : PriorFamily::gaussian;
    spec.label = j.at("label").get<std::string>();
    const auto pp = [&](const char* key) {
        const auto& v = j.at(key);
        return ParamPrior{v.at(0).get<double>(), v.at(1).get<double>()};
    };
    spec.mu0 = pp("mu0");
    spec.mu1 = pp("mu1");
    spec.sigma = pp("sigma");
    spec.xi = pp("xi");
    spec.validate();
    return spec;
}

} // namespace

std::string ensemble_to_json(const ParameterEnsemble& ensemble, std::size_t thin_stride) {
    ensemble.validate();
    if (thin_stride == 0) {
        throw ValidationError("thin stride must be positive");
    }
    nlohmann::json j;
    j["structure"] = to_string(ensemble.structure);
    j["prior"] = prior_to_json(ensemble.prior);
    j["acceptance_rate"] = ensemble.acceptance_rate;
    j["warnings"] = ensemble.warnings;
    j["config"] = {
        {"iterations", ensemble.config.iterations},
        {"burn_in", ensemble.config.burn_in},
        {"seed", ensemble.config.seed},
        {"initial_step_sizes", ensemble.config.initial_step_sizes},
        {"adapt_during_burnin", ensemble.config.adapt_during_burnin},
    };
    j["thin_stride"] = thin_stride;

    std::vector<double> mu0, mu1, sigma, xi, lp;
    for (std::size_t i = 0; i < ensemble.samples.size(); i += thin_stride) {
        mu0.push_back(ensemble.samples[i].mu0);
        mu1.push_back(ensemble.samples[i].mu1);
        sigma.push_back(ensemble.samples[i].sigma);
        xi.push_back(ensemble.samples[i].xi);
        lp.push_back(ensemble.log_posteriors[i]);
    }
    j["samples"] = {
        {"mu0", mu0}, {"mu1", mu1}, {"sigma", sigma}, {"xi", xi}, {"log_posterior", lp},
    };
    return j.dump();
}

ParameterEnsemble ensemble_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid ensemble JSON: " + std::string(e.what()));
    }
    ParameterEnsemble ensemble;
    try {
        ensemble.structure = structure_from_string(j.at("structure").get<std::string>());
        ensemble.prior = prior_from_json(j.at("prior"));
        ensemble.acceptance_rate = j.at("acceptance_rate").get<double>();
        ensemble.warnings = j.at("warnings").get<std::vector<std::string>>();
        const auto& c = j.at("config");
        ensemble.config.iterations = c.at("iterations").get<std::int64_t>();
        ensemble.config.burn_in = c.at("burn_in").get<std::int64_t>();
        ensemble.config.seed = c.at("seed").get<std::uint64_t>();
        ensemble.config.initial_step_sizes = c.at("initial_step_sizes").get<std::vector<double>>();
        ensemble.config.adapt_during_burnin = c.at("adapt_during_burnin").get<bool>();

        const auto& s = j.at("samples");
        const auto mu0 = s.at("mu0").get<std::vector<double>>();
        const auto mu1 = s.at("mu1").get<std::vector<double>>();
        const auto sigma = s.at("sigma").get<std::vector<double>>();
        const auto xi = s.at("xi").get<std::vector<double>>();
        const auto lp = s.at("log_posterior").get<std::vector<double>>();
        if (mu0.size() != mu1.size() || mu0.size() != sigma.size() || mu0.size() != xi.size() ||
            mu0.size() != lp.size()) {
            throw ValidationError("ensemble JSON: ragged sample columns");
        }
        for (std::size_t i = 0; i < mu0.size(); ++i) {
            ensemble.samples.push_back(GevParams{mu0[i], mu1[i], sigma[i], xi[i]});
        }
        ensemble.log_posteriors = lp;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("ensemble JSON: " + std::string(e.what()));
    }
    ensemble.validate();
    return ensemble;
}

void save_ensemble(const ParameterEnsemble& ensemble, const std::filesystem::path& path,
                   std::size_t thin_stride) {
    const std::string text = ensemble_to_json(ensemble, thin_stride);
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << text << '\n';
}

ParameterEnsemble load_ensemble(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return ensemble_from_json(buffer.str());
}

} // namespace floodbayes
