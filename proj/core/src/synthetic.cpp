#include "famarec/synthetic.hpp"

#include "famarec/diagnostics.hpp"
#include "famarec/error.hpp"
#include "famarec/parallel.hpp"
#include "famarec/rng.hpp"

#include <cmath>

namespace famarec::synthetic {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double value, const char* what) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InputError(std::string(what) + " must be positive");
    }
}

/// Unit-variance Student-t draw for dof >= 3, Gaussian for dof == 0.
double kick_shock(Rng& rng, std::size_t dof) {
    const double z = rng.normal();
    if (dof == 0) return z;
    double chi2 = 0.0;
    for (std::size_t j = 0; j < dof; ++j) {
        const double g = rng.normal();
        chi2 += g * g;
    }
    const double nu = static_cast<double>(dof);
    return z / std::sqrt(chi2 / nu) * std::sqrt((nu - 2.0) / nu);
}

}  // namespace

void validate(const GeneratorSpec& spec) {
    if (spec.n < 24) throw InputError("generator needs n >= 24");
    if (!(std::abs(spec.spread.ar_coef) < 1.0)) throw InputError("spread AR coefficient must be in (-1,1)");
    require_positive(spec.spread.variance, "spread variance");
    std::visit(overloaded{
                   [](const UipNull& k) { require_positive(k.noise_sd, "noise_sd"); },
                   [](const KnownBeta& k) {
                       require_positive(k.noise_sd, "noise_sd");
                       if (!std::isfinite(k.zeta) || !std::isfinite(k.beta)) {
                           throw InputError("zeta and beta must be finite");
                       }
                   },
                   [](const RandomWalk& k) { require_positive(k.sd, "random walk sd"); },
                   [](const FormativeKicks& k) {
                       require_positive(k.kick_sd_min, "kick_sd_min");
                       require_positive(k.kick_sd_max, "kick_sd_max");
                       if (k.kick_sd_min > k.kick_sd_max) {
                           throw InputError("kick_sd_min exceeds kick_sd_max");
                       }
                       if (!(k.redraw_prob >= 0.0 && k.redraw_prob <= 1.0)) {
                           throw InputError("redraw_prob must be in [0,1]");
                       }
                       if (k.tail_dof == 1 || k.tail_dof == 2) {
                           throw InputError("tail_dof must be 0 (Gaussian) or at least 3");
                       }
                   },
               },
               spec.kind);
}

GroundTruth ground_truth(const GeneratorSpec& spec) {
    return std::visit(overloaded{
                          [](const UipNull&) { return GroundTruth{0.0, 0.0}; },
                          [](const KnownBeta& k) { return GroundTruth{k.zeta, k.beta}; },
                          [](const RandomWalk& k) { return GroundTruth{k.drift, 1.0}; },
                          [](const FormativeKicks&) { return GroundTruth{}; },
                      },
                      spec.kind);
}

std::string kind_name(const GeneratorKind& kind) {
    return std::visit(overloaded{
                          [](const UipNull&) { return std::string("uip_null"); },
                          [](const KnownBeta&) { return std::string("known_beta"); },
                          [](const RandomWalk&) { return std::string("random_walk"); },
                          [](const FormativeKicks&) { return std::string("formative_kicks"); },
                      },
                      kind);
}

Generated generate(const GeneratorSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    const std::size_t n = spec.n;
    const auto& sp = spec.spread;
    const double innovation_sd = std::sqrt(sp.variance * (1.0 - sp.ar_coef * sp.ar_coef));

    std::vector<double> spread(n);
    std::vector<double> rho(n);
    std::vector<YearMonth> dates(n);

    // formative-kick state
    double kick_mu = 0.0;
    double kick_sd = 0.0;
    if (const auto* fk = std::get_if<FormativeKicks>(&spec.kind)) {
        kick_sd = fk->kick_sd_min + (fk->kick_sd_max - fk->kick_sd_min) * rng.uniform();
        kick_mu = kick_sd * (rng.uniform() - 0.5);
    }

    double x = sp.mean + std::sqrt(sp.variance) * rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) x = sp.mean + sp.ar_coef * (x - sp.mean) + innovation_sd * rng.normal();
        spread[t] = x;
        dates[t] = spec.first_date.plus_months(static_cast<int>(t));
        rho[t] = std::visit(
            overloaded{
                [&](const UipNull& k) { return k.noise_sd * rng.normal(); },
                [&](const KnownBeta& k) { return k.zeta + k.beta * x + k.noise_sd * rng.normal(); },
                [&](const RandomWalk& k) { return x + k.drift + k.sd * rng.normal(); },
                [&](const FormativeKicks& k) {
                    if (rng.bernoulli(k.redraw_prob)) {
                        kick_sd = k.kick_sd_min + (k.kick_sd_max - k.kick_sd_min) * rng.uniform();
                        kick_mu = kick_sd * (rng.uniform() - 0.5);
                    }
                    return x + kick_mu + kick_sd * kick_shock(rng, k.tail_dof);
                },
            },
            spec.kind);
    }
    return {ExcessReturnSeries(spec.code, std::move(dates), std::move(rho), std::move(spread)),
            ground_truth(spec)};
}

double spread_variance_for_factor(double beta, double noise_sd, double factor) {
    require_positive(noise_sd, "noise_sd");
    if (!(factor > beta * beta)) throw InputError("variance factor must exceed beta^2");
    return noise_sd * noise_sd / (factor - beta * beta);
}

CountrySeries to_country_series(const ExcessReturnSeries& series, double home_rate,
                                const ScaleConfig& scale) {
    const std::size_t n = series.size();
    std::vector<YearMonth> dates(n + 1);
    std::vector<double> s(n + 1, 0.0);
    std::vector<double> home(n + 1, home_rate);
    std::vector<double> foreign(n + 1);
    dates[0] = series.dates()[0].plus_months(-1);
    for (std::size_t k = 0; k < n; ++k) {
        dates[k + 1] = series.dates()[k];
        foreign[k] = home_rate + series.spread()[k];
        s[k + 1] = s[k] + (series.rho()[k] - series.spread()[k]) / scale.log_change_scale;
    }
    foreign[n] = home_rate + series.spread()[n - 1];
    return {series.code(), std::move(dates), std::move(s), std::move(home), std::move(foreign)};
}

Panel make_panel(std::span<const GeneratorSpec> specs, Weights weights, double home_rate,
                 const ScaleConfig& scale) {
    std::vector<CountrySeries> series;
    series.reserve(specs.size());
    for (const auto& spec : specs) {
        series.push_back(to_country_series(generate(spec).series, home_rate, scale));
    }
    return Panel(std::move(series), std::move(weights));
}

CoverageResult coverage_experiment(const GeneratorSpec& spec, const CoverageConfig& config) {
    validate(spec);
    const auto truth = ground_truth(spec);
    if (!truth.beta) {
        throw InputError("coverage needs a generator with a true beta; " + kind_name(spec.kind) +
                         " has none");
    }
    if (config.trials == 0) throw InputError("coverage needs at least one trial");
    if (!(config.level > 0.0 && config.level < 1.0)) {
        throw InputError("confidence level must lie in (0,1)");
    }
    if (config.ci == CiMethod::bootstrap_percentile) validate(config.bootstrap, spec.n);

    std::vector<char> covered(config.trials, 0);
    parallel_for(config.trials, config.threads, [&](std::size_t t) {
        GeneratorSpec trial = spec;
        trial.seed = derive_seed(spec.seed, {t});
        const auto data = generate(trial).series;
        ConfidenceBound bound;
        if (config.ci == CiMethod::analytic) {
            bound = analytic_ci(fit_fama(data.rho(), data.spread(), config.se_method), config.level)
                        .beta;
        } else {
            BootstrapConfig boot = config.bootstrap;
            boot.level = config.level;
            boot.seed = derive_seed(config.bootstrap.seed, {t});
            boot.threads = 1;
            bound = bootstrap_ci(data.rho(), data.spread(), boot);
        }
        covered[t] = (bound.lower <= *truth.beta && *truth.beta <= bound.upper) ? 1 : 0;
    });

    CoverageResult out;
    out.trials = config.trials;
    out.true_beta = *truth.beta;
    for (char c : covered) out.covered += static_cast<std::size_t>(c);
    return out;
}

double variance_ratio_statistic(std::span<const double> x) {
    if (x.size() < 4) throw InputError("variance ratio needs at least 4 observations");
    const std::size_t half = x.size() / 2;
    const double first = sample_variance(x.subspan(0, half));
    const double second = sample_variance(x.subspan(half));
    if (!(first > 0.0) || !(second > 0.0)) throw NumericalError("variance ratio of constant half");
    return std::abs(std::log(first / second));
}

}  // namespace famarec::synthetic
