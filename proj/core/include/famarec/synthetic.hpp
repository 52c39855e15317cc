#pragma once

#include "famarec/bootstrap.hpp"
#include "famarec/data_model.hpp"
#include "famarec/regression.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace famarec::synthetic {

/// UIP holds: rho is pure noise, independent of the spread (zeta = beta = 0).
struct UipNull {
    double noise_sd = 3.0;
};

/// rho = zeta + beta * spread + N(0, noise_sd^2).
struct KnownBeta {
    double zeta = 0.0;
    double beta = 0.0;
    double noise_sd = 1.0;
};

/// Log spot is a random walk with drift, so rho = spread + drift + N(0, sd^2):
/// slope 1 and intercept `drift`.
struct RandomWalk {
    double drift = 0.0;
    double sd = 3.0;
};

/// Stylized non-stationary process: each month the currency move is a "kick"
/// drawn from a law whose parameters are themselves redrawn with probability
/// redraw_prob. On a redraw the scale is uniform on [kick_sd_min, kick_sd_max]
/// and the location uniform on [-scale/2, scale/2]. Kicks are Gaussian, or
/// unit-variance Student-t when tail_dof >= 3. An illustration only; there is
/// no fixed data-generating law and therefore no true beta.
struct FormativeKicks {
    double kick_sd_min = 0.5;
    double kick_sd_max = 6.0;
    double redraw_prob = 0.02;
    std::size_t tail_dof = 0;
};

using GeneratorKind = std::variant<UipNull, KnownBeta, RandomWalk, FormativeKicks>;

/// Interest differential: stationary AR(1) around `mean` with coefficient
/// ar_coef and unconditional variance `variance`, i.e. innovation sd
/// sqrt(variance * (1 - ar_coef^2)). The first value is drawn from the
/// stationary distribution.
struct SpreadProcess {
    double ar_coef = 0.97;
    double variance = 0.05;
    double mean = 0.0;
};

struct GeneratorSpec {
    GeneratorKind kind = KnownBeta{};
    std::size_t n = 364;
    std::uint64_t seed = 42;
    SpreadProcess spread;
    YearMonth first_date{1979, 7};  ///< date of the first excess-return observation
    std::string code = "SYN";
};

/// Throws InputError on n < 24, non-positive dispersions, redraw_prob outside
/// [0,1], |ar_coef| >= 1 or tail_dof in {1, 2}.
void validate(const GeneratorSpec& spec);

struct GroundTruth {
    std::optional<double> zeta;
    std::optional<double> beta;
};

struct Generated {
    ExcessReturnSeries series;
    GroundTruth truth;
};

/// Deterministic given spec (one stream seeded from spec.seed; per month the
/// spread innovation is drawn before the rho shock).
[[nodiscard]] Generated generate(const GeneratorSpec& spec);

[[nodiscard]] GroundTruth ground_truth(const GeneratorSpec& spec);
[[nodiscard]] std::string kind_name(const GeneratorKind& kind);

/// Spread variance that makes Var(rho)/Var(spread) equal `factor` under a
/// known_beta model: Var(spread) = noise_sd^2 / (factor - beta^2).
[[nodiscard]] double spread_variance_for_factor(double beta, double noise_sd, double factor);

/// Rebuilds spot and rate levels consistent with an excess-return series:
/// i_home is constant at home_rate (percent per month), i_foreign = i_home + spread,
/// and log spot accumulates (rho - spread) / scale from zero. The result has
/// one more month than `series` and excess_returns() maps it back to `series`
/// up to rounding.
[[nodiscard]] CountrySeries to_country_series(const ExcessReturnSeries& series,
                                              double home_rate = 0.5,
                                              const ScaleConfig& scale = {});

/// One generated country per spec, combined with `weights`.
[[nodiscard]] Panel make_panel(std::span<const GeneratorSpec> specs, Weights weights,
                               double home_rate = 0.5, const ScaleConfig& scale = {});

struct CoverageConfig {
    std::size_t trials = 2000;
    double level = 0.90;
    CiMethod ci = CiMethod::analytic;
    SeMethod se_method = SeMethod::classical();
    /// Used when ci is bootstrap_percentile; trial t uses seed derive_seed(bootstrap.seed, {t}).
    BootstrapConfig bootstrap;
    std::size_t threads = 1;
};

struct CoverageResult {
    std::size_t trials = 0;
    std::size_t covered = 0;
    double true_beta = 0.0;

    [[nodiscard]] double rate() const noexcept {
        return trials == 0 ? 0.0 : static_cast<double>(covered) / static_cast<double>(trials);
    }
};

/// Share of trials whose beta interval contains the true beta. Trial t
/// regenerates the data with seed derive_seed(spec.seed, {t}). Throws
/// InputError for kinds without a true beta.
[[nodiscard]] CoverageResult coverage_experiment(const GeneratorSpec& spec,
                                                 const CoverageConfig& config);

/// |log(Var(first half) / Var(second half))| of a series; 0 under perfect stationarity.
[[nodiscard]] double variance_ratio_statistic(std::span<const double> x);

}  // namespace famarec::synthetic
