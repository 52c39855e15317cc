#include "famarec/bootstrap.hpp"

#include "famarec/error.hpp"
#include "famarec/parallel.hpp"
#include "famarec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace famarec {
namespace {

constexpr std::size_t kChunk = 32;

/// OLS slope in the same centered form as fit_fama; nullopt for a degenerate regressor.
std::optional<double> slope(std::span<const double> y, std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double x_sum = 0.0;
    double y_sum = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        x_sum += x[t];
        y_sum += y[t];
    }
    const double x_bar = x_sum / n;
    const double y_bar = y_sum / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double dx = x[t] - x_bar;
        sxx += dx * dx;
        sxy += dx * (y[t] - y_bar);
    }
    if (!(sxx / (n - 1.0) >= kDegenerateVariance)) return std::nullopt;
    return sxy / sxx;
}

struct Workspace {
    std::vector<double> y;
    std::vector<double> x;
};

void draw_resample(const BootstrapConfig& config, std::span<const double> rho,
                   std::span<const double> spread, std::span<const double> fitted,
                   std::span<const double> resid, Rng& rng, Workspace& ws) {
    const std::size_t n = rho.size();
    switch (config.scheme) {
        case BootstrapScheme::residual_iid:
            for (std::size_t t = 0; t < n; ++t) {
                ws.x[t] = spread[t];
                ws.y[t] = fitted[t] + resid[rng.below(n)];
            }
            break;
        case BootstrapScheme::pairs:
            for (std::size_t t = 0; t < n; ++t) {
                const auto i = rng.below(n);
                ws.x[t] = spread[i];
                ws.y[t] = rho[i];
            }
            break;
        case BootstrapScheme::moving_block: {
            const std::size_t L = config.block_len;
            std::size_t t = 0;
            while (t < n) {
                const auto start = rng.below(n - L + 1);
                for (std::size_t j = 0; j < L && t < n; ++j, ++t) {
                    ws.x[t] = spread[start + j];
                    ws.y[t] = rho[start + j];
                }
            }
            break;
        }
    }
}

}  // namespace

void validate(const BootstrapConfig& config, std::size_t n) {
    if (config.replications < 100) throw InputError("bootstrap needs at least 100 replications");
    if (!(config.level > 0.0 && config.level < 1.0)) {
        throw InputError("confidence level must lie in (0,1)");
    }
    if (config.scheme == BootstrapScheme::moving_block &&
        (config.block_len < 1 || config.block_len > n / 2)) {
        throw InputError("moving-block length must be in [1, n/2]");
    }
}

double percentile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InputError("percentile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("percentile probability outside [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

BootstrapResult run_bootstrap(std::span<const double> rho, std::span<const double> spread,
                              const BootstrapConfig& config) {
    const std::size_t n = rho.size();
    validate(config, n);
    const auto fit = fit_fama(rho, spread, SeMethod::classical());

    std::vector<double> resid = residuals(fit, rho, spread);
    std::vector<double> fitted(n);
    for (std::size_t t = 0; t < n; ++t) fitted[t] = fit.zeta_hat + fit.beta_hat * spread[t];

    const std::size_t reps = config.replications;
    const auto max_degenerate =
        static_cast<std::size_t>(std::floor(kMaxDegenerateShare * static_cast<double>(reps)));
    std::vector<double> betas(reps);
    std::vector<std::size_t> redraws(reps, 0);

    const std::size_t chunks = (reps + kChunk - 1) / kChunk;
    parallel_for(chunks, config.threads, [&](std::size_t chunk) {
        Workspace ws{std::vector<double>(n), std::vector<double>(n)};
        const std::size_t end = std::min(reps, (chunk + 1) * kChunk);
        for (std::size_t r = chunk * kChunk; r < end; ++r) {
            for (std::uint64_t attempt = 0;; ++attempt) {
                Rng rng(derive_seed(config.seed, {r, attempt}));
                draw_resample(config, rho, spread, fitted, resid, rng, ws);
                if (const auto b = slope(ws.y, ws.x)) {
                    betas[r] = *b;
                    break;
                }
                redraws[r] = attempt + 1;
                if (redraws[r] > max_degenerate) break;
            }
        }
    });

    std::size_t degenerate = 0;
    for (auto d : redraws) degenerate += d;
    if (degenerate > max_degenerate) {
        throw NumericalError("bootstrap aborted: " + std::to_string(degenerate) + " of " +
                             std::to_string(reps) +
                             " resamples had a degenerate regressor (limit 1%)");
    }

    std::sort(betas.begin(), betas.end());
    BootstrapResult out;
    out.beta_hat = fit.beta_hat;
    out.degenerate_redraws = degenerate;
    out.beta = {config.level, percentile(betas, (1.0 - config.level) / 2.0),
                percentile(betas, (1.0 + config.level) / 2.0), CiTarget::beta,
                CiMethod::bootstrap_percentile};
    out.replicates = std::move(betas);
    return out;
}

ConfidenceBound bootstrap_ci(std::span<const double> rho, std::span<const double> spread,
                             const BootstrapConfig& config) {
    return run_bootstrap(rho, spread, config).beta;
}

std::vector<double> replicate_distribution(std::span<const double> rho,
                                           std::span<const double> spread,
                                           const BootstrapConfig& config) {
    return run_bootstrap(rho, spread, config).replicates;
}

std::string to_string(BootstrapScheme scheme) {
    switch (scheme) {
        case BootstrapScheme::residual_iid: return "residual_iid";
        case BootstrapScheme::pairs: return "pairs";
        case BootstrapScheme::moving_block: return "moving_block";
    }
    return "unknown";
}

BootstrapScheme parse_bootstrap_scheme(std::string_view text) {
    if (text == "residual_iid" || text == "residual") return BootstrapScheme::residual_iid;
    if (text == "pairs") return BootstrapScheme::pairs;
    if (text == "moving_block" || text == "block") return BootstrapScheme::moving_block;
    throw InputError("unknown bootstrap scheme: " + std::string(text));
}

}  // namespace famarec
