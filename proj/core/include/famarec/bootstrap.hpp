#pragma once

#include "famarec/regression.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace famarec {

enum class BootstrapScheme {
    residual_iid,  ///< resample fitted residuals, rebuild rho on the fitted line
    pairs,         ///< resample (rho, spread) observation pairs
    moving_block,  ///< resample overlapping blocks of consecutive pairs
};

struct BootstrapConfig {
    std::size_t replications = 1999;
    BootstrapScheme scheme = BootstrapScheme::residual_iid;
    std::size_t block_len = 12;  ///< used by moving_block only
    std::uint64_t seed = 42;
    double level = 0.90;
    /// Execution only; results are identical for every thread count.
    std::size_t threads = 1;
};

/// Throws InputError unless replications >= 100, level in (0,1) and, for
/// moving_block, 1 <= block_len <= n/2.
void validate(const BootstrapConfig& config, std::size_t n);

struct BootstrapResult {
    ConfidenceBound beta;
    double beta_hat = 0.0;             ///< full-sample estimate
    std::vector<double> replicates;    ///< sorted ascending, size = replications
    std::size_t degenerate_redraws = 0;
};

/// At most this share of resamples may have a degenerate regressor before the
/// bootstrap gives up with NumericalError.
inline constexpr double kMaxDegenerateShare = 0.01;

/// Empirical quantile with linear interpolation between order statistics:
/// h = (m - 1) p, q = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// `sorted` must be ascending and non-empty.
[[nodiscard]] double percentile(std::span<const double> sorted, double p);

/// Full bootstrap run. Replicate r draws from the stream derive_seed(seed, {r, attempt}),
/// so the output depends only on (data, config minus threads).
[[nodiscard]] BootstrapResult run_bootstrap(std::span<const double> rho,
                                            std::span<const double> spread,
                                            const BootstrapConfig& config);

/// Percentile interval [(1-level)/2, (1+level)/2] for beta.
[[nodiscard]] ConfidenceBound bootstrap_ci(std::span<const double> rho,
                                           std::span<const double> spread,
                                           const BootstrapConfig& config);

/// Sorted beta replicates.
[[nodiscard]] std::vector<double> replicate_distribution(std::span<const double> rho,
                                                         std::span<const double> spread,
                                                         const BootstrapConfig& config);

[[nodiscard]] std::string to_string(BootstrapScheme scheme);
[[nodiscard]] BootstrapScheme parse_bootstrap_scheme(std::string_view text);

}  // namespace famarec
