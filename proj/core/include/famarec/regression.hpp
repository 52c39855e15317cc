#pragma once

#include "famarec/data_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace famarec {

/// Standard-error estimator for the two OLS coefficients.
///
/// classical:  homoskedastic, residual variance with n-2 degrees of freedom.
/// white:      heteroskedasticity-robust sandwich (HC0, no small-sample factor).
/// newey_west: Bartlett-kernel HAC sandwich; without explicit lags the lag is
///             floor(4 (n/100)^(2/9)). With 0 lags it equals `white`.
struct SeMethod {
    enum class Kind { classical, white, newey_west };

    Kind kind = Kind::newey_west;
    std::optional<std::size_t> lags;

    [[nodiscard]] static SeMethod classical() { return {Kind::classical, std::nullopt}; }
    [[nodiscard]] static SeMethod white() { return {Kind::white, std::nullopt}; }
    [[nodiscard]] static SeMethod newey_west(std::optional<std::size_t> lags = std::nullopt) {
        return {Kind::newey_west, lags};
    }

    /// Lag actually used for a sample of n observations (0 unless newey_west).
    [[nodiscard]] std::size_t lags_for(std::size_t n) const;
    /// "classical", "white" or "hac(L)" for the resolved lag L; "hac(auto)" when n is unknown.
    [[nodiscard]] std::string label(std::optional<std::size_t> n = std::nullopt) const;
    /// Inverse of label() for "classical", "white", "hac", "hac(L)".
    [[nodiscard]] static SeMethod parse(std::string_view text);

    friend bool operator==(const SeMethod&, const SeMethod&) = default;
};

[[nodiscard]] std::size_t newey_west_default_lags(std::size_t n);

struct RegressionResult {
    double zeta_hat = 0.0;  ///< intercept, percent per month
    double beta_hat = 0.0;  ///< slope on the interest differential
    double se_zeta = 0.0;
    double se_beta = 0.0;
    std::size_t n = 0;
    SampleWindow window;
    SeMethod se_method;
    std::size_t se_lags = 0;         ///< resolved HAC lag (0 otherwise)
    double residual_variance = 0.0;  ///< sum of squared residuals / (n - 2)
};

enum class CiTarget { zeta, beta };
enum class CiMethod { analytic, bootstrap_percentile };

struct ConfidenceBound {
    double level = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    CiTarget target = CiTarget::beta;
    CiMethod method = CiMethod::analytic;
};

struct AnalyticCi {
    ConfidenceBound beta;
    ConfidenceBound zeta;
};

/// Variance of the regressor below this is treated as a degenerate regressor.
inline constexpr double kDegenerateVariance = 1e-14;

/// OLS fit of rho = zeta + beta * spread + u in centered form. Throws
/// NumericalError("degenerate regressor") for a (near) constant spread and
/// InputError on length mismatch or fewer than 3 observations.
[[nodiscard]] RegressionResult fit_fama(std::span<const double> rho, std::span<const double> spread,
                                        const SeMethod& se_method = {});

/// Fits a whole series (or a window of it) and records the window.
[[nodiscard]] RegressionResult fit_fama(const ExcessReturnSeries& series,
                                        const SeMethod& se_method = {});
[[nodiscard]] RegressionResult fit_fama(const ExcessReturnSeries& series,
                                        const SampleWindow& window, const SeMethod& se_method,
                                        std::size_t min_size = kDefaultMinWindow);

/// u[k] = rho[k] - zeta_hat - beta_hat * spread[k].
[[nodiscard]] std::vector<double> residuals(const RegressionResult& result,
                                            std::span<const double> rho,
                                            std::span<const double> spread);

/// estimate -/+ t_{n-2,(1+level)/2} * se for both coefficients.
[[nodiscard]] AnalyticCi analytic_ci(const RegressionResult& result, double level);

/// Two-sided Student-t quantile; exposed for reporting and tests.
[[nodiscard]] double student_t_quantile(double probability, double degrees_of_freedom);

[[nodiscard]] std::string to_string(CiMethod method);
[[nodiscard]] std::string to_string(CiTarget target);

}  // namespace famarec
