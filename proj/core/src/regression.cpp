#include "famarec/regression.hpp"

#include "famarec/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>

namespace famarec {
namespace {

double mean(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

void check_inputs(std::span<const double> rho, std::span<const double> spread) {
    if (rho.size() != spread.size()) {
        throw InputError("length mismatch: rho has " + std::to_string(rho.size()) +
                         " observations, spread has " + std::to_string(spread.size()));
    }
    if (rho.size() < 3) throw InputError("regression needs at least 3 observations");
}

}  // namespace

std::size_t newey_west_default_lags(std::size_t n) {
    return static_cast<std::size_t>(
        std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

std::size_t SeMethod::lags_for(std::size_t n) const {
    if (kind != Kind::newey_west) return 0;
    const std::size_t L = lags.value_or(newey_west_default_lags(n));
    return n == 0 ? 0 : std::min(L, n - 1);
}

std::string SeMethod::label(std::optional<std::size_t> n) const {
    switch (kind) {
        case Kind::classical: return "classical";
        case Kind::white: return "white";
        case Kind::newey_west:
            if (!lags && !n) return "hac(auto)";
            return "hac(" + std::to_string(n ? lags_for(*n) : *lags) + ")";
    }
    return "unknown";
}

SeMethod SeMethod::parse(std::string_view text) {
    if (text == "classical") return classical();
    if (text == "white" || text == "hc0") return white();
    if (text == "hac" || text == "hac(auto)" || text == "newey-west") return newey_west();
    if (text.starts_with("hac(") && text.ends_with(")")) {
        const auto inner = text.substr(4, text.size() - 5);
        std::size_t lags = 0;
        const auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), lags);
        if (ec == std::errc{} && ptr == inner.data() + inner.size()) return newey_west(lags);
    }
    throw InputError("unknown standard-error method: " + std::string(text));
}

RegressionResult fit_fama(std::span<const double> rho, std::span<const double> spread,
                          const SeMethod& se_method) {
    check_inputs(rho, spread);
    const std::size_t n = rho.size();
    const double nd = static_cast<double>(n);
    const double x_bar = mean(spread);
    const double y_bar = mean(rho);

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double dx = spread[t] - x_bar;
        sxx += dx * dx;
        sxy += dx * (rho[t] - y_bar);
    }
    if (!(sxx / (nd - 1.0) >= kDegenerateVariance)) {
        throw NumericalError("degenerate regressor: spread variance below 1e-14");
    }

    RegressionResult r;
    r.n = n;
    r.se_method = se_method;
    r.beta_hat = sxy / sxx;
    r.zeta_hat = y_bar - r.beta_hat * x_bar;

    // Centered residuals feed the meat of the sandwich; same values as rho - zeta - beta*x
    // up to rounding.
    std::vector<double> u(n);
    std::vector<double> ux(n);
    double ssr = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double dx = spread[t] - x_bar;
        u[t] = (rho[t] - y_bar) - r.beta_hat * dx;
        ux[t] = u[t] * dx;
        ssr += u[t] * u[t];
    }
    r.residual_variance = ssr / (nd - 2.0);

    double var_beta = 0.0;
    double var_zeta = 0.0;
    if (se_method.kind == SeMethod::Kind::classical) {
        var_beta = r.residual_variance / sxx;
        var_zeta = r.residual_variance * (1.0 / nd + x_bar * x_bar / sxx);
    } else {
        // Parameterization (a, beta) with a the intercept on the centered regressor:
        // bread is diag(1/n, 1/sxx); zeta = a - beta * x_bar.
        const std::size_t L = se_method.lags_for(n);
        r.se_lags = L;
        double s00 = 0.0;
        double s01 = 0.0;
        double s11 = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            s00 += u[t] * u[t];
            s01 += u[t] * ux[t];
            s11 += ux[t] * ux[t];
        }
        for (std::size_t l = 1; l <= L; ++l) {
            const double w = 1.0 - static_cast<double>(l) / static_cast<double>(L + 1);
            double g00 = 0.0;
            double g01 = 0.0;  // sum g0[t] g1[t-l] + g1[t] g0[t-l]
            double g11 = 0.0;
            for (std::size_t t = l; t < n; ++t) {
                g00 += u[t] * u[t - l];
                g01 += u[t] * ux[t - l] + ux[t] * u[t - l];
                g11 += ux[t] * ux[t - l];
            }
            s00 += 2.0 * w * g00;
            s01 += w * g01;
            s11 += 2.0 * w * g11;
        }
        const double var_a = s00 / (nd * nd);
        const double cov_ab = s01 / (nd * sxx);
        var_beta = s11 / (sxx * sxx);
        var_zeta = var_a + x_bar * x_bar * var_beta - 2.0 * x_bar * cov_ab;
    }
    r.se_beta = std::sqrt(std::max(var_beta, 0.0));
    r.se_zeta = std::sqrt(std::max(var_zeta, 0.0));
    return r;
}

RegressionResult fit_fama(const ExcessReturnSeries& series, const SeMethod& se_method) {
    auto r = fit_fama(series.rho(), series.spread(), se_method);
    r.window = full_window(series);
    return r;
}

RegressionResult fit_fama(const ExcessReturnSeries& series, const SampleWindow& window,
                          const SeMethod& se_method, std::size_t min_size) {
    if (window.start >= window.end || window.end > series.size()) {
        throw InputError("window out of range");
    }
    if (window.size() < min_size) throw InputError("window below minimum size");
    const auto count = window.size();
    auto r = fit_fama(series.rho().subspan(window.start, count),
                      series.spread().subspan(window.start, count), se_method);
    r.window = window;
    return r;
}

std::vector<double> residuals(const RegressionResult& result, std::span<const double> rho,
                              std::span<const double> spread) {
    if (rho.size() != spread.size() || rho.size() != result.n) {
        throw InputError("residuals: length mismatch with fitted window");
    }
    std::vector<double> u(rho.size());
    for (std::size_t k = 0; k < rho.size(); ++k) {
        u[k] = rho[k] - result.zeta_hat - result.beta_hat * spread[k];
    }
    return u;
}

double student_t_quantile(double probability, double degrees_of_freedom) {
    boost::math::students_t_distribution<double> dist(degrees_of_freedom);
    return boost::math::quantile(dist, probability);
}

AnalyticCi analytic_ci(const RegressionResult& result, double level) {
    if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0,1)");
    if (result.n < 3) throw InputError("analytic_ci: result needs n >= 3");
    const double t = student_t_quantile((1.0 + level) / 2.0, static_cast<double>(result.n - 2));
    AnalyticCi ci;
    ci.beta = {level, result.beta_hat - t * result.se_beta, result.beta_hat + t * result.se_beta,
               CiTarget::beta, CiMethod::analytic};
    ci.zeta = {level, result.zeta_hat - t * result.se_zeta, result.zeta_hat + t * result.se_zeta,
               CiTarget::zeta, CiMethod::analytic};
    return ci;
}

std::string to_string(CiMethod method) {
    return method == CiMethod::analytic ? "analytic" : "bootstrap_percentile";
}

std::string to_string(CiTarget target) { return target == CiTarget::beta ? "beta" : "zeta"; }

}  // namespace famarec
