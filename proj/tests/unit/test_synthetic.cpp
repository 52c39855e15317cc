#include "famarec/diagnostics.hpp"
#include "famarec/error.hpp"
#include "famarec/regression.hpp"
#include "famarec/rng.hpp"
#include "famarec/synthetic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace famarec;
using namespace famarec::synthetic;

TEST(Generate, TinyNoiseNullRecovery) {
    GeneratorSpec spec;
    spec.kind = KnownBeta{0.0, 0.0, 1e-9};
    const auto g = generate(spec);
    const auto r = fit_fama(g.series.rho(), g.series.spread(), SeMethod::classical());
    EXPECT_LT(std::abs(r.beta_hat), 1e-6);
    EXPECT_EQ(g.series.size(), 364U);
    EXPECT_EQ(*g.truth.beta, 0.0);
}

TEST(Generate, LargeSampleRecoversKnownBeta) {
    GeneratorSpec spec;
    spec.kind = KnownBeta{2.0, 3.0, 1.0};
    spec.n = 10000;
    spec.seed = 2718;
    const auto g = generate(spec);
    const auto r = fit_fama(g.series.rho(), g.series.spread(), SeMethod::classical());
    EXPECT_LT(std::abs(r.beta_hat - 3.0), 3.0 * r.se_beta);
    EXPECT_LT(std::abs(r.zeta_hat - 2.0), 3.0 * r.se_zeta);
}

TEST(Generate, DeterministicGivenSeed) {
    GeneratorSpec spec;
    spec.kind = FormativeKicks{};
    spec.seed = 5;
    const auto a = generate(spec).series;
    const auto b = generate(spec).series;
    EXPECT_TRUE(std::equal(a.rho().begin(), a.rho().end(), b.rho().begin()));
    spec.seed = 6;
    const auto c = generate(spec).series;
    EXPECT_FALSE(std::equal(a.rho().begin(), a.rho().end(), c.rho().begin()));
}

TEST(Generate, SpreadFollowsConfiguredAr1) {
    GeneratorSpec spec;
    spec.kind = UipNull{};
    spec.n = 50000;
    spec.spread = {0.97, 0.05, 0.2};
    const auto g = generate(spec);
    const auto x = g.series.spread();
    EXPECT_NEAR(sample_variance(x), 0.05, 0.01);
    // lag-1 regression slope estimates the AR coefficient
    const auto ar = fit_fama(x.subspan(1), x.subspan(0, x.size() - 1), SeMethod::classical());
    EXPECT_NEAR(ar.beta_hat, 0.97, 0.01);
}

TEST(Generate, SpreadVarianceTargetsTheVarianceFactor) {
    const double target = 229.0;
    GeneratorSpec spec;
    spec.kind = KnownBeta{0.0, 1.0, 1.9};
    spec.n = 100000;
    spec.spread.variance = spread_variance_for_factor(1.0, 1.9, target);
    const auto row = variance_row(generate(spec).series);
    EXPECT_NEAR(static_cast<double>(row.factor), target, 0.1 * target);
    EXPECT_THROW((void)spread_variance_for_factor(20.0, 1.0, 100.0), InputError);
}

TEST(Generate, UipNullBetaAveragesToZero) {
    GeneratorSpec spec;
    spec.kind = UipNull{3.0};
    constexpr int kSeeds = 400;
    std::vector<double> betas;
    for (int s = 0; s < kSeeds; ++s) {
        spec.seed = derive_seed(77, {static_cast<std::uint64_t>(s)});
        const auto g = generate(spec);
        betas.push_back(fit_fama(g.series.rho(), g.series.spread()).beta_hat);
    }
    double mean = 0.0;
    for (double b : betas) mean += b;
    mean /= kSeeds;
    double var = 0.0;
    for (double b : betas) var += (b - mean) * (b - mean);
    const double se = std::sqrt(var / (kSeeds - 1) / kSeeds);
    EXPECT_LT(std::abs(mean), 4.0 * se);
}

TEST(Generate, FormativeKicksAreNonStationary) {
    // Calibrate the 95% quantile of the half-sample variance statistic under a
    // stationary Gaussian null, then check how often formative kicks exceed it.
    constexpr int kNull = 2000;
    constexpr int kKicks = 200;
    GeneratorSpec null_spec;
    null_spec.kind = UipNull{3.0};
    std::vector<double> null_stats;
    for (int s = 0; s < kNull; ++s) {
        null_spec.seed = derive_seed(1, {static_cast<std::uint64_t>(s)});
        null_stats.push_back(variance_ratio_statistic(generate(null_spec).series.rho()));
    }
    std::sort(null_stats.begin(), null_stats.end());
    const double q95 = null_stats[static_cast<std::size_t>(0.95 * kNull)];

    GeneratorSpec kicks;
    kicks.kind = FormativeKicks{0.5, 6.0, 0.02, 0};
    int exceed = 0;
    for (int s = 0; s < kKicks; ++s) {
        kicks.seed = derive_seed(2, {static_cast<std::uint64_t>(s)});
        exceed += variance_ratio_statistic(generate(kicks).series.rho()) > q95 ? 1 : 0;
    }
    // a stationary process would exceed in about 5% of seeds
    EXPECT_GT(exceed, kKicks / 2) << "q95 = " << q95;
}

TEST(Generate, HeavyTailedKicks) {
    GeneratorSpec spec;
    spec.kind = FormativeKicks{1.0, 1.0, 0.0, 4};
    spec.n = 40000;
    const auto generated = generate(spec);
    const auto rho = generated.series.rho();
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : rho) {
        m2 += v * v;
        m4 += v * v * v * v;
    }
    m2 /= static_cast<double>(rho.size());
    m4 /= static_cast<double>(rho.size());
    EXPECT_GT(m4 / (m2 * m2), 4.0);  // Gaussian kurtosis is 3
}

TEST(Generate, SpecValidation) {
    GeneratorSpec spec;
    spec.n = 23;
    EXPECT_THROW(validate(spec), InputError);
    spec.n = 100;
    spec.kind = KnownBeta{0, 1, 0.0};
    EXPECT_THROW(validate(spec), InputError);
    spec.kind = FormativeKicks{1.0, 2.0, 1.5, 0};
    EXPECT_THROW(validate(spec), InputError);
    spec.kind = FormativeKicks{1.0, 2.0, 0.5, 2};
    EXPECT_THROW(validate(spec), InputError);
    spec.kind = RandomWalk{0.0, -1.0};
    EXPECT_THROW(validate(spec), InputError);
    spec.kind = UipNull{};
    spec.spread.ar_coef = 1.0;
    EXPECT_THROW(validate(spec), InputError);
}

TEST(CountrySeriesReconstruction, RoundTripsThroughExcessReturns) {
    GeneratorSpec spec;
    spec.kind = RandomWalk{0.1, 3.0};
    const auto g = generate(spec).series;
    const auto country = to_country_series(g, 0.5);
    EXPECT_EQ(country.size(), g.size() + 1);
    EXPECT_EQ(country.dates()[0], (YearMonth{1979, 6}));
    const auto back = excess_returns(country);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(back.rho()[k], g.rho()[k], 1e-9);
        EXPECT_NEAR(back.spread()[k], g.spread()[k], 1e-12);
    }
}

TEST(Coverage, SingleTrialAndMissingTruth) {
    GeneratorSpec spec;
    spec.kind = KnownBeta{0.0, 1.0, 1.0};
    CoverageConfig cfg;
    cfg.trials = 1;
    const double rate = coverage_experiment(spec, cfg).rate();
    EXPECT_TRUE(rate == 0.0 || rate == 1.0);

    spec.kind = FormativeKicks{};
    EXPECT_THROW((void)coverage_experiment(spec, cfg), InputError);
}

TEST(Coverage, DeterministicAndThreadIndependent) {
    GeneratorSpec spec;
    spec.kind = KnownBeta{0.0, 1.0, 1.0};
    spec.n = 100;
    CoverageConfig cfg;
    cfg.trials = 300;
    const auto a = coverage_experiment(spec, cfg);
    cfg.threads = 4;
    const auto b = coverage_experiment(spec, cfg);
    EXPECT_EQ(a.covered, b.covered);
    EXPECT_EQ(a.trials, 300U);
}

TEST(Coverage, RandomWalkHasUnitSlope) {
    GeneratorSpec spec;
    spec.kind = RandomWalk{0.0, 3.0};
    spec.n = 300;
    CoverageConfig cfg;
    cfg.trials = 400;
    const auto res = coverage_experiment(spec, cfg);
    EXPECT_EQ(res.true_beta, 1.0);
    EXPECT_GT(res.rate(), 0.85);
    EXPECT_LT(res.rate(), 0.95);
}
