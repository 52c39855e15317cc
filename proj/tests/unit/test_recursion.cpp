#include "famarec/error.hpp"
#include "famarec/recursion.hpp"
#include "famarec/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace famarec;

namespace {

ExcessReturnSeries random_series(std::size_t n, std::uint64_t seed, YearMonth first = {1979, 7}) {
    Rng rng(seed);
    std::vector<YearMonth> dates;
    std::vector<double> rho;
    std::vector<double> spread;
    double x = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        dates.push_back(first.plus_months(static_cast<int>(t)));
        x = 0.95 * x + 0.05 * rng.normal();
        spread.push_back(x);
        rho.push_back(0.5 * x + 3.0 * rng.normal());
    }
    return {"TST", dates, rho, spread};
}

ExcessReturnSeries reversed(const ExcessReturnSeries& s) {
    std::vector<double> rho(s.rho().rbegin(), s.rho().rend());
    std::vector<double> spread(s.spread().rbegin(), s.spread().rend());
    std::vector<YearMonth> dates(s.dates().begin(), s.dates().end());
    return {s.code(), dates, rho, spread};
}

/// Independent statement of the tie rule: zeros carry no information, so drop
/// them and count sign changes among what is left.
std::size_t crossings_oracle(const std::vector<double>& bounds) {
    std::vector<double> nonzero;
    std::copy_if(bounds.begin(), bounds.end(), std::back_inserter(nonzero),
                 [](double b) { return b != 0.0; });
    std::size_t count = 0;
    for (std::size_t k = 1; k < nonzero.size(); ++k) {
        if ((nonzero[k] > 0) != (nonzero[k - 1] > 0)) ++count;
    }
    return count;
}

}  // namespace

TEST(RecursionWindows, ForwardSizesAndCount) {
    const auto s = random_series(364, 1);
    RecursionSpec spec;
    spec.mode = RecursionMode::forward;
    const auto w = recursion_windows(s, spec);
    ASSERT_EQ(w.size(), 61U);
    EXPECT_EQ(w.front().size(), 364U);
    EXPECT_EQ(w.back().size(), 304U);
    for (std::size_t k = 0; k < w.size(); ++k) {
        EXPECT_EQ(w[k].start, 0U);
        EXPECT_EQ(w[k].end, 364U - k);
    }
    EXPECT_EQ(w.back().label, "1979:6–2004:10");
}

TEST(RecursionWindows, BackwardAndRollingContracts) {
    const auto s = random_series(364, 1);
    RecursionSpec spec;
    spec.mode = RecursionMode::backward;
    const auto back = recursion_windows(s, spec);
    spec.mode = RecursionMode::forward;
    const auto fwd = recursion_windows(s, spec);
    spec.mode = RecursionMode::rolling;
    const auto roll = recursion_windows(s, spec);
    ASSERT_EQ(back.size(), 61U);
    ASSERT_EQ(roll.size(), 61U);
    EXPECT_EQ(back.back().label, "1984:6–2009:10");
    for (const auto& w : roll) EXPECT_EQ(w.size(), 304U);
    EXPECT_EQ(roll.front(), back.back());   // [60, N)
    EXPECT_EQ(roll.back(), fwd.back());     // [0, N - 60)
    EXPECT_EQ(roll.front().start, 60U);

    spec.rolling_direction = RollingDirection::toward_later;
    const auto later = recursion_windows(s, spec);
    EXPECT_EQ(later.front(), fwd.back());
    EXPECT_EQ(later.back(), back.back());
}

TEST(RecursionWindows, InsufficientData) {
    const auto s = random_series(80, 2);
    RecursionSpec spec;
    EXPECT_THROW((void)recursion_windows(s, spec), InputError);  // 80 - 60 < 24
    spec.shed_max = 56;
    EXPECT_NO_THROW((void)recursion_windows(s, spec));
    spec.shed_max = 0;
    EXPECT_THROW((void)recursion_windows(s, spec), InputError);
}

TEST(RunRecursion, FirstStepsMatchFullSampleBitForBit) {
    const auto s = random_series(364, 3);
    RecursionSpec spec;
    spec.mode = RecursionMode::forward;
    const auto fwd = run_recursion(s, spec);
    spec.mode = RecursionMode::backward;
    const auto back = run_recursion(s, spec);
    const auto full = fit_fama(s, spec.se_method);
    for (const auto* t : {&fwd, &back}) {
        ASSERT_TRUE(t->entries[0].ok());
        EXPECT_EQ(t->entries[0].result->beta_hat, full.beta_hat);
        EXPECT_EQ(t->entries[0].result->zeta_hat, full.zeta_hat);
        EXPECT_EQ(t->entries[0].result->se_beta, full.se_beta);
    }
    EXPECT_EQ(fwd.entries.size(), 61U);
    EXPECT_EQ(fwd.lower_bounds().size(), 61U);
    EXPECT_EQ(fwd.gap_count(), 0U);
}

TEST(RunRecursion, ReversedForwardEqualsBackward) {
    const auto s = random_series(200, 4);
    const auto r = reversed(s);
    RecursionSpec spec;
    spec.shed_max = 40;
    spec.se_method = SeMethod::classical();  // HAC depends on time order
    spec.mode = RecursionMode::forward;
    const auto fwd_rev = run_recursion(r, spec);
    spec.mode = RecursionMode::backward;
    const auto back = run_recursion(s, spec);
    for (std::size_t k = 0; k <= 40; ++k) {
        const auto& a = fwd_rev.entries[k];
        const auto& b = back.entries[k];
        // forward window [0, N-k) on the reversed data holds original observations [k, N)
        EXPECT_EQ(200 - a.window.end, b.window.start);
        EXPECT_EQ(200 - a.window.start, b.window.end);
        EXPECT_NEAR(a.result->beta_hat, b.result->beta_hat, 1e-10);
        EXPECT_NEAR(a.bound->lower, b.bound->lower, 1e-10);
    }
}

TEST(RunRecursion, FailedWindowsBecomeTaggedGaps) {
    // Spread moves only in the first 10 months; backward windows that start later are degenerate.
    auto base = random_series(100, 5);
    std::vector<double> spread(base.spread().begin(), base.spread().end());
    for (std::size_t t = 10; t < spread.size(); ++t) spread[t] = 0.1;
    const ExcessReturnSeries s("GAP", {base.dates().begin(), base.dates().end()},
                               {base.rho().begin(), base.rho().end()}, spread);
    RecursionSpec spec;
    spec.mode = RecursionMode::backward;
    spec.shed_max = 60;
    const auto trace = run_recursion(s, spec);
    EXPECT_EQ(trace.entries.size(), 61U);
    EXPECT_EQ(trace.gap_count(), 51U);
    EXPECT_FALSE(trace.entries[12].ok());
    EXPECT_NE(trace.entries[12].error.find("degenerate regressor"), std::string::npos);
    const auto summary = zero_crossings(trace);
    EXPECT_EQ(summary.gaps, 51U);
}

TEST(RunRecursion, BootstrapTraceIsThreadIndependent) {
    const auto s = random_series(150, 6);
    RecursionSpec spec;
    spec.mode = RecursionMode::rolling;
    spec.shed_max = 12;
    spec.ci = CiMethod::bootstrap_percentile;
    spec.bootstrap.replications = 199;
    spec.bootstrap.seed = 11;
    const auto serial = run_recursion(s, spec);
    spec.threads = 4;
    const auto parallel = run_recursion(s, spec);
    spec.threads = 1;
    spec.bootstrap.threads = 3;
    const auto inner = run_recursion(s, spec);
    for (std::size_t k = 0; k <= 12; ++k) {
        EXPECT_EQ(serial.entries[k].bound->lower, parallel.entries[k].bound->lower);
        EXPECT_EQ(serial.entries[k].bound->upper, inner.entries[k].bound->upper);
        EXPECT_EQ(serial.entries[k].bound->method, CiMethod::bootstrap_percentile);
    }
}

TEST(ZeroCrossings, Examples) {
    EXPECT_EQ(zero_crossings(std::vector<double>{1, 2, 3}), 0U);
    EXPECT_EQ(zero_crossings(std::vector<double>{1, -1, 1, -1}), 3U);
    EXPECT_EQ(zero_crossings(std::vector<double>{2, 0, -2}), 1U);
    EXPECT_EQ(zero_crossings(std::vector<double>{2, 0, 2}), 0U);
    EXPECT_EQ(zero_crossings(std::vector<double>{0, 0, -2}), 0U);
    EXPECT_THROW((void)zero_crossings(std::vector<double>{1}), InputError);
}

TEST(ZeroCrossings, ExhaustiveSignPatterns) {
    for (std::size_t len = 2; len <= 4; ++len) {
        std::size_t patterns = 1;
        for (std::size_t i = 0; i < len; ++i) patterns *= 3;
        for (std::size_t code = 0; code < patterns; ++code) {
            std::vector<double> b(len);
            std::size_t c = code;
            for (auto& v : b) {
                v = static_cast<double>(c % 3) - 1.0;
                c /= 3;
            }
            EXPECT_EQ(zero_crossings(b), crossings_oracle(b));
        }
    }
}

TEST(ZeroCrossings, InvariantUnderScalingAndNegation) {
    Rng rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(60);
        std::vector<double> b(n);
        for (auto& v : b) v = rng.bernoulli(0.1) ? 0.0 : rng.normal();
        const auto base = zero_crossings(b);
        const double c = 1e-3 + 100.0 * rng.uniform();
        auto scaled = b;
        auto negated = b;
        for (auto& v : scaled) v *= c;
        for (auto& v : negated) v = -v;
        EXPECT_EQ(zero_crossings(scaled), base);
        EXPECT_EQ(zero_crossings(negated), base);
    }
}

TEST(ClassifyPuzzle, Examples) {
    EXPECT_EQ(classify_puzzle({0.9, 1.929, 3.0, CiTarget::beta, CiMethod::analytic}),
              PuzzleClass::supporting);
    const auto fra = classify_puzzle({0.9, -0.056, 0.4, CiTarget::beta, CiMethod::analytic});
    EXPECT_EQ(fra, PuzzleClass::inconclusive);
    EXPECT_FALSE(pooled_supporting(fra));
    EXPECT_EQ(classify_puzzle({0.9, 0.0, 0.0, CiTarget::beta, CiMethod::analytic}),
              PuzzleClass::inconclusive);
    EXPECT_EQ(classify_puzzle({0.9, -2.0, -0.1, CiTarget::beta, CiMethod::analytic}),
              PuzzleClass::contradicting);
}
