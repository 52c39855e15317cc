#pragma once

#include "famarec/bootstrap.hpp"
#include "famarec/regression.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace famarec {

enum class RecursionMode { forward, backward, rolling };

/// Direction the rolling window moves as k grows.
enum class RollingDirection {
    toward_earlier,  ///< [shed_max - k, N - k): starts at [shed_max, N), ends at [0, N - shed_max)
    toward_later,    ///< [k, N - shed_max + k)
};

struct RecursionSpec {
    RecursionMode mode = RecursionMode::forward;
    std::size_t shed_max = 60;
    CiMethod ci = CiMethod::analytic;
    double level = 0.90;
    SeMethod se_method = SeMethod::newey_west();
    /// Bootstrap settings when ci == bootstrap_percentile. The per-window seed is
    /// derive_seed(bootstrap.seed, {mode, k}); bootstrap.level is ignored in favour of `level`.
    BootstrapConfig bootstrap;
    std::size_t min_window = kDefaultMinWindow;
    RollingDirection rolling_direction = RollingDirection::toward_earlier;
    std::size_t threads = 1;
};

/// One step of a recursion. Either `result`/`bound` are set, or `error` holds
/// the reason the window could not be fitted (a tagged gap).
struct TraceEntry {
    std::size_t k = 0;
    SampleWindow window;
    std::optional<RegressionResult> result;
    std::optional<ConfidenceBound> bound;  ///< beta bound at spec.level
    std::string error;

    [[nodiscard]] bool ok() const noexcept { return result.has_value(); }
};

struct RecursionTrace {
    RecursionSpec spec;
    std::string series_code;
    std::vector<TraceEntry> entries;  ///< ordered by k, size shed_max + 1

    /// Lower beta bounds in k order, nullopt for gaps.
    [[nodiscard]] std::vector<std::optional<double>> lower_bounds() const;
    [[nodiscard]] std::size_t gap_count() const;
};

/// Windows for k = 0..shed_max under the given mode.
[[nodiscard]] std::vector<SampleWindow> recursion_windows(const ExcessReturnSeries& series,
                                                          const RecursionSpec& spec);

/// Fits and bounds every window. Throws InputError when N - shed_max is below
/// min_window or shed_max is 0; per-window fit failures land in the trace.
[[nodiscard]] RecursionTrace run_recursion(const ExcessReturnSeries& series,
                                           const RecursionSpec& spec);

/// Number of sign changes between consecutive bounds. A bound of exactly zero
/// takes the sign of the last nonzero bound before it (leading zeros have no
/// sign), so touching zero and returning is not a crossing. Throws InputError
/// for fewer than 2 bounds.
[[nodiscard]] std::size_t zero_crossings(std::span<const double> bounds);

struct CrossingSummary {
    std::size_t crossings = 0;
    std::size_t gaps = 0;  ///< entries skipped because their window could not be fitted

    [[nodiscard]] bool non_robust() const noexcept { return crossings >= 1; }
};

/// zero_crossings over the trace's lower bounds, skipping gaps.
[[nodiscard]] CrossingSummary zero_crossings(const RecursionTrace& trace);

enum class PuzzleClass { supporting, contradicting, inconclusive };

/// supporting when the interval lies above zero, contradicting when below, else inconclusive.
[[nodiscard]] PuzzleClass classify_puzzle(const ConfidenceBound& bound);

/// Two-way pooling used for head counts: anything not supporting counts as contradicting.
[[nodiscard]] constexpr bool pooled_supporting(PuzzleClass c) noexcept {
    return c == PuzzleClass::supporting;
}

[[nodiscard]] std::string to_string(RecursionMode mode);
[[nodiscard]] std::string to_string(PuzzleClass c);
[[nodiscard]] RecursionMode parse_recursion_mode(std::string_view text);

}  // namespace famarec
