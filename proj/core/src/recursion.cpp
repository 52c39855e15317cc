#include "famarec/recursion.hpp"

#include "famarec/error.hpp"
#include "famarec/parallel.hpp"
#include "famarec/rng.hpp"

namespace famarec {

std::vector<std::optional<double>> RecursionTrace::lower_bounds() const {
    std::vector<std::optional<double>> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        out.push_back(e.bound ? std::optional<double>(e.bound->lower) : std::nullopt);
    }
    return out;
}

std::size_t RecursionTrace::gap_count() const {
    std::size_t gaps = 0;
    for (const auto& e : entries) gaps += e.ok() ? 0 : 1;
    return gaps;
}

std::vector<SampleWindow> recursion_windows(const ExcessReturnSeries& series,
                                            const RecursionSpec& spec) {
    const std::size_t N = series.size();
    const std::size_t shed = spec.shed_max;
    if (shed < 1) throw InputError("shed_max must be at least 1");
    if (shed >= N || N - shed < spec.min_window) {
        throw InputError("insufficient data: " + std::to_string(N) + " observations cannot shed " +
                         std::to_string(shed) + " and keep " + std::to_string(spec.min_window));
    }
    std::vector<SampleWindow> windows;
    windows.reserve(shed + 1);
    for (std::size_t k = 0; k <= shed; ++k) {
        std::size_t start = 0;
        std::size_t end = N;
        switch (spec.mode) {
            case RecursionMode::forward: end = N - k; break;
            case RecursionMode::backward: start = k; break;
            case RecursionMode::rolling:
                if (spec.rolling_direction == RollingDirection::toward_earlier) {
                    start = shed - k;
                    end = N - k;
                } else {
                    start = k;
                    end = N - shed + k;
                }
                break;
        }
        windows.push_back(make_window(series, start, end, spec.min_window));
    }
    return windows;
}

RecursionTrace run_recursion(const ExcessReturnSeries& series, const RecursionSpec& spec) {
    if (!(spec.level > 0.0 && spec.level < 1.0)) {
        throw InputError("confidence level must lie in (0,1)");
    }
    auto windows = recursion_windows(series, spec);
    if (spec.ci == CiMethod::bootstrap_percentile) {
        for (const auto& w : windows) validate(spec.bootstrap, w.size());
    }

    RecursionTrace trace;
    trace.spec = spec;
    trace.series_code = series.code();
    trace.entries.resize(windows.size());

    const bool parallel_windows = resolve_threads(spec.threads) > 1;
    parallel_for(windows.size(), spec.threads, [&](std::size_t k) {
        TraceEntry& entry = trace.entries[k];
        entry.k = k;
        entry.window = windows[k];
        try {
            auto result = fit_fama(series, windows[k], spec.se_method, spec.min_window);
            if (spec.ci == CiMethod::analytic) {
                entry.bound = analytic_ci(result, spec.level).beta;
            } else {
                BootstrapConfig boot = spec.bootstrap;
                boot.level = spec.level;
                boot.seed = derive_seed(spec.bootstrap.seed,
                                        {static_cast<std::uint64_t>(spec.mode), k});
                if (parallel_windows) boot.threads = 1;
                const auto rho = series.rho().subspan(windows[k].start, windows[k].size());
                const auto spread = series.spread().subspan(windows[k].start, windows[k].size());
                entry.bound = bootstrap_ci(rho, spread, boot);
            }
            entry.result = std::move(result);
        } catch (const NumericalError& e) {
            entry.result.reset();
            entry.bound.reset();
            entry.error = e.what();
        }
    });
    return trace;
}

std::size_t zero_crossings(std::span<const double> bounds) {
    if (bounds.size() < 2) throw InputError("zero_crossings needs at least 2 bounds");
    std::size_t crossings = 0;
    int previous_sign = 0;
    for (double b : bounds) {
        const int sign = (b > 0.0) - (b < 0.0);
        if (sign == 0) continue;
        if (previous_sign != 0 && sign != previous_sign) ++crossings;
        previous_sign = sign;
    }
    return crossings;
}

CrossingSummary zero_crossings(const RecursionTrace& trace) {
    CrossingSummary summary;
    std::vector<double> bounds;
    bounds.reserve(trace.entries.size());
    for (const auto& e : trace.entries) {
        if (e.bound) {
            bounds.push_back(e.bound->lower);
        } else {
            ++summary.gaps;
        }
    }
    if (trace.entries.size() < 2) throw InputError("zero_crossings needs at least 2 bounds");
    summary.crossings = bounds.size() < 2 ? 0 : zero_crossings(bounds);
    return summary;
}

PuzzleClass classify_puzzle(const ConfidenceBound& bound) {
    if (bound.lower > 0.0) return PuzzleClass::supporting;
    if (bound.upper < 0.0) return PuzzleClass::contradicting;
    return PuzzleClass::inconclusive;
}

std::string to_string(RecursionMode mode) {
    switch (mode) {
        case RecursionMode::forward: return "forward";
        case RecursionMode::backward: return "backward";
        case RecursionMode::rolling: return "rolling";
    }
    return "unknown";
}

std::string to_string(PuzzleClass c) {
    switch (c) {
        case PuzzleClass::supporting: return "supporting";
        case PuzzleClass::contradicting: return "contradicting";
        case PuzzleClass::inconclusive: return "inconclusive";
    }
    return "unknown";
}

RecursionMode parse_recursion_mode(std::string_view text) {
    if (text == "forward") return RecursionMode::forward;
    if (text == "backward") return RecursionMode::backward;
    if (text == "rolling") return RecursionMode::rolling;
    throw InputError("unknown recursion mode: " + std::string(text));
}

}  // namespace famarec
