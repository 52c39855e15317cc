#include "famarec/diagnostics.hpp"

#include "famarec/error.hpp"
#include "famarec/format.hpp"

#include <algorithm>
#include <cmath>

namespace famarec {
namespace {

std::size_t display_width(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

std::string pad_left(std::string_view s, std::size_t width) {
    const auto w = display_width(s);
    return std::string(w < width ? width - w : 0, ' ') + std::string(s);
}

std::string pad_right(std::string_view s, std::size_t width) {
    const auto w = display_width(s);
    return std::string(s) + std::string(w < width ? width - w : 0, ' ');
}

double mean(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v;
    return sum / static_cast<double>(x.size());
}

std::string percent_label(double level) {
    const double pct = level * 100.0;
    if (std::abs(pct - std::round(pct)) < 1e-9) return format_fixed(std::round(pct), 0) + "%";
    return format_double(pct) + "%";
}

}  // namespace

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw InputError("variance needs at least 2 observations");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("correlation: length mismatch");
    if (x.size() < 2) throw InputError("correlation needs at least 2 observations");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        sxx += (x[t] - mx) * (x[t] - mx);
        syy += (y[t] - my) * (y[t] - my);
        sxy += (x[t] - mx) * (y[t] - my);
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw NumericalError("correlation of a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

VarianceRow variance_row(const ExcessReturnSeries& series) {
    VarianceRow row;
    row.country_code = series.code();
    row.var_rho = sample_variance(series.rho());
    row.var_spread = sample_variance(series.spread());
    if (!(row.var_spread > 0.0)) {
        throw NumericalError(series.code() + ": zero-variance spread");
    }
    row.factor = std::lround(row.var_rho / row.var_spread);
    row.corr_pct = row.var_rho > 0.0 ? 100.0 * correlation(series.spread(), series.rho()) : 0.0;
    return row;
}

std::vector<VarianceRow> variance_table(std::span<const ExcessReturnSeries> countries,
                                        const Weights& weights,
                                        const std::string& aggregate_code) {
    std::vector<VarianceRow> rows;
    rows.reserve(countries.size() + 1);
    for (const auto& s : countries) rows.push_back(variance_row(s));
    rows.push_back(variance_row(aggregate(countries, weights, aggregate_code)));
    return rows;
}

EvidenceSummary evidence_summary(std::span<const CountryBound> bounds, const Weights& weights,
                                 std::string sample_label, std::optional<CountryBound> aggregate) {
    validate_weights(weights);
    for (const auto& [code, w] : weights) {
        const bool present = std::any_of(bounds.begin(), bounds.end(),
                                         [&](const CountryBound& b) { return b.code == code; });
        if (!present) throw InputError("missing country bound: " + code);
    }
    EvidenceSummary out;
    out.sample_label = std::move(sample_label);
    out.level = bounds.empty() ? 0.0 : bounds.front().bound.level;
    for (const auto& b : bounds) {
        const auto it = weights.find(b.code);
        if (it == weights.end()) throw InputError("no weight for country bound: " + b.code);
        if (std::any_of(out.per_country.begin(), out.per_country.end(),
                        [&](const CountryEvidence& e) { return e.code == b.code; })) {
            throw InputError("duplicate country bound: " + b.code);
        }
        const auto c = classify_puzzle(b.bound);
        const double w = it->second;
        out.per_country.push_back({b.code, b.bound, c, w});
        switch (c) {
            case PuzzleClass::supporting:
                ++out.head_supporting;
                out.weighted_supporting += w;
                break;
            case PuzzleClass::contradicting:
                ++out.head_strict_contradicting;
                out.weighted_strict_contradicting += w;
                break;
            case PuzzleClass::inconclusive:
                ++out.head_inconclusive;
                out.weighted_inconclusive += w;
                break;
        }
    }
    out.head_contradicting = out.head_strict_contradicting + out.head_inconclusive;
    out.weighted_contradicting = out.weighted_strict_contradicting + out.weighted_inconclusive;
    if (aggregate) {
        out.aggregate = CountryEvidence{aggregate->code, aggregate->bound,
                                        classify_puzzle(aggregate->bound), 1.0};
    }
    return out;
}

std::string render_variance_table(std::span<const VarianceRow> rows) {
    constexpr std::size_t c0 = 10;
    constexpr std::size_t c = 12;
    std::string out = "Excess return and interest differential: variances and correlation\n";
    out += "rho(t+1) = zeta + beta (i*(t) - i(t)) + u(t+1)\n";
    out += pad_right("country", c0) + pad_left("Var(rho)", c) + pad_left("Var(i*-i)", c) +
           pad_left("factor", c) + pad_left("corr.(%)", c) + "\n";
    out += std::string(c0 + 4 * c, '-') + "\n";
    for (const auto& r : rows) {
        out += pad_right(r.country_code, c0) + pad_left(format_fixed(r.var_rho, 3), c) +
               pad_left(format_fixed(r.var_spread, 3), c) + pad_left(std::to_string(r.factor), c) +
               pad_left(format_fixed(r.corr_pct, 2), c) + "\n";
    }
    return out;
}

std::string variance_table_csv(std::span<const VarianceRow> rows) {
    std::string out = "country,var_rho,var_spread,factor,corr_pct\n";
    for (const auto& r : rows) {
        out += r.country_code + "," + format_double(r.var_rho) + "," +
               format_double(r.var_spread) + "," + std::to_string(r.factor) + "," +
               format_double(r.corr_pct) + "\n";
    }
    return out;
}

std::string render_evidence_table(std::span<const EvidenceSummary> samples) {
    if (samples.empty()) return {};
    constexpr std::size_t c0 = 14;
    std::size_t c = 10;
    for (const auto& s : samples) c = std::max(c, display_width(s.sample_label) + 3);

    const auto& first = samples.front();
    std::string out = "Beta intervals on the shortened samples\n";
    out += percent_label(first.level) + " lower bound of beta by sample\n";
    out += pad_right("country", c0);
    for (const auto& s : samples) out += pad_left(s.sample_label, c);
    out += "\n" + std::string(c0 + c * samples.size(), '-') + "\n";

    auto lower_of = [](const EvidenceSummary& s, const std::string& code) -> std::string {
        for (const auto& e : s.per_country) {
            if (e.code == code) return format_fixed(e.bound.lower, 3);
        }
        if (s.aggregate && s.aggregate->code == code) return format_fixed(s.aggregate->bound.lower, 3);
        return "n/a";
    };
    std::vector<std::string> codes;
    for (const auto& e : first.per_country) codes.push_back(e.code);
    if (first.aggregate) codes.push_back(first.aggregate->code);
    for (const auto& code : codes) {
        out += pad_right(code, c0);
        for (const auto& s : samples) out += pad_left(lower_of(s, code), c);
        out += "\n";
    }

    auto row = [&](const std::string& name, auto value) {
        out += pad_right(name, c0);
        for (const auto& s : samples) out += pad_left(value(s), c);
        out += "\n";
    };
    out += "\nHead count (straddling zero counts as contradicting)\n";
    row("supporting", [](const EvidenceSummary& s) { return std::to_string(s.head_supporting); });
    row("contradicting",
        [](const EvidenceSummary& s) { return std::to_string(s.head_contradicting); });
    row("  below zero",
        [](const EvidenceSummary& s) { return std::to_string(s.head_strict_contradicting); });
    row("  straddling",
        [](const EvidenceSummary& s) { return std::to_string(s.head_inconclusive); });
    out += "\nWeighted by country weights\n";
    row("supporting",
        [](const EvidenceSummary& s) { return format_fixed(s.weighted_supporting, 2); });
    row("contradicting",
        [](const EvidenceSummary& s) { return format_fixed(s.weighted_contradicting, 2); });
    return out;
}

std::string evidence_table_csv(std::span<const EvidenceSummary> samples) {
    std::string out = "sample,level,code,role,weight,lower,upper,classification\n";
    auto emit = [&](const EvidenceSummary& s, const CountryEvidence& e, const char* role) {
        out += s.sample_label + "," + format_double(s.level) + "," + e.code + "," + role + "," +
               format_double(e.weight) + "," + format_double(e.bound.lower) + "," +
               format_double(e.bound.upper) + "," + to_string(e.classification) + "\n";
    };
    for (const auto& s : samples) {
        for (const auto& e : s.per_country) emit(s, e, "country");
        if (s.aggregate) emit(s, *s.aggregate, "aggregate");
    }
    return out;
}

std::string evidence_summary_csv(std::span<const EvidenceSummary> samples) {
    std::string out =
        "sample,level,head_supporting,head_contradicting,head_strict_contradicting,"
        "head_inconclusive,weighted_supporting,weighted_contradicting,"
        "weighted_strict_contradicting,weighted_inconclusive\n";
    for (const auto& s : samples) {
        out += s.sample_label + "," + format_double(s.level) + "," +
               std::to_string(s.head_supporting) + "," + std::to_string(s.head_contradicting) +
               "," + std::to_string(s.head_strict_contradicting) + "," +
               std::to_string(s.head_inconclusive) + "," + format_double(s.weighted_supporting) +
               "," + format_double(s.weighted_contradicting) + "," +
               format_double(s.weighted_strict_contradicting) + "," +
               format_double(s.weighted_inconclusive) + "\n";
    }
    return out;
}

}  // namespace famarec
