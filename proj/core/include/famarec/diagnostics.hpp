#pragma once

#include "famarec/data_model.hpp"
#include "famarec/recursion.hpp"
#include "famarec/regression.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace famarec {

// Variances use the n-1 denominator throughout.

struct VarianceRow {
    std::string country_code;
    double var_rho = 0.0;
    double var_spread = 0.0;
    long factor = 0;        ///< round(var_rho / var_spread)
    double corr_pct = 0.0;  ///< Pearson correlation of spread and rho, in percent
};

[[nodiscard]] double sample_variance(std::span<const double> x);
[[nodiscard]] double correlation(std::span<const double> x, std::span<const double> y);

/// Throws NumericalError("zero-variance spread") if the spread is constant.
[[nodiscard]] VarianceRow variance_row(const ExcessReturnSeries& series);

/// One row per country in order, followed by the weighted aggregate ("G6")
/// computed by aggregating rho and spread first and taking variances after.
[[nodiscard]] std::vector<VarianceRow> variance_table(std::span<const ExcessReturnSeries> countries,
                                                      const Weights& weights,
                                                      const std::string& aggregate_code = "G6");

struct CountryBound {
    std::string code;
    ConfidenceBound bound;
};

struct CountryEvidence {
    std::string code;
    ConfidenceBound bound;
    PuzzleClass classification = PuzzleClass::inconclusive;
    double weight = 0.0;
};

struct EvidenceSummary {
    std::string sample_label;
    double level = 0.0;
    std::vector<CountryEvidence> per_country;  ///< input order
    /// Reported alongside but never counted.
    std::optional<CountryEvidence> aggregate;

    // Two-way pooling: contradicting includes inconclusive.
    std::size_t head_supporting = 0;
    std::size_t head_contradicting = 0;
    double weighted_supporting = 0.0;
    double weighted_contradicting = 0.0;

    // Three-way split.
    std::size_t head_strict_contradicting = 0;
    std::size_t head_inconclusive = 0;
    double weighted_strict_contradicting = 0.0;
    double weighted_inconclusive = 0.0;
};

/// Classifies every weighted country. Throws InputError("missing country bound: X")
/// if a weighted country has no bound, or if a bound has no weight.
[[nodiscard]] EvidenceSummary evidence_summary(std::span<const CountryBound> bounds,
                                               const Weights& weights, std::string sample_label,
                                               std::optional<CountryBound> aggregate = std::nullopt);

// Renderers. Text tables use display rounding (3 decimals for variances, integer
// factor, 2 decimals for correlation and weights); delimited output is full precision.

[[nodiscard]] std::string render_variance_table(std::span<const VarianceRow> rows);
[[nodiscard]] std::string variance_table_csv(std::span<const VarianceRow> rows);

/// Lower bounds per country and sample, then head counts and weighted evidence.
[[nodiscard]] std::string render_evidence_table(std::span<const EvidenceSummary> samples);
/// Columns: sample,level,code,role,weight,lower,upper,classification.
[[nodiscard]] std::string evidence_table_csv(std::span<const EvidenceSummary> samples);
/// Columns: sample,level,head_supporting,head_contradicting,head_strict_contradicting,
/// head_inconclusive,weighted_supporting,weighted_contradicting,
/// weighted_strict_contradicting,weighted_inconclusive.
[[nodiscard]] std::string evidence_summary_csv(std::span<const EvidenceSummary> samples);

}  // namespace famarec
