#pragma once

#include "famarec/calendar.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace famarec {

/// Country code -> weight. Weights of a panel sum to one.
using Weights = std::map<std::string, double, std::less<>>;

inline constexpr std::size_t kDefaultMinWindow = 24;
inline constexpr double kWeightSumTolerance = 1e-9;

/// Aligned monthly series for one currency pair: log spot price of the foreign
/// currency in home-currency units, plus home and foreign one-month interest
/// rates in percent per month. Validated on construction, immutable afterwards.
class CountrySeries {
public:
    CountrySeries(std::string code, std::vector<YearMonth> dates, std::vector<double> log_spot,
                  std::vector<double> i_home, std::vector<double> i_foreign);

    [[nodiscard]] const std::string& code() const noexcept { return code_; }
    [[nodiscard]] std::size_t size() const noexcept { return dates_.size(); }
    [[nodiscard]] std::span<const YearMonth> dates() const noexcept { return dates_; }
    [[nodiscard]] std::span<const double> log_spot() const noexcept { return log_spot_; }
    [[nodiscard]] std::span<const double> i_home() const noexcept { return i_home_; }
    [[nodiscard]] std::span<const double> i_foreign() const noexcept { return i_foreign_; }

private:
    std::string code_;
    std::vector<YearMonth> dates_;
    std::vector<double> log_spot_;
    std::vector<double> i_home_;
    std::vector<double> i_foreign_;
};

/// Excess return of the foreign-minus-home carry position and the lagged
/// interest differential, both in percent per month. Observation k is dated at
/// t+1, i.e. it uses spot data from months t and t+1 and rates from month t.
class ExcessReturnSeries {
public:
    ExcessReturnSeries(std::string code, std::vector<YearMonth> dates, std::vector<double> rho,
                       std::vector<double> spread);

    [[nodiscard]] const std::string& code() const noexcept { return code_; }
    [[nodiscard]] std::size_t size() const noexcept { return dates_.size(); }
    [[nodiscard]] std::span<const YearMonth> dates() const noexcept { return dates_; }
    [[nodiscard]] std::span<const double> rho() const noexcept { return rho_; }
    [[nodiscard]] std::span<const double> spread() const noexcept { return spread_; }

private:
    std::string code_;
    std::vector<YearMonth> dates_;
    std::vector<double> rho_;
    std::vector<double> spread_;
};

/// Half-open index range [start, end) into a series, with its calendar label.
struct SampleWindow {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string label;

    [[nodiscard]] std::size_t size() const noexcept { return end - start; }
    friend bool operator==(const SampleWindow&, const SampleWindow&) = default;
};

/// Label of the months a window draws on. For excess returns the label starts
/// one month before the first observation date, so a 364-observation sample
/// built from spot data 1979:6..2009:10 is labelled "1979:6–2009:10".
[[nodiscard]] std::string sample_label(const ExcessReturnSeries& series, std::size_t start,
                                       std::size_t end);
[[nodiscard]] std::string sample_label(const CountrySeries& series, std::size_t start,
                                       std::size_t end);

/// Builds a validated window. Throws InputError when out of range or shorter
/// than min_size.
[[nodiscard]] SampleWindow make_window(const ExcessReturnSeries& series, std::size_t start,
                                       std::size_t end, std::size_t min_size = kDefaultMinWindow);
[[nodiscard]] SampleWindow make_window(const CountrySeries& series, std::size_t start,
                                       std::size_t end, std::size_t min_size = kDefaultMinWindow);

[[nodiscard]] SampleWindow full_window(const ExcessReturnSeries& series);

/// Window `inner` expressed in the coordinates of the series `outer` was cut from.
[[nodiscard]] SampleWindow compose(const SampleWindow& outer, const SampleWindow& inner);

[[nodiscard]] ExcessReturnSeries slice(const ExcessReturnSeries& series, const SampleWindow& window,
                                       std::size_t min_size = kDefaultMinWindow);
[[nodiscard]] CountrySeries slice(const CountrySeries& series, const SampleWindow& window,
                                  std::size_t min_size = kDefaultMinWindow);

/// A set of aligned country series plus their aggregation weights.
class Panel {
public:
    Panel(std::vector<CountrySeries> series, Weights weights);

    [[nodiscard]] const std::vector<CountrySeries>& series() const noexcept { return series_; }
    [[nodiscard]] const Weights& weights() const noexcept { return weights_; }
    [[nodiscard]] std::vector<std::string> codes() const;
    [[nodiscard]] bool contains(std::string_view code) const;
    /// Throws InputError("unknown country: ...").
    [[nodiscard]] const CountrySeries& at(std::string_view code) const;

private:
    std::vector<CountrySeries> series_;
    Weights weights_;
};

/// How raw file columns map onto the internal units.
struct IngestConfig {
    char delimiter = ',';
    /// Spot column already holds log prices; otherwise levels are logged.
    bool spot_is_log = false;
    /// Raw rates are divided by this. 12 turns annualized percent into percent per month.
    double rate_divisor = 12.0;
    /// Fill missing cells from the previous month instead of rejecting the file.
    bool forward_fill = false;
    std::optional<Weights> weights;
    /// Used only when `weights` is empty: equal weights for every country.
    bool uniform_weights_default = false;
};

struct ScaleConfig {
    /// Multiplies log spot changes so they are in percent, like the rates.
    double log_change_scale = 100.0;
};

/// Parses "code = weight" lines; '#' starts a comment.
[[nodiscard]] Weights read_weights(const std::filesystem::path& path);
void write_weights(const Weights& weights, const std::filesystem::path& path);

/// Reads the delimited panel format: header row "date,<C>_spot,<C>_i_home,<C>_i_foreign,..."
/// with one row per month. Lines starting with '#' are ignored.
[[nodiscard]] Panel load_panel(const std::filesystem::path& path, const IngestConfig& config);
[[nodiscard]] Panel parse_panel(std::string_view text, const IngestConfig& config);

/// Writes a panel in the ingestion format, inverting the unit conversion in
/// `config`. With spot_is_log and rate_divisor 1 the file reloads bit-for-bit.
void write_panel(const Panel& panel, const std::filesystem::path& path,
                 const IngestConfig& config, std::span<const std::string> metadata = {});
[[nodiscard]] std::string format_panel(const Panel& panel, const IngestConfig& config,
                                       std::span<const std::string> metadata = {});

/// rho[k] = i_foreign[k] + (s[k+1] - s[k]) * scale - i_home[k];
/// spread[k] = i_foreign[k] - i_home[k].
[[nodiscard]] ExcessReturnSeries excess_returns(const CountrySeries& series,
                                                const ScaleConfig& scale = {});

[[nodiscard]] std::vector<ExcessReturnSeries> excess_returns(const Panel& panel,
                                                             const ScaleConfig& scale = {});

/// Pointwise weighted average of rho and spread. All series must share dates.
[[nodiscard]] ExcessReturnSeries aggregate(std::span<const ExcessReturnSeries> series,
                                           const Weights& weights, std::string code = "G6");

[[nodiscard]] ExcessReturnSeries g6_aggregate(const Panel& panel, const ScaleConfig& scale = {});

/// Throws InputError unless every weight is in [0,1] and they sum to one.
void validate_weights(const Weights& weights);

}  // namespace famarec
