#include "famarec/data_model.hpp"

#include "famarec/error.hpp"
#include "famarec/format.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace famarec {
namespace {

void check_consecutive(std::span<const YearMonth> dates, const std::string& code) {
    for (std::size_t k = 1; k < dates.size(); ++k) {
        const int step = dates[k].ordinal() - dates[k - 1].ordinal();
        if (step <= 0) {
            throw InputError(code + ": dates not strictly increasing at " + dates[k].label());
        }
        if (step > 1) {
            throw InputError(code + ": date gap between " + dates[k - 1].label() + " and " +
                             dates[k].label());
        }
    }
}

void check_finite(std::span<const double> values, const std::string& code, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw InputError(code + ": non-finite value in " + what);
    }
}

template <typename T>
std::vector<T> copy_range(std::span<const T> values, std::size_t start, std::size_t end) {
    return {values.begin() + static_cast<std::ptrdiff_t>(start),
            values.begin() + static_cast<std::ptrdiff_t>(end)};
}

void check_window(std::size_t series_size, std::size_t start, std::size_t end,
                  std::size_t min_size) {
    if (start >= end || end > series_size) {
        throw InputError("window [" + std::to_string(start) + ", " + std::to_string(end) +
                         ") out of range for series of length " + std::to_string(series_size));
    }
    if (end - start < min_size) {
        throw InputError("window of " + std::to_string(end - start) +
                         " observations is below the minimum of " + std::to_string(min_size));
    }
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(delimiter, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

bool is_missing_token(std::string_view cell) {
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "." ||
           cell == "N/A";
}

enum class Field { spot = 0, i_home = 1, i_foreign = 2 };

constexpr std::array<std::string_view, 3> kFieldSuffix = {"_spot", "_i_home", "_i_foreign"};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path.string());
    out << text;
}

}  // namespace

CountrySeries::CountrySeries(std::string code, std::vector<YearMonth> dates,
                             std::vector<double> log_spot, std::vector<double> i_home,
                             std::vector<double> i_foreign)
    : code_(std::move(code)),
      dates_(std::move(dates)),
      log_spot_(std::move(log_spot)),
      i_home_(std::move(i_home)),
      i_foreign_(std::move(i_foreign)) {
    if (code_.empty()) throw InputError("country series without a code");
    if (log_spot_.size() != dates_.size() || i_home_.size() != dates_.size() ||
        i_foreign_.size() != dates_.size()) {
        throw InputError(code_ + ": series length mismatch");
    }
    if (dates_.size() < 2) throw InputError(code_ + ": series shorter than 2");
    check_consecutive(dates_, code_);
    check_finite(log_spot_, code_, "spot");
    check_finite(i_home_, code_, "i_home");
    check_finite(i_foreign_, code_, "i_foreign");
}

ExcessReturnSeries::ExcessReturnSeries(std::string code, std::vector<YearMonth> dates,
                                       std::vector<double> rho, std::vector<double> spread)
    : code_(std::move(code)),
      dates_(std::move(dates)),
      rho_(std::move(rho)),
      spread_(std::move(spread)) {
    if (rho_.size() != dates_.size() || spread_.size() != dates_.size()) {
        throw InputError(code_ + ": excess return length mismatch");
    }
    if (dates_.empty()) throw InputError(code_ + ": empty excess return series");
    check_consecutive(dates_, code_);
    check_finite(rho_, code_, "rho");
    check_finite(spread_, code_, "spread");
}

std::string sample_label(const ExcessReturnSeries& series, std::size_t start, std::size_t end) {
    return range_label(series.dates()[start].plus_months(-1), series.dates()[end - 1]);
}

std::string sample_label(const CountrySeries& series, std::size_t start, std::size_t end) {
    return range_label(series.dates()[start], series.dates()[end - 1]);
}

SampleWindow make_window(const ExcessReturnSeries& series, std::size_t start, std::size_t end,
                         std::size_t min_size) {
    check_window(series.size(), start, end, min_size);
    return {start, end, sample_label(series, start, end)};
}

SampleWindow make_window(const CountrySeries& series, std::size_t start, std::size_t end,
                         std::size_t min_size) {
    check_window(series.size(), start, end, min_size);
    return {start, end, sample_label(series, start, end)};
}

SampleWindow full_window(const ExcessReturnSeries& series) {
    return {0, series.size(), sample_label(series, 0, series.size())};
}

SampleWindow compose(const SampleWindow& outer, const SampleWindow& inner) {
    if (inner.start >= inner.end || inner.end > outer.size()) {
        throw InputError("inner window does not fit inside outer window");
    }
    return {outer.start + inner.start, outer.start + inner.end, inner.label};
}

ExcessReturnSeries slice(const ExcessReturnSeries& series, const SampleWindow& window,
                         std::size_t min_size) {
    check_window(series.size(), window.start, window.end, min_size);
    return {series.code(), copy_range(series.dates(), window.start, window.end),
            copy_range(series.rho(), window.start, window.end),
            copy_range(series.spread(), window.start, window.end)};
}

CountrySeries slice(const CountrySeries& series, const SampleWindow& window,
                    std::size_t min_size) {
    check_window(series.size(), window.start, window.end, min_size);
    return {series.code(), copy_range(series.dates(), window.start, window.end),
            copy_range(series.log_spot(), window.start, window.end),
            copy_range(series.i_home(), window.start, window.end),
            copy_range(series.i_foreign(), window.start, window.end)};
}

void validate_weights(const Weights& weights) {
    if (weights.empty()) throw InputError("weight vector absent");
    double sum = 0.0;
    for (const auto& [code, w] : weights) {
        if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
            throw InputError("weight for " + code + " outside [0,1]");
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
        throw InputError("weights sum to " + format_double(sum) + ", expected 1");
    }
}

Panel::Panel(std::vector<CountrySeries> series, Weights weights)
    : series_(std::move(series)), weights_(std::move(weights)) {
    if (series_.empty()) throw InputError("panel without series");
    for (std::size_t a = 0; a < series_.size(); ++a) {
        for (std::size_t b = a + 1; b < series_.size(); ++b) {
            if (series_[a].code() == series_[b].code()) {
                throw InputError("duplicate country: " + series_[a].code());
            }
        }
        if (series_[a].size() != series_[0].size() ||
            series_[a].dates().front() != series_[0].dates().front()) {
            throw InputError(series_[a].code() + ": date range differs from " + series_[0].code());
        }
        if (!weights_.contains(series_[a].code())) {
            throw InputError("weight missing for country: " + series_[a].code());
        }
    }
    for (const auto& [code, w] : weights_) {
        if (!contains(code)) throw InputError("weight given for unknown country: " + code);
    }
    validate_weights(weights_);
}

std::vector<std::string> Panel::codes() const {
    std::vector<std::string> out;
    out.reserve(series_.size());
    for (const auto& s : series_) out.push_back(s.code());
    return out;
}

bool Panel::contains(std::string_view code) const {
    return std::any_of(series_.begin(), series_.end(),
                       [&](const CountrySeries& s) { return s.code() == code; });
}

const CountrySeries& Panel::at(std::string_view code) const {
    for (const auto& s : series_) {
        if (s.code() == code) return s;
    }
    throw InputError("unknown country: " + std::string(code));
}

Weights read_weights(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    Weights weights;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (eq == std::string_view::npos) throw InputError(where + ": expected 'code = weight'");
        const auto code = trim(line.substr(0, eq));
        const auto value = parse_double(line.substr(eq + 1));
        if (code.empty() || !value) throw InputError(where + ": expected 'code = weight'");
        if (!weights.emplace(std::string(code), *value).second) {
            throw InputError(where + ": duplicate weight for " + std::string(code));
        }
    }
    validate_weights(weights);
    return weights;
}

void write_weights(const Weights& weights, const std::filesystem::path& path) {
    std::string text;
    for (const auto& [code, w] : weights) text += code + " = " + format_double(w) + "\n";
    write_file(path, text);
}

Panel parse_panel(std::string_view text, const IngestConfig& config) {
    if (!(config.rate_divisor > 0.0) || !std::isfinite(config.rate_divisor)) {
        throw InputError("rate divisor must be positive");
    }
    std::vector<std::string_view> lines;
    {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto next = text.find('\n', pos);
            auto line = text.substr(pos, next == std::string_view::npos ? text.size() - pos
                                                                        : next - pos);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            if (!trim(line).empty() && trim(line).front() != '#') lines.push_back(line);
            if (next == std::string_view::npos) break;
            pos = next + 1;
        }
    }
    if (lines.empty()) throw InputError("missing header row");

    const auto header = split(lines.front(), config.delimiter);
    {
        std::string first(header.front());
        std::transform(first.begin(), first.end(), first.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (first != "date") throw InputError("missing column: date (first header field)");
    }

    // column index per (country, field), countries in order of first appearance
    std::vector<std::string> codes;
    std::vector<std::array<std::ptrdiff_t, 3>> columns;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const auto name = header[c];
        bool matched = false;
        for (std::size_t f = 0; f < kFieldSuffix.size(); ++f) {
            const auto suffix = kFieldSuffix[f];
            if (name.size() > suffix.size() && name.ends_with(suffix)) {
                const std::string code(name.substr(0, name.size() - suffix.size()));
                auto it = std::find(codes.begin(), codes.end(), code);
                if (it == codes.end()) {
                    codes.push_back(code);
                    columns.push_back({-1, -1, -1});
                    it = codes.end() - 1;
                }
                auto& slot = columns[static_cast<std::size_t>(it - codes.begin())][f];
                if (slot >= 0) throw InputError("duplicate column: " + std::string(name));
                slot = static_cast<std::ptrdiff_t>(c);
                matched = true;
                break;
            }
        }
        if (!matched) throw InputError("unrecognized column: " + std::string(name));
    }
    if (codes.empty()) throw InputError("missing column: no country columns in header");
    for (std::size_t k = 0; k < codes.size(); ++k) {
        for (std::size_t f = 0; f < kFieldSuffix.size(); ++f) {
            if (columns[k][f] < 0) {
                throw InputError("missing column: " + codes[k] + std::string(kFieldSuffix[f]));
            }
        }
    }

    const std::size_t rows = lines.size() - 1;
    std::vector<YearMonth> dates;
    dates.reserve(rows);
    std::vector<std::vector<double>> values(header.size(), std::vector<double>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const auto cells = split(lines[r + 1], config.delimiter);
        if (cells.size() != header.size()) {
            throw InputError("row " + std::to_string(r + 2) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(cells.size()));
        }
        const auto date = YearMonth::parse(cells[0]);
        if (!dates.empty()) {
            const int step = date.ordinal() - dates.back().ordinal();
            if (step > 1) {
                throw InputError("date gap between " + dates.back().label() + " and " +
                                 date.label());
            }
            if (step <= 0) throw InputError("dates not strictly increasing at " + date.label());
        }
        dates.push_back(date);
        for (std::size_t c = 1; c < cells.size(); ++c) {
            if (is_missing_token(cells[c])) {
                if (!config.forward_fill) {
                    throw InputError("missing value at " + date.label() + " in column " +
                                     std::string(header[c]));
                }
                if (r == 0) {
                    throw InputError("missing value in first row, column " +
                                     std::string(header[c]) + ": nothing to forward-fill");
                }
                values[c][r] = values[c][r - 1];
                continue;
            }
            const auto v = parse_double(cells[c]);
            if (!v) {
                throw InputError("unparseable number '" + std::string(cells[c]) + "' at " +
                                 date.label() + " in column " + std::string(header[c]));
            }
            values[c][r] = *v;
        }
    }

    std::vector<CountrySeries> series;
    series.reserve(codes.size());
    for (std::size_t k = 0; k < codes.size(); ++k) {
        auto spot = values[static_cast<std::size_t>(columns[k][0])];
        auto home = values[static_cast<std::size_t>(columns[k][1])];
        auto foreign = values[static_cast<std::size_t>(columns[k][2])];
        if (!config.spot_is_log) {
            for (double& s : spot) {
                if (!(s > 0.0)) throw InputError(codes[k] + ": non-positive spot level");
                s = std::log(s);
            }
        }
        for (double& v : home) v /= config.rate_divisor;
        for (double& v : foreign) v /= config.rate_divisor;
        series.emplace_back(codes[k], dates, std::move(spot), std::move(home), std::move(foreign));
    }

    Weights weights;
    if (config.weights && !config.weights->empty()) {
        weights = *config.weights;
    } else if (config.uniform_weights_default) {
        for (const auto& code : codes) weights[code] = 1.0 / static_cast<double>(codes.size());
        // 1/n does not always sum to exactly one; put the remainder on the last country
        double sum = 0.0;
        for (const auto& [code, w] : weights) sum += w;
        weights[codes.back()] += 1.0 - sum;
    } else {
        throw InputError("weight vector absent and no default supplied");
    }
    return Panel(std::move(series), std::move(weights));
}

Panel load_panel(const std::filesystem::path& path, const IngestConfig& config) {
    return parse_panel(read_file(path), config);
}

std::string format_panel(const Panel& panel, const IngestConfig& config,
                         std::span<const std::string> metadata) {
    const char d = config.delimiter;
    std::string out;
    for (const auto& line : metadata) out += "# " + line + "\n";
    out += "date";
    for (const auto& s : panel.series()) {
        for (const auto suffix : kFieldSuffix) {
            out += d;
            out += s.code();
            out += suffix;
        }
    }
    out += '\n';
    const auto& first = panel.series().front();
    for (std::size_t r = 0; r < first.size(); ++r) {
        out += first.dates()[r].label();
        for (const auto& s : panel.series()) {
            const double spot = config.spot_is_log ? s.log_spot()[r] : std::exp(s.log_spot()[r]);
            out += d + format_double(spot);
            out += d + format_double(s.i_home()[r] * config.rate_divisor);
            out += d + format_double(s.i_foreign()[r] * config.rate_divisor);
        }
        out += '\n';
    }
    return out;
}

void write_panel(const Panel& panel, const std::filesystem::path& path,
                 const IngestConfig& config, std::span<const std::string> metadata) {
    write_file(path, format_panel(panel, config, metadata));
}

ExcessReturnSeries excess_returns(const CountrySeries& series, const ScaleConfig& scale) {
    const std::size_t n = series.size();
    if (n < 2) throw InputError(series.code() + ": series shorter than 2");
    const auto s = series.log_spot();
    const auto home = series.i_home();
    const auto foreign = series.i_foreign();
    std::vector<double> rho(n - 1);
    std::vector<double> spread(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        rho[k] = foreign[k] + (s[k + 1] - s[k]) * scale.log_change_scale - home[k];
        spread[k] = foreign[k] - home[k];
    }
    return {series.code(), copy_range(series.dates(), 1, n), std::move(rho), std::move(spread)};
}

std::vector<ExcessReturnSeries> excess_returns(const Panel& panel, const ScaleConfig& scale) {
    std::vector<ExcessReturnSeries> out;
    out.reserve(panel.series().size());
    for (const auto& s : panel.series()) out.push_back(excess_returns(s, scale));
    return out;
}

ExcessReturnSeries aggregate(std::span<const ExcessReturnSeries> series, const Weights& weights,
                             std::string code) {
    if (series.empty()) throw InputError("aggregate of no series");
    const auto& first = series.front();
    std::vector<double> rho(first.size(), 0.0);
    std::vector<double> spread(first.size(), 0.0);
    for (const auto& s : series) {
        const auto it = weights.find(s.code());
        if (it == weights.end()) throw InputError("weight missing for country: " + s.code());
        if (s.size() != first.size() || s.dates().front() != first.dates().front()) {
            throw InputError(s.code() + ": date range differs from " + first.code());
        }
        const double w = it->second;
        for (std::size_t k = 0; k < rho.size(); ++k) {
            rho[k] += w * s.rho()[k];
            spread[k] += w * s.spread()[k];
        }
    }
    return {std::move(code), copy_range(first.dates(), 0, first.size()), std::move(rho),
            std::move(spread)};
}

ExcessReturnSeries g6_aggregate(const Panel& panel, const ScaleConfig& scale) {
    const auto series = excess_returns(panel, scale);
    return aggregate(series, panel.weights());
}

}  // namespace famarec
