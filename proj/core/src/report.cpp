#include "famarec/report.hpp"

#include "famarec/format.hpp"

#ifdef FAMAREC_VENDORED_JSON
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace famarec {
namespace {

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

nlohmann::ordered_json bound_json(const ConfidenceBound& b) {
    return {{"level", b.level},
            {"lower", b.lower},
            {"upper", b.upper},
            {"target", to_string(b.target)},
            {"method", to_string(b.method)},
            {"classification", to_string(classify_puzzle(b))}};
}

}  // namespace

Metadata& Metadata::add(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
    return *this;
}

std::string Metadata::comment_block() const {
    std::string out;
    for (const auto& [k, v] : entries_) out += "# " + k + ": " + v + "\n";
    return out;
}

std::string level_tag(double level) {
    const double pct = level * 100.0;
    if (std::abs(pct - std::round(pct)) < 1e-9) return std::to_string(std::lround(pct));
    std::string s = format_double(pct);
    std::replace(s.begin(), s.end(), '.', '_');
    return s;
}

std::string fama_csv(std::span<const FamaRow> rows) {
    std::string out =
        "country,window_label,start,end,n,zeta,beta,se_zeta,se_beta,residual_variance,se_method";
    if (!rows.empty()) {
        for (const auto& b : rows.front().beta_bounds) {
            const auto tag = level_tag(b.level);
            out += ",lower_" + tag + ",upper_" + tag + ",class_" + tag;
        }
    }
    out += "\n";
    for (const auto& row : rows) {
        const auto& r = row.result;
        out += row.country + "," + r.window.label + "," + std::to_string(r.window.start) + "," +
               std::to_string(r.window.end) + "," + std::to_string(r.n) + "," +
               format_double(r.zeta_hat) + "," + format_double(r.beta_hat) + "," +
               format_double(r.se_zeta) + "," + format_double(r.se_beta) + "," +
               format_double(r.residual_variance) + "," + r.se_method.label(r.n);
        for (const auto& b : row.beta_bounds) {
            out += "," + format_double(b.lower) + "," + format_double(b.upper) + "," +
                   to_string(classify_puzzle(b));
        }
        out += "\n";
    }
    return out;
}

std::string fama_json(std::span<const FamaRow> rows, const Metadata& metadata) {
    nlohmann::ordered_json doc;
    auto& meta = doc["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : metadata.entries()) meta[k] = v;
    auto& fits = doc["fits"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        const auto& r = row.result;
        nlohmann::ordered_json fit = {{"country", row.country},
                                      {"window_label", r.window.label},
                                      {"start", r.window.start},
                                      {"end", r.window.end},
                                      {"n", r.n},
                                      {"zeta", r.zeta_hat},
                                      {"beta", r.beta_hat},
                                      {"se_zeta", r.se_zeta},
                                      {"se_beta", r.se_beta},
                                      {"residual_variance", r.residual_variance},
                                      {"se_method", r.se_method.label(r.n)}};
        auto& bounds = fit["beta_bounds"] = nlohmann::ordered_json::array();
        for (const auto& b : row.beta_bounds) bounds.push_back(bound_json(b));
        fits.push_back(std::move(fit));
    }
    return doc.dump(2) + "\n";
}

std::string trajectory_csv_header() {
    return "country,mode,k,window_label,n,zeta,beta,se,lower,upper,status\n";
}

std::string trajectory_csv(std::span<const RecursionTrace> traces) {
    std::string out = trajectory_csv_header();
    for (const auto& trace : traces) {
        const auto mode = to_string(trace.spec.mode);
        for (const auto& e : trace.entries) {
            out += trace.series_code + "," + mode + "," + std::to_string(e.k) + "," +
                   e.window.label + "," + std::to_string(e.window.size()) + ",";
            if (e.ok() && e.bound) {
                const auto& r = *e.result;
                out += format_double(r.zeta_hat) + "," + format_double(r.beta_hat) + "," +
                       format_double(r.se_beta) + "," + format_double(e.bound->lower) + "," +
                       format_double(e.bound->upper) + ",ok\n";
            } else {
                out += ",,,,,gap: " + sanitize(e.error) + "\n";
            }
        }
    }
    return out;
}

std::string replicates_csv(std::span<const double> replicates) {
    std::string out = "beta\n";
    for (double b : replicates) out += format_double(b) + "\n";
    return out;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace famarec
