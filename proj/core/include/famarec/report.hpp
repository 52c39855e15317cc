#pragma once

#include "famarec/recursion.hpp"
#include "famarec/regression.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace famarec {

inline constexpr std::string_view kVersion = "0.1.0";

/// Ordered key/value pairs written at the top of every output: as "# key: value"
/// lines in delimited files and as a "metadata" object in JSON.
class Metadata {
public:
    Metadata& add(std::string key, std::string value);
    [[nodiscard]] const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
        return entries_;
    }
    [[nodiscard]] std::string comment_block() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Full-sample fit for one country with beta bounds at one or more levels.
struct FamaRow {
    std::string country;
    RegressionResult result;
    std::vector<ConfidenceBound> beta_bounds;
};

/// Field order: country,window_label,start,end,n,zeta,beta,se_zeta,se_beta,
/// residual_variance,se_method, then for each level L (as "90", "95", ...):
/// lower_L,upper_L,class_L.
[[nodiscard]] std::string fama_csv(std::span<const FamaRow> rows);
[[nodiscard]] std::string fama_json(std::span<const FamaRow> rows, const Metadata& metadata);

/// One row per (country, mode, k):
/// country,mode,k,window_label,n,zeta,beta,se,lower,upper,status
/// `se` is the beta standard error; gaps leave the numeric fields empty and
/// carry "gap: <reason>" in status.
[[nodiscard]] std::string trajectory_csv(std::span<const RecursionTrace> traces);
[[nodiscard]] std::string trajectory_csv_header();

/// One replicate per line, column "beta".
[[nodiscard]] std::string replicates_csv(std::span<const double> replicates);

/// FNV-1a 64-bit of a byte string, hex encoded. Used for input checksums in run manifests.
[[nodiscard]] std::string fnv1a_hex(std::string_view bytes);

[[nodiscard]] std::string level_tag(double level);

}  // namespace famarec
