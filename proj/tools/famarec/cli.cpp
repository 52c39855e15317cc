#include "famarec/cli.hpp"

#include "famarec/bootstrap.hpp"
#include "famarec/data_model.hpp"
#include "famarec/diagnostics.hpp"
#include "famarec/error.hpp"
#include "famarec/format.hpp"
#include "famarec/recursion.hpp"
#include "famarec/regression.hpp"
#include "famarec/report.hpp"
#include "famarec/rng.hpp"
#include "famarec/synthetic.hpp"

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#ifdef FAMAREC_VENDORED_JSON
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace famarec::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Flags that are inconsistent with each other.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Run context: collects outputs so they are written in one place, together
// with the manifest.

struct Context {
    std::string command;
    std::vector<std::string> args;  ///< canonical flags, without --out and --threads
    std::uint64_t seed = 42;
    std::size_t threads = 1;
    fs::path out_dir;
    std::ostream* out = nullptr;
    std::vector<std::pair<std::string, std::string>> inputs;  ///< path, checksum
    std::vector<std::pair<std::string, std::string>> files;   ///< name, content
    std::vector<std::pair<std::string, std::string>> facts;   ///< units, sample, ...

    void record_input(const std::string& path) {
        const auto abs = fs::absolute(path).lexically_normal().string();
        for (const auto& [p, sum] : inputs) {
            if (p == abs) return;
        }
        inputs.emplace_back(abs, fnv1a_hex(read_file(abs)));
    }

    /// Full block for machine outputs; `portable` drops args and input paths
    /// so plain-text tables do not depend on where the inputs live.
    [[nodiscard]] Metadata metadata(bool portable = false) const {
        Metadata m;
        m.add("famarec", std::string(kVersion));
        m.add("command", command);
        if (!portable) {
            std::string joined;
            for (const auto& a : args) joined += (joined.empty() ? "" : " ") + a;
            m.add("args", joined);
        }
        m.add("seed", std::to_string(seed));
        for (const auto& [k, v] : facts) m.add(k, v);
        if (!portable) {
            for (const auto& [path, sum] : inputs) m.add("input", path + " fnv1a64=" + sum);
        }
        return m;
    }

    void fact(std::string key, std::string value) { facts.emplace_back(std::move(key), std::move(value)); }

    void emit(std::string name, std::string content) {
        files.emplace_back(std::move(name), std::move(content));
    }

    /// Delimited file with the metadata comment block on top.
    void emit_delimited(std::string name, const std::string& body) {
        emit(std::move(name), metadata().comment_block() + body);
    }

    /// Plain-text report followed by the portable metadata block.
    void emit_text(std::string name, const std::string& body) {
        emit(std::move(name), body + "\n" + metadata(true).comment_block());
    }
};

std::string manifest_json(const Context& ctx) {
    json doc;
    doc["tool"] = "famarec";
    doc["version"] = std::string(kVersion);
    doc["command"] = ctx.command;
    doc["args"] = ctx.args;
    doc["seed"] = ctx.seed;
    auto& inputs = doc["inputs"] = json::array();
    for (const auto& [path, sum] : ctx.inputs) inputs.push_back({{"path", path}, {"fnv1a64", sum}});
    auto& outputs = doc["outputs"] = json::array();
    for (const auto& [name, content] : ctx.files) {
        outputs.push_back({{"file", name}, {"fnv1a64", fnv1a_hex(content)}});
    }
    return doc.dump(2) + "\n";
}

void write_outputs(const Context& ctx) {
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + ctx.out_dir.string());
    for (const auto& [name, content] : ctx.files) write_file(ctx.out_dir / name, content);
    write_file(ctx.out_dir / "manifest.json", manifest_json(ctx));
}

/// Options given on the command line, in order, as flag/value strings. Path
/// options are made absolute so a manifest replays from any directory.
std::vector<std::string> canonical_args(const CLI::App& sub) {
    static const std::set<std::string> skipped{"--help", "--out", "--threads"};
    static const std::set<std::string> paths{"--input", "--weights"};
    std::vector<std::string> args;
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_name();
        if (skipped.count(name) != 0 || opt->count() == 0) continue;
        if (opt->get_expected_max() == 0) {
            args.push_back(name);
            continue;
        }
        for (const auto& value : opt->results()) {
            args.push_back(name);
            args.push_back(paths.count(name) != 0 ? fs::absolute(value).lexically_normal().string()
                                                  : value);
        }
    }
    return args;
}

// ---------------------------------------------------------------------------
// Shared option groups

struct CommonOptions {
    std::string out = "famarec-out";
    std::uint64_t seed = 42;
    std::size_t threads = 1;
};

void add_common(CLI::App* sub, CommonOptions& c) {
    sub->add_option("--out", c.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores); never changes results")
        ->capture_default_str();
}

struct DataOptions {
    std::string input;
    std::string weights;
    bool uniform_weights = false;
    double rate_divisor = 12.0;
    bool spot_log = false;
    double spot_scale = 100.0;
    bool forward_fill = false;
    std::string delimiter = ",";
    std::vector<std::string> countries;
};

void add_data(CLI::App* sub, DataOptions& d, bool with_filter) {
    sub->add_option("--input", d.input, "Panel file (date,<C>_spot,<C>_i_home,<C>_i_foreign,...)")
        ->required();
    sub->add_option("--weights", d.weights, "Weight file with 'code = weight' lines");
    sub->add_flag("--uniform-weights", d.uniform_weights,
                  "Equal weights when no weight file is given");
    sub->add_option("--rate-divisor", d.rate_divisor, "Raw rates are divided by this")
        ->capture_default_str();
    sub->add_flag("--spot-log", d.spot_log, "Spot columns already hold log prices");
    sub->add_option("--spot-scale", d.spot_scale, "Multiplier for log spot changes")
        ->capture_default_str();
    sub->add_flag("--forward-fill", d.forward_fill, "Fill missing cells from the previous month");
    sub->add_option("--delimiter", d.delimiter, "Field delimiter")->capture_default_str();
    if (with_filter) {
        sub->add_option("--countries", d.countries,
                        "Comma-separated country codes; G6 selects the aggregate")
            ->delimiter(',');
    }
}

struct Dataset {
    Panel panel;
    ScaleConfig scale;
    std::vector<ExcessReturnSeries> countries;
    ExcessReturnSeries aggregate;
};

Dataset load_dataset(const DataOptions& d, Context& ctx) {
    if (d.delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
    IngestConfig cfg;
    cfg.delimiter = d.delimiter[0];
    cfg.spot_is_log = d.spot_log;
    cfg.rate_divisor = d.rate_divisor;
    cfg.forward_fill = d.forward_fill;
    cfg.uniform_weights_default = d.uniform_weights;
    ctx.record_input(d.input);
    if (!d.weights.empty()) {
        ctx.record_input(d.weights);
        cfg.weights = read_weights(d.weights);
    }
    Panel panel = load_panel(d.input, cfg);
    ScaleConfig scale{d.spot_scale};
    auto countries = excess_returns(panel, scale);
    auto agg = aggregate(countries, panel.weights(), "G6");
    ctx.fact("units", "rates in percent per month (raw / " + format_double(d.rate_divisor) +
                          "), log spot changes x " + format_double(d.spot_scale));
    ctx.fact("sample", full_window(agg).label + " (" + std::to_string(agg.size()) + " observations)");
    return {std::move(panel), scale, std::move(countries), std::move(agg)};
}

struct Selected {
    const ExcessReturnSeries* series;
    std::uint64_t index;  ///< position in the panel; the aggregate comes last
};

std::vector<Selected> select(const Dataset& data, const std::vector<std::string>& filter) {
    std::vector<Selected> all;
    for (std::size_t k = 0; k < data.countries.size(); ++k) all.push_back({&data.countries[k], k});
    all.push_back({&data.aggregate, data.countries.size()});
    if (filter.empty()) return all;
    std::vector<Selected> out;
    for (const auto& code : filter) {
        const std::string c(trim(code));
        const auto it = std::find_if(all.begin(), all.end(),
                                     [&](const Selected& s) { return s.series->code() == c; });
        if (it == all.end()) throw InputError("unknown country: " + c);
        if (std::none_of(out.begin(), out.end(),
                         [&](const Selected& s) { return s.index == it->index; })) {
            out.push_back(*it);
        }
    }
    return out;
}

struct FitOptions {
    std::string se = "hac";
    std::size_t hac_lags = 0;
    std::string ci = "analytic";
    std::size_t replications = 1999;
    std::string scheme = "residual_iid";
    std::size_t block_len = 12;
    CLI::Option* hac_lags_opt = nullptr;
    std::vector<CLI::Option*> bootstrap_opts;
};

void add_fit(CLI::App* sub, FitOptions& f, const std::string& default_se, bool bootstrap_only) {
    f.se = default_se;
    sub->add_option("--se", f.se, "Standard errors: classical, white or hac")
        ->capture_default_str();
    f.hac_lags_opt = sub->add_option("--hac-lags", f.hac_lags,
                                     "Newey-West lag (default floor(4 (n/100)^(2/9)))");
    if (!bootstrap_only) {
        sub->add_option("--ci", f.ci, "Interval method: analytic or bootstrap")
            ->capture_default_str();
    }
    f.bootstrap_opts = {
        sub->add_option("--replications", f.replications, "Bootstrap replications")
            ->capture_default_str(),
        sub->add_option("--scheme", f.scheme, "Bootstrap scheme: residual_iid, pairs, moving_block")
            ->capture_default_str(),
        sub->add_option("--block-len", f.block_len, "Block length for moving_block")
            ->capture_default_str(),
    };
}

SeMethod se_method(const FitOptions& f) {
    SeMethod se = SeMethod::parse(f.se);
    if (f.hac_lags_opt != nullptr && f.hac_lags_opt->count() > 0) {
        if (se.kind != SeMethod::Kind::newey_west) throw UsageError("--hac-lags requires --se hac");
        se.lags = f.hac_lags;
    }
    return se;
}

CiMethod ci_method(const FitOptions& f) {
    if (f.ci == "analytic") return CiMethod::analytic;
    if (f.ci == "bootstrap" || f.ci == "bootstrap_percentile") return CiMethod::bootstrap_percentile;
    throw UsageError("unknown --ci value: " + f.ci);
}

BootstrapConfig bootstrap_config(const FitOptions& f, std::uint64_t seed, std::size_t threads) {
    BootstrapConfig b;
    b.replications = f.replications;
    b.scheme = parse_bootstrap_scheme(f.scheme);
    b.block_len = f.block_len;
    b.seed = seed;
    b.threads = threads;
    return b;
}

void check_bootstrap_flags(const FitOptions& f, CiMethod ci) {
    if (ci == CiMethod::bootstrap_percentile) return;
    for (const auto* opt : f.bootstrap_opts) {
        if (opt->count() > 0) throw UsageError(opt->get_name() + " requires --ci bootstrap");
    }
}

void check_levels(const std::vector<double>& levels) {
    if (levels.empty()) throw UsageError("at least one --level is required");
    for (double l : levels) {
        if (!(l > 0.0 && l < 1.0)) throw InputError("confidence level must lie in (0,1)");
    }
}

struct Estimate {
    RegressionResult fit;
    std::vector<ConfidenceBound> bounds;
    std::optional<BootstrapResult> boot;
};

/// Fit on `window` plus beta bounds at each level. A bootstrap is drawn once
/// and read at every level.
Estimate estimate(const ExcessReturnSeries& series, const SampleWindow& window,
                  const SeMethod& se, CiMethod ci, const std::vector<double>& levels,
                  std::optional<BootstrapConfig> boot) {
    Estimate e{fit_fama(series, window, se, 3), {}, std::nullopt};
    if (ci == CiMethod::analytic) {
        for (double l : levels) e.bounds.push_back(analytic_ci(e.fit, l).beta);
        return e;
    }
    const auto part = slice(series, window, 3);
    boot->level = levels.front();
    e.boot = run_bootstrap(part.rho(), part.spread(), *boot);
    for (double l : levels) {
        const auto& reps = e.boot->replicates;
        e.bounds.push_back({l, percentile(reps, (1.0 - l) / 2.0), percentile(reps, (1.0 + l) / 2.0),
                            CiTarget::beta, CiMethod::bootstrap_percentile});
    }
    return e;
}

std::string pad(std::string s, std::size_t width) {
    std::size_t w = 0;
    for (char c : s) w += (static_cast<unsigned char>(c) & 0xC0U) != 0x80U ? 1 : 0;
    if (w < width) s.append(width - w, ' ');
    return s;
}

std::string percent(double level) { return level_tag(level) + "%"; }

// ---------------------------------------------------------------------------
// Subcommands

void cmd_ingest_check(const DataOptions& d, Context& ctx) {
    const auto data = load_dataset(d, ctx);
    std::string csv = "country,first_month,last_month,months,observations,sample,weight\n";
    std::ostream& out = *ctx.out;
    out << "panel: " << data.panel.series().size() << " countries\n";
    for (std::size_t k = 0; k < data.countries.size(); ++k) {
        const auto& raw = data.panel.series()[k];
        const auto& ex = data.countries[k];
        const auto label = full_window(ex).label;
        const double w = data.panel.weights().at(raw.code());
        csv += raw.code() + "," + raw.dates().front().label() + "," + raw.dates().back().label() +
               "," + std::to_string(raw.size()) + "," + std::to_string(ex.size()) + "," + label +
               "," + format_double(w) + "\n";
        out << "  " << pad(raw.code(), 6) << pad(label, 18) << std::setw(5) << ex.size()
            << " obs  weight " << format_fixed(w, 4) << "\n";
    }
    out << "ok\n";
    ctx.emit_delimited("ingest_summary.csv", csv);
}

void cmd_fama(const DataOptions& d, const FitOptions& f, const std::vector<double>& levels,
              Context& ctx) {
    check_levels(levels);
    const auto ci = ci_method(f);
    check_bootstrap_flags(f, ci);
    const auto se = se_method(f);
    const auto data = load_dataset(d, ctx);
    const auto chosen = select(data, d.countries);

    std::vector<FamaRow> rows;
    for (const auto& s : chosen) {
        std::optional<BootstrapConfig> boot;
        if (ci == CiMethod::bootstrap_percentile) {
            boot = bootstrap_config(f, derive_seed(ctx.seed, {s.index}), ctx.threads);
        }
        auto e = estimate(*s.series, full_window(*s.series), se, ci, levels, boot);
        rows.push_back({s.series->code(), e.fit, e.bounds});
    }

    std::ostringstream text;
    text << "Fama regressions, full sample, " << to_string(ci) << " intervals\n";
    text << pad("country", 9) << pad("sample", 18) << std::setw(5) << "n" << std::setw(10)
         << "zeta" << std::setw(10) << "beta" << std::setw(10) << "se(beta)";
    for (double l : levels) text << "   " << pad(percent(l) + " interval / class", 34);
    text << "\n";
    for (const auto& r : rows) {
        const auto& fit = r.result;
        text << pad(r.country, 9) << pad(fit.window.label, 18) << std::setw(5) << fit.n
             << std::setw(10) << format_fixed(fit.zeta_hat, 3) << std::setw(10)
             << format_fixed(fit.beta_hat, 3) << std::setw(10) << format_fixed(fit.se_beta, 3);
        for (const auto& b : r.beta_bounds) {
            text << "   "
                 << pad("[" + format_fixed(b.lower, 3) + ", " + format_fixed(b.upper, 3) + "] " +
                            to_string(classify_puzzle(b)),
                        34);
        }
        text << "\n";
    }
    text << "standard errors: " << se.label() << "\n";
    *ctx.out << text.str();

    ctx.emit_delimited("fama.csv", fama_csv(rows));
    ctx.emit("fama.json", fama_json(rows, ctx.metadata()));
    ctx.emit_text("fama.txt", text.str());
}

struct RecurseOptions {
    std::vector<std::string> modes{"all"};
    std::size_t shed = 60;
    double level = 0.90;
    std::size_t min_window = kDefaultMinWindow;
    std::string rolling_direction = "toward_earlier";
};

std::vector<RecursionMode> parse_modes(const std::vector<std::string>& names) {
    std::vector<RecursionMode> modes;
    for (const auto& n : names) {
        if (n == "all") {
            return {RecursionMode::forward, RecursionMode::backward, RecursionMode::rolling};
        }
        const auto m = parse_recursion_mode(n);
        if (std::find(modes.begin(), modes.end(), m) == modes.end()) modes.push_back(m);
    }
    return modes;
}

RollingDirection parse_direction(const std::string& s) {
    if (s == "toward_earlier") return RollingDirection::toward_earlier;
    if (s == "toward_later") return RollingDirection::toward_later;
    throw UsageError("unknown --rolling-direction: " + s);
}

void cmd_recurse(const DataOptions& d, const FitOptions& f, const RecurseOptions& r,
                 Context& ctx) {
    check_levels({r.level});
    const auto ci = ci_method(f);
    check_bootstrap_flags(f, ci);
    const auto modes = parse_modes(r.modes);
    RecursionSpec base;
    base.shed_max = r.shed;
    base.ci = ci;
    base.level = r.level;
    base.se_method = se_method(f);
    base.min_window = r.min_window;
    base.rolling_direction = parse_direction(r.rolling_direction);
    base.threads = ctx.threads;
    base.bootstrap = bootstrap_config(f, ctx.seed, ctx.threads);
    const auto data = load_dataset(d, ctx);
    const auto chosen = select(data, d.countries);

    std::string crossings = "country,mode,windows,gaps,crossings,non_robust\n";
    std::ostringstream text;
    text << "Zero crossings of the " << percent(r.level) << " lower bound of beta, shedding up to "
         << r.shed << " observations\n";
    text << pad("country", 9) << pad("mode", 10) << std::setw(10) << "crossings" << std::setw(6)
         << "gaps" << "  flag\n";
    for (const auto& s : chosen) {
        for (const auto mode : modes) {
            RecursionSpec spec = base;
            spec.mode = mode;
            spec.bootstrap.seed = derive_seed(ctx.seed, {s.index});
            const auto trace = run_recursion(*s.series, spec);
            const auto summary = zero_crossings(trace);
            const std::vector<RecursionTrace> one{trace};
            ctx.emit_delimited("trajectory_" + s.series->code() + "_" + to_string(mode) + ".csv",
                               trajectory_csv(one));
            crossings += s.series->code() + "," + to_string(mode) + "," +
                         std::to_string(trace.entries.size()) + "," +
                         std::to_string(summary.gaps) + "," + std::to_string(summary.crossings) +
                         "," + (summary.non_robust() ? "non-robust" : "robust") + "\n";
            text << pad(s.series->code(), 9) << pad(to_string(mode), 10) << std::setw(10)
                 << summary.crossings << std::setw(6) << summary.gaps << "  "
                 << (summary.non_robust() ? "non-robust" : "robust") << "\n";
        }
    }
    *ctx.out << text.str();
    ctx.emit_delimited("crossings.csv", crossings);
    ctx.emit_text("crossings.txt", text.str());
}

void cmd_tables(const DataOptions& d, const FitOptions& f, const std::vector<double>& levels,
                std::size_t shed, std::size_t min_window, Context& ctx) {
    check_levels(levels);
    const auto ci = ci_method(f);
    check_bootstrap_flags(f, ci);
    const auto se = se_method(f);
    const auto data = load_dataset(d, ctx);

    const auto t2 = variance_table(data.countries, data.panel.weights(), "G6");
    const auto t2_text = render_variance_table(t2) +
                         "G6 is the weighted-average series; its variances are not averages of "
                         "country variances\n";
    ctx.emit_text("table2.txt", t2_text);
    ctx.emit_delimited("table2.csv", variance_table_csv(t2));

    const std::size_t n = data.aggregate.size();
    if (shed == 0 || shed >= n || n - shed < min_window) {
        throw InputError("insufficient sample: " + std::to_string(n) + " observations cannot shed " +
                         std::to_string(shed) + " and keep " + std::to_string(min_window));
    }
    struct Sample {
        std::size_t start, end;
    };
    const Sample samples[] = {{0, n - shed}, {shed, n}};

    const auto all = select(data, {});
    // evidence[level][sample]
    std::vector<std::vector<EvidenceSummary>> evidence(levels.size());
    for (std::size_t si = 0; si < 2; ++si) {
        std::vector<std::vector<CountryBound>> bounds(levels.size());
        std::vector<std::optional<CountryBound>> agg(levels.size());
        std::string label;
        for (const auto& s : all) {
            const auto w = make_window(*s.series, samples[si].start, samples[si].end, min_window);
            label = w.label;
            std::optional<BootstrapConfig> boot;
            if (ci == CiMethod::bootstrap_percentile) {
                boot = bootstrap_config(f, derive_seed(ctx.seed, {s.index, si}), ctx.threads);
            }
            const auto e = estimate(*s.series, w, se, ci, levels, boot);
            for (std::size_t li = 0; li < levels.size(); ++li) {
                CountryBound cb{s.series->code(), e.bounds[li]};
                if (s.series == &data.aggregate) {
                    agg[li] = cb;
                } else {
                    bounds[li].push_back(cb);
                }
            }
        }
        for (std::size_t li = 0; li < levels.size(); ++li) {
            evidence[li].push_back(
                evidence_summary(bounds[li], data.panel.weights(), label, agg[li]));
        }
    }

    std::string t4_text;
    std::vector<EvidenceSummary> flat;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        if (li > 0) t4_text += "\n";
        t4_text += render_evidence_table(evidence[li]);
        flat.insert(flat.end(), evidence[li].begin(), evidence[li].end());
    }
    t4_text += "intervals: " + to_string(ci) + ", standard errors: " + se.label() + "\n";
    ctx.emit_text("table4.txt", t4_text);
    ctx.emit_delimited("table4.csv", evidence_table_csv(flat));
    ctx.emit_delimited("table4_summary.csv", evidence_summary_csv(flat));
    *ctx.out << t2_text << "\n" << t4_text;
}

void cmd_bootstrap(const DataOptions& d, const FitOptions& f, const std::vector<double>& levels,
                   bool dump, Context& ctx) {
    check_levels(levels);
    const auto data = load_dataset(d, ctx);
    const auto chosen = select(data, d.countries);
    const auto se = se_method(f);
    std::string csv =
        "country,window_label,n,beta_hat,scheme,replications,block_len,degenerate_redraws,level,"
        "lower,upper,class\n";
    std::ostringstream text;
    text << "Bootstrap percentile intervals for beta (" << f.scheme << ", " << f.replications
         << " replications)\n";
    for (const auto& s : chosen) {
        const auto boot = bootstrap_config(f, derive_seed(ctx.seed, {s.index}), ctx.threads);
        const auto e = estimate(*s.series, full_window(*s.series), se,
                                CiMethod::bootstrap_percentile, levels, boot);
        const auto& b = *e.boot;
        text << pad(s.series->code(), 9) << "beta " << format_fixed(b.beta_hat, 3);
        for (const auto& bound : e.bounds) {
            csv += s.series->code() + "," + e.fit.window.label + "," + std::to_string(e.fit.n) +
                   "," + format_double(b.beta_hat) + "," + to_string(boot.scheme) + "," +
                   std::to_string(boot.replications) + "," + std::to_string(boot.block_len) + "," +
                   std::to_string(b.degenerate_redraws) + "," + format_double(bound.level) + "," +
                   format_double(bound.lower) + "," + format_double(bound.upper) + "," +
                   to_string(classify_puzzle(bound)) + "\n";
            text << "   " << percent(bound.level) << " [" << format_fixed(bound.lower, 3) << ", "
                 << format_fixed(bound.upper, 3) << "]";
        }
        text << "\n";
        if (dump) {
            ctx.emit_delimited("replicates_" + s.series->code() + ".csv",
                               replicates_csv(b.replicates));
        }
    }
    *ctx.out << text.str();
    ctx.emit_delimited("bootstrap.csv", csv);
}

struct GeneratorOptions {
    std::string kind = "known_beta";
    std::size_t n = 364;
    double zeta = 0.0;
    double beta = 0.0;
    double noise_sd = std::numeric_limits<double>::quiet_NaN();
    double drift = 0.0;
    double ar = 0.97;
    double spread_var = 0.05;
    double spread_mean = 0.0;
    double factor = 0.0;
    double kick_sd_min = 0.5;
    double kick_sd_max = 6.0;
    double redraw_prob = 0.02;
    std::size_t tail_dof = 0;
};

void add_generator(CLI::App* sub, GeneratorOptions& g) {
    sub->add_option("--kind", g.kind, "uip_null, known_beta, random_walk or formative_kicks")
        ->capture_default_str();
    sub->add_option("--n", g.n, "Excess-return observations")->capture_default_str();
    sub->add_option("--zeta", g.zeta, "Intercept (known_beta)")->capture_default_str();
    sub->add_option("--beta", g.beta, "Slope (known_beta)")->capture_default_str();
    sub->add_option("--noise-sd", g.noise_sd,
                    "Shock sd (default 3 for uip_null and random_walk, 1 for known_beta)");
    sub->add_option("--drift", g.drift, "Drift (random_walk)")->capture_default_str();
    sub->add_option("--ar", g.ar, "Spread AR(1) coefficient")->capture_default_str();
    sub->add_option("--spread-var", g.spread_var, "Unconditional spread variance")
        ->capture_default_str();
    sub->add_option("--spread-mean", g.spread_mean, "Spread mean")->capture_default_str();
    sub->add_option("--factor", g.factor,
                    "Target Var(rho)/Var(spread) for known_beta; overrides --spread-var");
    sub->add_option("--kick-sd-min", g.kick_sd_min, "formative_kicks scale lower end")
        ->capture_default_str();
    sub->add_option("--kick-sd-max", g.kick_sd_max, "formative_kicks scale upper end")
        ->capture_default_str();
    sub->add_option("--redraw-prob", g.redraw_prob, "formative_kicks law redraw probability")
        ->capture_default_str();
    sub->add_option("--tail-dof", g.tail_dof, "formative_kicks t degrees of freedom (0 = Gaussian)")
        ->capture_default_str();
}

synthetic::GeneratorSpec generator_spec(const GeneratorOptions& g, std::uint64_t seed) {
    using namespace synthetic;
    GeneratorSpec spec;
    spec.n = g.n;
    spec.seed = seed;
    spec.spread = {g.ar, g.spread_var, g.spread_mean};
    const bool sd_given = !std::isnan(g.noise_sd);
    if (g.kind == "uip_null") {
        spec.kind = UipNull{sd_given ? g.noise_sd : 3.0};
    } else if (g.kind == "known_beta") {
        const double sd = sd_given ? g.noise_sd : 1.0;
        spec.kind = KnownBeta{g.zeta, g.beta, sd};
        if (g.factor > 0.0) spec.spread.variance = spread_variance_for_factor(g.beta, sd, g.factor);
    } else if (g.kind == "random_walk") {
        spec.kind = RandomWalk{g.drift, sd_given ? g.noise_sd : 3.0};
    } else if (g.kind == "formative_kicks") {
        spec.kind = FormativeKicks{g.kick_sd_min, g.kick_sd_max, g.redraw_prob, g.tail_dof};
    } else {
        throw UsageError("unknown generator kind: " + g.kind);
    }
    if (g.factor > 0.0 && g.kind != "known_beta") throw UsageError("--factor needs --kind known_beta");
    synthetic::validate(spec);
    return spec;
}

void cmd_simulate(const GeneratorOptions& g, std::vector<std::string> codes,
                  const std::string& start, Context& ctx) {
    if (codes.empty()) codes = {"SYN"};
    const auto first_spot = YearMonth::parse(start);
    std::vector<synthetic::GeneratorSpec> specs;
    Weights weights;
    double assigned = 0.0;
    for (std::size_t k = 0; k < codes.size(); ++k) {
        auto spec = generator_spec(g, derive_seed(ctx.seed, {k}));
        spec.code = std::string(trim(codes[k]));
        spec.first_date = first_spot.plus_months(1);
        specs.push_back(spec);
        const double w = k + 1 == codes.size() ? 1.0 - assigned : 1.0 / static_cast<double>(codes.size());
        weights[spec.code] = w;
        assigned += w;
    }
    const auto panel = synthetic::make_panel(specs, weights);
    const auto truth = synthetic::ground_truth(specs.front());
    ctx.fact("units", "rates written annualized (x 12), spot as levels, log spot changes x 100");
    ctx.fact("sample", sample_label(panel.series().front(), 0, panel.series().front().size()) +
                           " (" + std::to_string(g.n) + " observations)");

    Metadata meta = ctx.metadata();
    meta.add("generator", synthetic::kind_name(specs.front().kind));
    if (truth.beta) meta.add("true_beta", format_double(*truth.beta));
    if (truth.zeta) meta.add("true_zeta", format_double(*truth.zeta));
    meta.add("country_seed", "derive_seed(seed, {index})");
    std::vector<std::string> lines;
    for (const auto& [k, v] : meta.entries()) lines.push_back(k + ": " + v);
    ctx.emit("panel.csv", format_panel(panel, IngestConfig{}, lines));

    std::string wtext = meta.comment_block();
    for (const auto& [code, w] : weights) wtext += code + " = " + format_double(w) + "\n";
    ctx.emit("weights.txt", wtext);
    *ctx.out << "simulated " << codes.size() << " series of " << g.n << " observations ("
             << synthetic::kind_name(specs.front().kind) << ")\n";
}

void cmd_coverage(const GeneratorOptions& g, const FitOptions& f, double level,
                  std::size_t trials, Context& ctx) {
    check_levels({level});
    const auto ci = ci_method(f);
    check_bootstrap_flags(f, ci);
    synthetic::CoverageConfig cfg;
    cfg.trials = trials;
    cfg.level = level;
    cfg.ci = ci;
    cfg.se_method = se_method(f);
    cfg.bootstrap = bootstrap_config(f, derive_seed(ctx.seed, {1}), 1);
    cfg.threads = ctx.threads;
    const auto spec = generator_spec(g, derive_seed(ctx.seed, {0}));
    const auto res = synthetic::coverage_experiment(spec, cfg);
    ctx.fact("units", "synthetic excess returns and spreads in percent per month");
    ctx.fact("generator", synthetic::kind_name(spec.kind));

    std::string csv = "kind,n,trials,level,ci,se,true_beta,covered,rate\n";
    csv += synthetic::kind_name(spec.kind) + "," + std::to_string(spec.n) + "," +
           std::to_string(res.trials) + "," + format_double(level) + "," + to_string(ci) + "," +
           cfg.se_method.label(spec.n) + "," + format_double(res.true_beta) + "," +
           std::to_string(res.covered) + "," + format_double(res.rate()) + "\n";
    ctx.emit_delimited("coverage.csv", csv);
    *ctx.out << "coverage of the " << percent(level) << " " << to_string(ci)
             << " interval: " << res.covered << "/" << res.trials << " = "
             << format_fixed(res.rate(), 4) << "\n";
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             std::optional<json>* replay_expect);

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::size_t threads,
               std::ostream& out, std::ostream& err) {
    json doc;
    try {
        doc = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw InputError("malformed manifest: " + std::string(e.what()));
    }
    if (doc.value("tool", "") != "famarec") throw InputError("not a famarec manifest");
    if (doc.value("version", "") != std::string(kVersion)) {
        err << "warning: manifest written by famarec " << doc.value("version", "?")
            << ", replaying with " << kVersion << "\n";
    }
    for (const auto& in : doc.at("inputs")) {
        const auto path = in.at("path").get<std::string>();
        if (fnv1a_hex(read_file(path)) != in.at("fnv1a64").get<std::string>()) {
            throw InputError("input checksum mismatch: " + path);
        }
    }
    std::vector<std::string> args{"famarec", doc.at("command").get<std::string>()};
    for (const auto& a : doc.at("args")) args.push_back(a.get<std::string>());
    args.insert(args.end(), {"--out", out_dir, "--threads", std::to_string(threads)});
    std::optional<json> expect = doc.at("outputs");
    const int code = dispatch(args, out, err, &expect);
    if (code == kOk) out << "replay: " << doc.at("outputs").size() << " outputs reproduced\n";
    return code;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             std::optional<json>* replay_expect) {
    CLI::App app{"Fama regression robustness toolkit", "famarec"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonOptions common;
    DataOptions data;
    FitOptions fit_fama, fit_rec, fit_tab, fit_boot, fit_cov;
    std::vector<double> levels{0.90, 0.95};
    RecurseOptions rec;
    GeneratorOptions gen;
    std::vector<std::string> sim_codes;
    std::string sim_start = "1979:6";
    std::size_t trials = 2000;
    double single_level = 0.90;
    bool dump = false;
    std::size_t shed = 60;
    std::size_t min_window = kDefaultMinWindow;
    std::string manifest;

    auto* ingest = app.add_subcommand("ingest-check", "Load and validate a panel");
    add_data(ingest, data, false);
    add_common(ingest, common);

    auto* fama = app.add_subcommand("fama", "Full-sample Fama regressions per country and G6");
    add_data(fama, data, true);
    add_fit(fama, fit_fama, "hac", false);
    fama->add_option("--level", levels, "Confidence levels")->capture_default_str();
    add_common(fama, common);

    auto* recurse = app.add_subcommand("recurse", "Recursive re-estimation and zero crossings");
    add_data(recurse, data, true);
    add_fit(recurse, fit_rec, "hac", false);
    recurse->add_option("--mode", rec.modes, "forward, backward, rolling or all")
        ->delimiter(',')
        ->capture_default_str();
    recurse->add_option("--shed", rec.shed, "Maximum observations shed")->capture_default_str();
    recurse->add_option("--level", rec.level, "Confidence level")->capture_default_str();
    recurse->add_option("--min-window", rec.min_window, "Smallest window fitted")
        ->capture_default_str();
    recurse->add_option("--rolling-direction", rec.rolling_direction,
                        "toward_earlier or toward_later")
        ->capture_default_str();
    add_common(recurse, common);

    auto* tables = app.add_subcommand("tables", "Variance table and evidence table");
    add_data(tables, data, false);
    add_fit(tables, fit_tab, "hac", false);
    tables->add_option("--level", levels, "Confidence levels")->capture_default_str();
    tables->add_option("--shed", shed, "Observations shed for the two sub-samples")
        ->capture_default_str();
    tables->add_option("--min-window", min_window, "Smallest window fitted")->capture_default_str();
    add_common(tables, common);

    auto* boot = app.add_subcommand("bootstrap", "Bootstrap percentile intervals for beta");
    add_data(boot, data, true);
    add_fit(boot, fit_boot, "classical", true);
    boot->add_option("--level", levels, "Confidence levels")->capture_default_str();
    boot->add_flag("--dump-replicates", dump, "Write the sorted replicates per country");
    add_common(boot, common);

    auto* sim = app.add_subcommand("simulate", "Write a synthetic panel and weight file");
    add_generator(sim, gen);
    sim->add_option("--countries", sim_codes, "Country codes to generate")->delimiter(',');
    sim->add_option("--start", sim_start, "First spot month")->capture_default_str();
    add_common(sim, common);

    auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage of beta intervals");
    add_generator(cov, gen);
    add_fit(cov, fit_cov, "classical", false);
    cov->add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();
    cov->add_option("--level", single_level, "Confidence level")->capture_default_str();
    add_common(cov, common);

    auto* replay = app.add_subcommand("replay", "Re-run a manifest.json and verify its outputs");
    replay->add_option("--manifest", manifest, "Manifest file")->required();
    replay->add_option("--out", common.out, "Output directory")->capture_default_str();
    replay->add_option("--threads", common.threads, "Worker threads")->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub == replay) return cmd_replay(manifest, common.out, common.threads, out, err);

    Context ctx;
    ctx.command = sub->get_name();
    ctx.args = canonical_args(*sub);
    ctx.seed = common.seed;
    ctx.threads = common.threads;
    ctx.out_dir = common.out;
    ctx.out = &out;

    if (sub == ingest) cmd_ingest_check(data, ctx);
    if (sub == fama) cmd_fama(data, fit_fama, levels, ctx);
    if (sub == recurse) cmd_recurse(data, fit_rec, rec, ctx);
    if (sub == tables) cmd_tables(data, fit_tab, levels, shed, min_window, ctx);
    if (sub == boot) cmd_bootstrap(data, fit_boot, levels, dump, ctx);
    if (sub == sim) cmd_simulate(gen, sim_codes, sim_start, ctx);
    if (sub == cov) cmd_coverage(gen, fit_cov, single_level, trials, ctx);

    write_outputs(ctx);

    if (replay_expect != nullptr && replay_expect->has_value()) {
        const json produced = json::parse(manifest_json(ctx)).at("outputs");
        if (produced != **replay_expect) {
            throw MismatchError("replayed outputs differ from the manifest");
        }
    }
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err, nullptr);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const MismatchError& e) {
        err << "replay mismatch: " << e.what() << "\n";
        return kReplayMismatch;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternalError;
    }
}

}  // namespace famarec::cli
