#pragma once

// Subcommand implementations for the allmatch command-line tool. Each command
// turns an ExperimentConfig into a self-describing ResultRecord.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include <allmatch/allmatch.hpp>

namespace allmatch::cli {

enum class OutputFormat { text, csv, json };

struct ExperimentConfig {
    std::string command;
    std::string moment; ///< formula name for `moments`
    std::optional<std::string> input_path;
    std::optional<std::string> random_spec;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    Method method = Method::amm;
    std::optional<std::size_t> n;
    std::optional<std::size_t> m;
    std::string eps = "1/50";
    std::size_t range_lo = 1;
    std::size_t range_hi = 10;
    std::string suite = "small";
    unsigned threads = 1;
    OutputFormat format = OutputFormat::text;
    std::optional<std::string> out_path;
};

/// Usage problems detected by a command (as opposed to library errors).
class usage_error : public error {
public:
    using error::error;
};

struct Value {
    std::string name;
    std::string exact;
    std::string decimal;
};

struct ResultRecord {
    std::string command;
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<Value> values;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> notes;
    std::optional<std::uint64_t> seed;
    double elapsed_ms = 0.0;
    bool ok = true;

    void param(std::string k, std::string v) { params.emplace_back(std::move(k), std::move(v)); }
    void value(std::string k, const BigRatio& r) { values.push_back({std::move(k), to_exact_string(r), to_decimal(r)}); }
    void value(std::string k, const BigCount& c) { value(std::move(k), BigRatio(c)); }
    void text(std::string k, std::string v) { values.push_back({std::move(k), std::move(v), {}}); }

    const Value* find(std::string_view k) const {
        for (const auto& v : values)
            if (v.name == k) return &v;
        return nullptr;
    }
};

// ---------------------------------------------------------------------------
// rendering

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += csv_field(fields[i]);
    }
    return line + "\r\n";
}

inline std::string render_json(const ResultRecord& r) {
    nlohmann::ordered_json j;
    j["command"] = r.command;
    j["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.params) j["params"][k] = v;
    if (r.seed) j["seed"] = *r.seed;
    j["values"] = nlohmann::ordered_json::object();
    for (const auto& v : r.values) {
        nlohmann::ordered_json e;
        e["exact"] = v.exact;
        if (!v.decimal.empty()) e["decimal"] = v.decimal;
        j["values"][v.name] = e;
    }
    if (!r.columns.empty()) {
        j["table"]["columns"] = r.columns;
        j["table"]["rows"] = r.rows;
    }
    if (!r.notes.empty()) j["notes"] = r.notes;
    j["elapsed_ms"] = r.elapsed_ms;
    j["ok"] = r.ok;
    return j.dump(2) + "\n";
}

/// Tabular commands emit their table; scalar records emit kind,name,exact,decimal rows.
inline std::string render_csv(const ResultRecord& r) {
    std::string out;
    if (!r.columns.empty()) {
        out += csv_row(r.columns);
        for (const auto& row : r.rows) out += csv_row(row);
        return out;
    }
    out += csv_row({"kind", "name", "exact", "decimal"});
    out += csv_row({"command", "command", r.command, ""});
    for (const auto& [k, v] : r.params) out += csv_row({"param", k, v, ""});
    if (r.seed) out += csv_row({"param", "seed", std::to_string(*r.seed), ""});
    for (const auto& v : r.values) out += csv_row({"value", v.name, v.exact, v.decimal});
    out += csv_row({"meta", "ok", r.ok ? "true" : "false", ""});
    return out;
}

inline std::string render_text(const ResultRecord& r) {
    std::ostringstream os;
    os << "command: " << r.command << '\n';
    for (const auto& [k, v] : r.params) os << "  " << k << " = " << v << '\n';
    if (r.seed) os << "  seed = " << *r.seed << '\n';
    for (const auto& v : r.values) {
        os << v.name << ": " << v.exact;
        if (!v.decimal.empty() && v.decimal != v.exact) os << "  (~" << v.decimal << ")";
        os << '\n';
    }
    if (!r.columns.empty()) {
        for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "\t" : "") << r.columns[i];
        os << '\n';
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "\t" : "") << row[i];
            os << '\n';
        }
    }
    for (const auto& n : r.notes) os << "note: " << n << '\n';
    os << "elapsed_ms: " << r.elapsed_ms << '\n' << "status: " << (r.ok ? "ok" : "FAILED") << '\n';
    return os.str();
}

inline std::string render(const ResultRecord& r, OutputFormat f) {
    switch (f) {
    case OutputFormat::json:
        return render_json(r);
    case OutputFormat::csv:
        return render_csv(r);
    case OutputFormat::text:
        break;
    }
    return render_text(r);
}

// ---------------------------------------------------------------------------
// commands

namespace detail {

/// Echoed matrices are kept for inputs up to this size.
inline constexpr std::size_t echo_matrix_limit = 8;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
};

inline std::string profile_string(const MatchingProfile& p) {
    std::string s = "[";
    for (std::size_t k = 0; k < p.counts.size(); ++k) s += (k ? "," : "") + p.counts[k].str();
    return s + "]";
}

/// Loads the single matrix input and echoes its origin into the record.
inline ZeroOneMatrix load_input(const ExperimentConfig& cfg, ResultRecord& rec) {
    if (cfg.input_path.has_value() == cfg.random_spec.has_value())
        throw usage_error("exactly one of --input FILE or --random SPEC is required");
    ZeroOneMatrix a;
    if (cfg.input_path) {
        std::ifstream in(*cfg.input_path);
        if (!in) throw usage_error("cannot open input file '" + *cfg.input_path + "'");
        a = read_matrix(in);
        rec.param("input", *cfg.input_path);
    } else {
        const EnsembleSpec spec = parse_ensemble(*cfg.random_spec);
        // trial streams use ids below 2^63, so the input draw never overlaps them
        RandomStream rng(cfg.seed, std::uint64_t{1} << 63);
        a = sample_matrix(spec, rng);
        rec.param("random", to_string(spec));
        rec.seed = cfg.seed;
    }
    rec.param("rows", std::to_string(a.rows()));
    rec.param("cols", std::to_string(a.cols()));
    if (a.rows() <= echo_matrix_limit && a.cols() <= echo_matrix_limit) rec.param("matrix", to_inline(a));
    return a;
}

inline std::size_t require(const std::optional<std::size_t>& v, const char* flag) {
    if (!v) throw usage_error(std::string("missing required flag ") + flag);
    return *v;
}

} // namespace detail

inline ResultRecord cmd_exact(const ExperimentConfig& cfg) {
    detail::Timer timer;
    ResultRecord rec;
    rec.command = "exact";
    const ZeroOneMatrix a = detail::load_input(cfg, rec);

    const MatchingProfile prof = matching_profile(a);
    const BigCount am = prof.total();
    rec.value("am", am);
    rec.text("profile", detail::profile_string(prof));
    if (a.square() && a.rows() <= max_ryser_size) rec.value("permanent", permanent_ryser(a));
    if (a.square() && a.rows() <= max_transformed_size) {
        const BigCount via = am_via_permanent(a);
        rec.value("am_via_transformed_permanent", via);
        rec.text("cross_check", via == am ? "match" : "mismatch");
        rec.ok = via == am;
    } else {
        rec.text("cross_check", a.square() ? "skipped (n > 10)" : "skipped (rectangular)");
    }
    rec.elapsed_ms = timer.ms();
    return rec;
}

inline ResultRecord cmd_estimate(const ExperimentConfig& cfg) {
    detail::Timer timer;
    ResultRecord rec;
    rec.command = "estimate";
    const ZeroOneMatrix a = detail::load_input(cfg, rec);
    if (cfg.method == Method::rm && !a.square()) throw usage_error("RM needs a square matrix");
    if (cfg.trials < 1) throw usage_error("--trials must be at least 1");
    rec.param("method", to_string(cfg.method));
    rec.param("trials", std::to_string(cfg.trials));
    rec.seed = cfg.seed;

    const TrialStats stats = run_trials(a, cfg.method, cfg.trials, cfg.seed, std::max(1U, cfg.threads));
    rec.value("mean", stats.mean());
    rec.value("second_moment", stats.second_moment());
    if (auto r = stats.empirical_critical_ratio())
        rec.value("empirical_critical_ratio", *r);
    else
        rec.text("empirical_critical_ratio", "undefined (all samples 0)");

    if (a.cols() <= max_recursion_cols) {
        const BigCount exact_mean = cfg.method == Method::amm ? exact_am(a) : permanent_by_expansion(a);
        const BigCount exact_m2 = cfg.method == Method::amm ? exact_second_moment_amm(a) : exact_second_moment_rm(a);
        rec.value(cfg.method == Method::amm ? "exact_am" : "exact_permanent", exact_mean);
        rec.value("exact_second_moment", exact_m2);
        if (exact_mean != 0) {
            const BigRatio em(exact_mean);
            rec.value("exact_critical_ratio", make_ratio(exact_m2, exact_mean * exact_mean));
            BigRatio rel = (stats.mean() - em) / em;
            if (rel < 0) rel = -rel;
            rec.value("relative_error", rel);

            // 3-sigma band of the sample mean from the exact variance
            const BigRatio var = BigRatio(exact_m2) - em * em;
            const double half = 3.0 * std::sqrt(static_cast<double>(var) / static_cast<double>(cfg.trials));
            const double centre = static_cast<double>(em);
            rec.text("band_3sigma", to_decimal(BigRatio(centre - half)) + " .. " + to_decimal(BigRatio(centre + half)));
            const double got = static_cast<double>(stats.mean());
            rec.text("mean_in_band", std::abs(got - centre) <= half ? "yes" : "no");
        } else {
            rec.text("exact_critical_ratio", "undefined (per(A) = 0)");
        }
    } else {
        rec.notes.push_back("exact moments skipped: more than " + std::to_string(max_recursion_cols) + " columns");
    }
    rec.elapsed_ms = timer.ms();
    return rec;
}

inline ResultRecord cmd_moments(const ExperimentConfig& cfg) {
    detail::Timer timer;
    ResultRecord rec;
    rec.command = "moments";
    rec.param("formula", cfg.moment);
    const std::string& f = cfg.moment;
    if (f == "thm3" || f == "thm4") {
        const auto m = detail::require(cfg.m, "--m"), n = detail::require(cfg.n, "--n");
        rec.param("m", std::to_string(m));
        rec.param("n", std::to_string(n));
        rec.value(f == "thm3" ? "mean_am" : "mean_amm_second_moment", f == "thm3" ? thm3_mean(m, n) : thm4_second_moment(m, n));
    } else if (f == "thm5") {
        const auto n = detail::require(cfg.n, "--n");
        rec.param("n", std::to_string(n));
        const auto b = thm5_bounds(n);
        const auto mean = thm3_mean(n, n);
        rec.text("kstar", std::to_string(b.kstar));
        rec.value("h", b.h);
        rec.value("mean", mean);
        rec.value("n_h", b.upper);
        rec.value("n_plus_1_h", b.loose_upper);
        rec.text("lower_holds", b.h <= mean ? "yes" : "no");
        rec.text("n_h_upper_holds", mean <= b.upper ? "yes" : "no");
        rec.text("n_plus_1_h_upper_holds", mean <= b.loose_upper ? "yes" : "no");
    } else if (f == "thm6") {
        const auto n = detail::require(cfg.n, "--n");
        rec.param("n", std::to_string(n));
        const BigRatio ratio = thm6_ratio(n);
        rec.value("ratio", ratio);
        rec.text("threshold", to_decimal(BigRatio(thm6_threshold_value(n))));
        rec.text("ratio_ge_threshold", thm6_meets_threshold(ratio, n) ? "yes" : "no");
        rec.value("lower_diag", thm6_lower_diag(n));
    } else if (f == "thm7") {
        const auto n = detail::require(cfg.n, "--n");
        const BigRatio eps = parse_ratio(cfg.eps);
        rec.param("n", std::to_string(n));
        rec.param("eps", to_exact_string(eps));
        rec.value("tail", thm7_tail(n, eps));
    } else if (f == "thm8-mean" || f == "thm8-m2") {
        const auto n = detail::require(cfg.n, "--n"), m = detail::require(cfg.m, "--m");
        rec.param("n", std::to_string(n));
        rec.param("m", std::to_string(m));
        if (f == "thm8-mean")
            rec.value("mean_am", thm8_mean(n, m));
        else
            rec.value("mean_am_squared", thm8_second_moment(n, m));
    } else {
        throw usage_error("unknown formula '" + f + "' (thm3|thm4|thm5|thm6|thm7|thm8-mean|thm8-m2)");
    }
    rec.elapsed_ms = timer.ms();
    return rec;
}

inline ResultRecord cmd_verify(const ExperimentConfig& cfg) {
    detail::Timer timer;
    ResultRecord rec;
    rec.command = "verify";
    if (cfg.suite != "small" && cfg.suite != "full") throw usage_error("--suite must be small or full");
    rec.param("suite", cfg.suite);
    const auto report = verify_suite(cfg.suite == "full" ? Suite::full : Suite::small);
    rec.columns = {"check", "status", "cases", "ms", "detail"};
    for (const auto& c : report.checks) {
        std::ostringstream ms;
        ms << c.millis;
        rec.rows.push_back({c.name, c.passed ? "pass" : "FAIL", std::to_string(c.cases), ms.str(), c.detail});
    }
    rec.ok = report.passed();
    rec.elapsed_ms = timer.ms();
    return rec;
}

/// One CSV row per n: exact moments, the ratio, and its comparison against
/// n^(sqrt(n)/2) (recorded, not asserted).
inline std::vector<std::string> ratio_scan_row(std::size_t n, const BigRatio& eps) {
    const BigRatio mean = thm3_mean(n, n);
    const BigRatio m2 = thm4_second_moment(n, n);
    const BigRatio ratio = m2 / (mean * mean);
    return {std::to_string(n),
            to_exact_string(mean),
            to_exact_string(m2),
            to_exact_string(ratio),
            to_decimal(ratio),
            to_decimal(BigRatio(thm6_threshold_value(n))),
            thm6_meets_threshold(ratio, n) ? "true" : "false",
            to_decimal(thm6_lower_diag(n)),
            to_exact_string(thm7_tail(n, eps))};
}

inline ResultRecord cmd_ratio_scan(const ExperimentConfig& cfg) {
    detail::Timer timer;
    ResultRecord rec;
    rec.command = "ratio-scan";
    if (cfg.range_lo < 1 || cfg.range_hi < cfg.range_lo) throw usage_error("--n-range needs 1 <= LO <= HI");
    const BigRatio eps = parse_ratio(cfg.eps);
    rec.param("n_range", std::to_string(cfg.range_lo) + ":" + std::to_string(cfg.range_hi));
    rec.param("eps", to_exact_string(eps));
    rec.columns = {"n", "mean", "second_moment", "ratio", "ratio_decimal", "threshold", "ratio_ge_threshold", "lower_diag", "tail"};

    const std::size_t count = cfg.range_hi - cfg.range_lo + 1;
    std::vector<std::vector<std::string>> rows(count);
    const unsigned workers = std::max(1U, std::min<unsigned>(cfg.threads, static_cast<unsigned>(count)));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < count; i += workers) rows[i] = ratio_scan_row(cfg.range_lo + i, eps);
            });
    }
    rec.rows = std::move(rows);
    rec.elapsed_ms = timer.ms();
    return rec;
}

inline ResultRecord dispatch(const ExperimentConfig& cfg) {
    if (cfg.command == "exact") return cmd_exact(cfg);
    if (cfg.command == "estimate") return cmd_estimate(cfg);
    if (cfg.command == "moments") return cmd_moments(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "ratio-scan") return cmd_ratio_scan(cfg);
    throw usage_error("unknown command '" + cfg.command + "'");
}

} // namespace allmatch::cli
