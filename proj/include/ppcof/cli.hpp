#pragma once

// Command-line front end. Kept header-only so tests can drive run() in-process.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppcof/sim_harness.hpp"

namespace ppcof::cli {

enum ExitCode : int { ok = 0, config_error = 2, runtime_error = 3 };

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Floats always go out with 12 significant digits.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string format_cell(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    return std::get<std::string>(c);
}

inline void write_csv(const Table& t, std::ostream& os) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (const auto* d = std::get_if<double>(&c)) {
        // Round-trip through the 12-digit text so JSON and CSV carry the same value.
        if (!std::isfinite(*d)) return nullptr;
        return std::strtod(format_double(*d).c_str(), nullptr);
    }
    return std::get<std::string>(c);
}

inline void write_json(const Table& t, std::ostream& os) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = to_json(row[i]);
        arr.push_back(std::move(obj));
    }
    os << arr.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Tables per subcommand

inline Table rate_cdf_table(const RateCdfResult& r) {
    Table t{{"snr_db", "percentile", "rate_plain", "rate_pp"}, {}};
    for (const auto& row : r.rows) t.rows.push_back({row.snr_db, row.percentile, row.rate_plain, row.rate_pp});
    return t;
}

inline Table error_rate_table(const ErrorRateResult& r) {
    Table t{{"snr_db", "equation_error_rate", "ci95_low", "ci95_high", "errors", "trials", "failures"}, {}};
    for (const auto& row : r.rows)
        t.rows.push_back({row.snr_db, row.error_rate, row.ci_low, row.ci_high, static_cast<std::int64_t>(row.errors),
                          static_cast<std::int64_t>(row.trials), static_cast<std::int64_t>(row.failures)});
    return t;
}

inline Table dof_table(const DofResult& r) {
    Table t{{"L", "mean_slope_plain", "mean_slope_pp", "channels", "pp_wins", "pp_losses", "sign_test_p_value"}, {}};
    t.rows.push_back({static_cast<std::int64_t>(r.users), r.mean_slope_plain, r.mean_slope_pp,
                      static_cast<std::int64_t>(r.channels.size()), static_cast<std::int64_t>(r.pp_wins),
                      static_cast<std::int64_t>(r.pp_losses), r.sign_test_p});
    return t;
}

inline Table dof_channel_table(const DofResult& r) {
    Table t{{"trial_id", "slope_plain", "slope_pp"}, {}};
    for (const auto& c : r.channels) t.rows.push_back({static_cast<std::int64_t>(c.trial_id), c.slope_plain, c.slope_pp});
    return t;
}

inline Table bench_table(const std::vector<BenchRow>& rows) {
    Table t{{"searcher", "L", "snr_db", "mean_ops_count", "mean_rate", "mean_gap", "trials", "failures"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({std::string(to_string(r.searcher)), static_cast<std::int64_t>(r.users), r.snr_db, r.mean_ops,
                          r.mean_rate, r.mean_gap, static_cast<std::int64_t>(r.trials),
                          static_cast<std::int64_t>(r.failures)});
    return t;
}

inline void print_matrix(std::ostream& os, const Fp2Matrix& m, const std::string& indent = "  ") {
    for (const auto& row : m) {
        os << indent << "[";
        for (std::size_t j = 0; j < row.size(); ++j) os << (j ? ", " : "") << row[j];
        os << "]\n";
    }
}

inline void write_recovery_text(const RecoveryDemo& d, std::ostream& os) {
    os << "field: F_" << d.prime << "[i] (order " << d.prime * d.prime << ")\n";
    os << "snr_db: " << format_double(d.snr_db) << "\n";
    for (std::size_t m = 0; m < d.relays.size(); ++m) {
        os << "relay " << m << ": a = (";
        for (std::size_t l = 0; l < d.relays[m].a.size(); ++l) os << (l ? ", " : "") << d.relays[m].a[l];
        os << "), equation " << (d.relays[m].equation_error ? "in error" : "correct") << "\n";
    }
    os << "coefficient matrix:\n";
    print_matrix(os, d.coefficients);
    os << "determinant: " << d.determinant << "\n";
    os << "true messages:\n";
    print_matrix(os, d.messages);
    if (!d.recovered) {
        os << "recovered messages: none (singular coefficient matrix)\n";
        return;
    }
    os << "recovered messages:\n";
    print_matrix(os, *d.recovered);
    os << "recovery: " << (*d.recovered == d.messages ? "exact" : "mismatch") << "\n";
}

inline nlohmann::ordered_json fp2_json(const Fp2Matrix& m) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& row : m) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& x : row) r.push_back({x.re(), x.im()});
        out.push_back(std::move(r));
    }
    return out;
}

inline void write_recovery_json(const RecoveryDemo& d, std::ostream& os) {
    nlohmann::ordered_json j;
    j["prime"] = d.prime;
    j["snr_db"] = to_json(d.snr_db);
    j["relays"] = nlohmann::ordered_json::array();
    for (const auto& r : d.relays) {
        nlohmann::ordered_json a = nlohmann::ordered_json::array();
        for (auto g : r.a) a.push_back({g.re, g.im});
        j["relays"].push_back({{"a", a}, {"equation_error", r.equation_error}});
    }
    j["coefficients"] = fp2_json(d.coefficients);
    j["determinant"] = {d.determinant.re(), d.determinant.im()};
    j["messages"] = fp2_json(d.messages);
    j["recovered"] = d.recovered ? fp2_json(*d.recovered) : nlohmann::ordered_json(nullptr);
    os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------

struct Options {
    std::size_t users = 2;
    std::vector<double> snr_db;
    std::uint64_t trials = 100;
    std::uint64_t seed = 1;
    std::string searcher;
    std::optional<int> alpha_max;
    double phase_step_deg = 5.0;
    std::string precoding = "optimal";
    std::int64_t prime = 7;
    std::size_t block_n = 16;
    std::string normalization = "average";
    std::string out;
    std::string slopes_out;
    std::string format = "csv";
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

inline ExperimentConfig make_config(const Options& o, const std::vector<double>& default_snr) {
    ExperimentConfig cfg;
    cfg.users = o.users;
    cfg.snr_db = o.snr_db.empty() ? default_snr : o.snr_db;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    if (!o.searcher.empty()) {
        const auto s = parse_searcher(o.searcher);
        if (!s) throw ConfigError("unknown searcher '" + o.searcher + "'");
        cfg.search.searcher = *s;
    }
    cfg.search.alpha_max = o.alpha_max;
    cfg.search.phase_step_deg = o.phase_step_deg;
    cfg.precoding = o.precoding == "none" ? Precoding::none : Precoding::optimal;
    cfg.code = CodeParams{o.prime, o.block_n,
                          o.normalization == "peak" ? PowerNormalization::peak : PowerNormalization::average};
    cfg.workers = o.workers;
    cfg.validate();
    if (cfg.users > 16) throw ConfigError("users must be <= 16");
    return cfg;
}

inline void emit_table(const Table& t, const Options& o, const std::string& path, std::ostream& out) {
    std::ostringstream buf;
    if (o.format == "json")
        write_json(t, buf);
    else
        write_csv(t, buf);
    if (path.empty()) {
        out << buf.str();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + path);
    f << buf.str();
    if (!f) throw std::runtime_error("failed writing " + path);
}

/// Runs one invocation; argv[0] is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Phase-precoded compute-and-forward simulator", "ppcof"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--users", o.users, "number of transmitters L")->check(CLI::Range(1, 16));
        sub->add_option("--snr-db", o.snr_db, "comma-separated SNR grid in dB")->delimiter(',');
        sub->add_option("--trials", o.trials, "Monte Carlo trials (channels)")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--searcher", o.searcher, "coefficient searcher")
            ->check(CLI::IsMember({"qes", "bruteforce", "sphere", "lll"}));
        sub->add_option("--alpha-max", o.alpha_max, "QES modulus bound (default: ceil(sqrt(1 + rho||h||^2)))");
        sub->add_option("--phase-step-deg", o.phase_step_deg, "QES phase step in degrees");
        sub->add_option("--precoding", o.precoding, "phase precoding")->check(CLI::IsMember({"none", "optimal"}));
        sub->add_option("--prime", o.prime, "field prime, p = 3 mod 4");
        sub->add_option("--block-n", o.block_n, "lattice code block length")->check(CLI::PositiveNumber);
        sub->add_option("--normalization", o.normalization, "codeword power normalization")
            ->check(CLI::IsMember({"average", "peak"}));
        sub->add_option("--out", o.out, "output file (default: stdout)");
        sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
    };

    auto* rate_cdf = app.add_subcommand("rate-cdf", "empirical CDF of plain and precoded computation rates");
    auto* error_rate = app.add_subcommand("error-rate", "equation error rate against SNR");
    auto* dof = app.add_subcommand("dof-slope", "rate-versus-log SNR slopes per channel");
    auto* bench = app.add_subcommand("search-bench", "cost and accuracy of the coefficient searchers");
    auto* demo = app.add_subcommand("recover-demo", "relay equations and message recovery over F_{p^2}");
    for (auto* sub : {rate_cdf, error_rate, dof, bench, demo}) add_common(sub);
    dof->add_option("--slopes-out", o.slopes_out, "also write per-channel slopes (CSV/JSON per --format)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        err << app.help();
        return config_error;
    }

    try {
        if (rate_cdf->parsed()) {
            const ExperimentConfig cfg = make_config(o, {10.0, 20.0, 30.0});
            err << "rate-cdf: " << cfg.snr_db.size() * cfg.trials << " jobs on " << cfg.workers << " workers\n";
            const RateCdfResult r = rate_cdf_experiment(cfg);
            if (r.failures) err << "rate-cdf: " << r.failures << " trials failed the coefficient search\n";
            emit_table(rate_cdf_table(r), o, o.out, out);
        } else if (error_rate->parsed()) {
            const ExperimentConfig cfg = make_config(o, {10.0, 20.0, 30.0});
            err << "error-rate: " << cfg.snr_db.size() * cfg.trials << " jobs on " << cfg.workers << " workers\n";
            emit_table(error_rate_table(error_rate_experiment(cfg)), o, o.out, out);
        } else if (dof->parsed()) {
            const ExperimentConfig cfg = make_config(o, {30.0, 40.0, 50.0, 60.0});
            err << "dof-slope: " << cfg.trials << " channels on " << cfg.workers << " workers\n";
            const DofResult r = dof_slope_experiment(cfg);
            if (r.failures) err << "dof-slope: " << r.failures << " channels failed the coefficient search\n";
            emit_table(dof_table(r), o, o.out, out);
            if (!o.slopes_out.empty()) emit_table(dof_channel_table(r), o, o.slopes_out, out);
        } else if (bench->parsed()) {
            const ExperimentConfig cfg = make_config(o, {10.0, 20.0});
            std::vector<Searcher> searchers{Searcher::qes, Searcher::bruteforce, Searcher::sphere, Searcher::lll};
            if (!o.searcher.empty()) searchers = {cfg.search.searcher};
            err << "search-bench: " << searchers.size() << " searchers x " << cfg.snr_db.size() << " SNR points\n";
            emit_table(bench_table(search_bench(cfg, searchers)), o, o.out, out);
        } else if (demo->parsed()) {
            const ExperimentConfig cfg = make_config(o, {40.0});
            const RecoveryDemo d = recover_demo(cfg);
            std::ostringstream buf;
            if (o.format == "json")
                write_recovery_json(d, buf);
            else
                write_recovery_text(d, buf);
            if (o.out.empty()) {
                out << buf.str();
            } else {
                std::ofstream f(o.out, std::ios::binary);
                if (!(f << buf.str())) throw std::runtime_error("cannot write " + o.out);
            }
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const InvalidFieldError& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return runtime_error;
    }
    return ok;
}

}  // namespace ppcof::cli
