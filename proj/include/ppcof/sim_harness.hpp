#pragma once

// Monte Carlo experiments over Rayleigh-fading MAC channels.
//
// Randomness is keyed by (seed, trial_id, stream): every trial owns its own
// generator, so results do not depend on how trials are spread over workers.
// Streams: 0 channel, 1 messages, 2 relay noise.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ppcof/codec.hpp"
#include "ppcof/coeff_search.hpp"
#include "ppcof/field_algebra.hpp"
#include "ppcof/lattice_core.hpp"
#include "ppcof/phase_opt.hpp"
#include "ppcof/rate_engine.hpp"

namespace ppcof {

enum class Stream : std::uint32_t { channel = 0, messages = 1, noise = 2 };

/// Independent generator for one (seed, trial, stream) triple.
inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial_id, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial_id), static_cast<std::uint32_t>(trial_id >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

/// Runs body(i) for i in [0, count) on up to `workers` threads. The first
/// exception (lowest index) is rethrown after all workers finish.
inline void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// i.i.d. CN(0, 1) entries: variance 1/2 per real dimension.
inline ChannelVec draw_channel(std::size_t users, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    ChannelVec h(users);
    for (auto& x : h) {
        const double re = g(rng);
        x = cplx{re, g(rng)};
    }
    return h;
}

inline Message draw_message(std::size_t n, std::int64_t p, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int64_t> u(0, p - 1);
    Message w(n);
    for (auto& s : w) {
        const std::int64_t re = u(rng);
        s = GaussInt{re, u(rng)};
    }
    return w;
}

enum class Precoding { none, optimal };

struct CodeParams {
    std::int64_t prime = 7;
    std::size_t block_n = 16;
    PowerNormalization normalization = PowerNormalization::average;
};

struct ExperimentConfig {
    std::size_t users = 2;
    std::vector<double> snr_db{10.0, 20.0, 30.0};
    std::uint64_t trials = 100;
    std::uint64_t seed = 1;
    SearchConfig search;
    Precoding precoding = Precoding::optimal;
    std::optional<CodeParams> code;
    unsigned workers = 1;
    std::optional<ChannelVec> fixed_channel;  ///< replaces the Rayleigh draw when set

    void validate() const {
        if (users < 1) throw ConfigError("users must be >= 1");
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (snr_db.empty()) throw ConfigError("at least one SNR point is required");
        for (double s : snr_db)
            if (!std::isfinite(s)) throw ConfigError("SNR values must be finite");
        if (fixed_channel && fixed_channel->size() != users) throw ConfigError("fixed channel length differs from users");
        search.validate();
    }

    ChannelVec channel_for(std::uint64_t trial) const {
        if (fixed_channel) return *fixed_channel;
        auto rng = trial_rng(seed, trial, Stream::channel);
        return draw_channel(users, rng);
    }
};

// ---------------------------------------------------------------------------
// Precoded coefficient search

struct PrecodedChoice {
    Precoder precoder;   ///< factors the transmitters apply
    GaussVec a;          ///< coefficients the relay decodes under `precoder`
    cplx alpha{0.0, 0.0};
    double rate_bits = 0.0;
    double noise_energy = 0.0;
    std::uint64_t ops_count = 0;
    int rounds = 0;
};

inline constexpr int kMaxAlternations = 4;

/// Alternates (best a for the current precoder) and (optimal precoder for that a),
/// starting from the identity, until the rate stops improving by 1e-9. Exact
/// searchers then finish with joint_search; qes keeps the alternation result.
inline PrecodedChoice precoded_search(std::span<const cplx> h, double rho, const SearchConfig& cfg) {
    Precoder phi = Precoder::identity(h.size());
    std::optional<PrecodedChoice> best;
    std::uint64_t ops = 0;
    for (int round = 1; round <= kMaxAlternations; ++round) {
        const SearchResult sr = search(h, phi, rho, cfg);
        ops += sr.ops_count;
        OptimalPrecoder opt = optimal_precoder(h, sr.a);
        const double rate = pp_rate_optimal_closed_form(h, sr.a, rho).rate_bits;
        if (best && rate <= best->rate_bits + 1e-9) break;

        PrecodedChoice c;
        c.precoder = opt.precoder;
        c.a = std::move(opt.adjusted_a);
        const ChannelVec hp = apply_precoder(h, c.precoder);
        c.alpha = mmse_alpha(hp, c.a, rho);
        c.noise_energy = noise_energy(hp, c.a, c.alpha, rho);
        c.rate_bits = rate;
        c.rounds = round;
        best = std::move(c);
        phi = best->precoder;
    }

    // The exact searchers also get the joint optimum over (a, Phi); the
    // alternation above only supplies its starting radius.
    if (cfg.searcher != Searcher::qes) {
        const double s = 1.0 + rho * norm2(h);
        const double radius = pp_rate_optimal_closed_form(h, best->a, rho).loss_term / s;
        try {
            if (auto j = joint_search(h, rho, radius * (1.0 + 1e-9), cfg.budget())) {
                ops += j->ops_count;
                const RateReport r = pp_rate_optimal_closed_form(h, j->a, rho);
                if (r.rate_bits > best->rate_bits) {
                    OptimalPrecoder opt = optimal_precoder(h, j->a);
                    best->precoder = opt.precoder;
                    best->a = std::move(opt.adjusted_a);
                    const ChannelVec hp = apply_precoder(h, best->precoder);
                    best->alpha = mmse_alpha(hp, best->a, rho);
                    best->noise_energy = noise_energy(hp, best->a, best->alpha, rho);
                    best->rate_bits = r.rate_bits;
                }
            }
        } catch (const EnumerationTooLargeError&) {
            // keep the alternation result
        }
    }
    best->ops_count = ops;
    return *best;
}

// ---------------------------------------------------------------------------
// Trial records

struct TrialRecord {
    std::uint64_t trial_id = 0;
    double snr_db = 0.0;
    ChannelVec h;
    GaussVec a;                  ///< plain (unprecoded) choice
    cplx alpha{0.0, 0.0};
    double rate_bits = 0.0;
    Precoder precoder;
    GaussVec pp_a;
    cplx pp_alpha{0.0, 0.0};
    double pp_rate_bits = 0.0;
    double noise_energy = 0.0;
    std::optional<bool> equation_error;
    std::uint64_t ops_count = 0;
    bool failed = false;
    std::string failure;
};

inline constexpr double kDominanceTolerance = 1e-9;

inline void assert_dominance(const TrialRecord& r) {
    if (r.failed) return;
    if (r.pp_rate_bits < r.rate_bits - kDominanceTolerance)
        throw std::logic_error("precoded rate below plain rate in trial " + std::to_string(r.trial_id));
    const double same_a = pp_rate_optimal_closed_form(r.h, r.a, db_to_linear(r.snr_db)).rate_bits;
    if (same_a < r.rate_bits - kDominanceTolerance)
        throw std::logic_error("optimal precoding lowered the rate of a fixed a in trial " + std::to_string(r.trial_id));
}

/// Plain and precoded choices for one channel at one SNR.
inline TrialRecord evaluate_trial(std::uint64_t trial_id, double snr_db, const ChannelVec& h, const ExperimentConfig& cfg) {
    TrialRecord r;
    r.trial_id = trial_id;
    r.snr_db = snr_db;
    r.h = h;
    const double rho = db_to_linear(snr_db);
    try {
        const SearchResult plain = search(h, Precoder::identity(h.size()), rho, cfg.search);
        r.a = plain.a;
        r.alpha = plain.alpha;
        r.rate_bits = plain.rate_bits;
        r.noise_energy = plain.noise_energy;
        r.ops_count = plain.ops_count;
        if (cfg.precoding == Precoding::optimal) {
            const PrecodedChoice pc = precoded_search(h, rho, cfg.search);
            r.precoder = pc.precoder;
            r.pp_a = pc.a;
            r.pp_alpha = pc.alpha;
            r.pp_rate_bits = pc.rate_bits;
            r.noise_energy = pc.noise_energy;
            r.ops_count += pc.ops_count;
        } else {
            OptimalPrecoder opt = optimal_precoder(h, plain.a);
            r.precoder = opt.precoder;
            r.pp_a = opt.adjusted_a;
            r.pp_alpha = mmse_alpha(apply_precoder(h, r.precoder), r.pp_a, rho);
            r.pp_rate_bits = pp_rate_optimal_closed_form(h, plain.a, rho).rate_bits;
        }
    } catch (const SearchFailureError& e) {
        r.failed = true;
        r.failure = e.what();
    } catch (const EnumerationTooLargeError& e) {
        r.failed = true;
        r.failure = e.what();
    }
    assert_dominance(r);
    return r;
}

// ---------------------------------------------------------------------------
// Rate CDF

struct RateCdfRow {
    double snr_db = 0.0;
    double percentile = 0.0;
    double rate_plain = 0.0;
    double rate_pp = 0.0;
};

struct RateCdfResult {
    std::vector<RateCdfRow> rows;
    std::vector<TrialRecord> records;  ///< ordered by (snr index, trial id)
    std::uint64_t failures = 0;
};

inline RateCdfResult rate_cdf_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t snrs = cfg.snr_db.size();
    RateCdfResult out;
    out.records.resize(snrs * cfg.trials);
    parallel_for(out.records.size(), cfg.workers, [&](std::size_t job) {
        const std::size_t s = job / cfg.trials;
        const std::uint64_t t = job % cfg.trials;
        out.records[job] = evaluate_trial(t, cfg.snr_db[s], cfg.channel_for(t), cfg);
    });

    for (std::size_t s = 0; s < snrs; ++s) {
        std::vector<double> plain, pp;
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            const TrialRecord& r = out.records[s * cfg.trials + t];
            if (r.failed) {
                ++out.failures;
                continue;
            }
            plain.push_back(r.rate_bits);
            pp.push_back(r.pp_rate_bits);
        }
        std::sort(plain.begin(), plain.end());
        std::sort(pp.begin(), pp.end());
        for (std::size_t k = 0; k < plain.size(); ++k)
            out.rows.push_back({cfg.snr_db[s], static_cast<double>(k + 1) / static_cast<double>(plain.size()), plain[k], pp[k]});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equation error rate

struct ErrorRateRow {
    double snr_db = 0.0;
    double error_rate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;    ///< trials that produced a decision
    std::uint64_t failures = 0;  ///< trials whose search failed
};

struct ErrorRateResult {
    std::vector<ErrorRateRow> rows;
    std::vector<TrialRecord> records;
};

/// Normal-approximation 95% interval, clipped to [0, 1].
inline std::pair<double, double> binomial_ci95(std::uint64_t successes, std::uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    const double p = static_cast<double>(successes) / static_cast<double>(n);
    const double half = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

/// One block through the MAC: y = sum_l h_l m_l x_l + z, z ~ CN(0, 1).
inline CplxVec transmit(std::span<const cplx> h, const Precoder& precoder, const std::vector<CplxVec>& codewords,
                        std::mt19937_64& noise_rng) {
    const std::size_t n = codewords.at(0).size();
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CplxVec y(n, cplx{0.0, 0.0});
    for (std::size_t l = 0; l < h.size(); ++l) {
        const cplx gain = h[l] * precoder.multiplier(l);
        for (std::size_t k = 0; k < n; ++k) y[k] += gain * codewords[l][k];
    }
    for (auto& s : y) {
        const double re = g(noise_rng);
        s += cplx{re, g(noise_rng)};
    }
    return y;
}

inline ErrorRateResult error_rate_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!cfg.code) throw ConfigError("error-rate experiment requires lattice code parameters");
    const CodeParams cp = *cfg.code;
    require_field_prime(cp.prime);
    if (cp.block_n < 1) throw ConfigError("block length must be >= 1");

    const std::size_t snrs = cfg.snr_db.size();
    ErrorRateResult out;
    out.records.resize(snrs * cfg.trials);
    parallel_for(out.records.size(), cfg.workers, [&](std::size_t job) {
        const std::size_t s = job / cfg.trials;
        const std::uint64_t t = job % cfg.trials;
        const double rho = db_to_linear(cfg.snr_db[s]);
        const ChannelVec h = cfg.channel_for(t);
        TrialRecord r;
        r.trial_id = t;
        r.snr_db = cfg.snr_db[s];
        r.h = h;
        try {
            Precoder precoder = Precoder::identity(h.size());
            GaussVec a;
            cplx alpha;
            if (cfg.precoding == Precoding::optimal) {
                const PrecodedChoice pc = precoded_search(h, rho, cfg.search);
                precoder = pc.precoder;
                a = pc.a;
                alpha = pc.alpha;
                r.pp_rate_bits = pc.rate_bits;
                r.noise_energy = pc.noise_energy;
                r.ops_count = pc.ops_count;
            } else {
                const SearchResult sr = search(h, precoder, rho, cfg.search);
                a = sr.a;
                alpha = sr.alpha;
                r.rate_bits = sr.rate_bits;
                r.noise_energy = sr.noise_energy;
                r.ops_count = sr.ops_count;
            }
            r.precoder = precoder;
            r.pp_a = a;
            r.pp_alpha = alpha;

            const LatticeCode code = LatticeCode::for_snr(cp.block_n, cp.prime, rho, cp.normalization);
            auto msg_rng = trial_rng(cfg.seed, t, Stream::messages);
            auto noise_rng = trial_rng(cfg.seed, t, Stream::noise);
            std::vector<CplxVec> codewords;
            for (std::size_t l = 0; l < h.size(); ++l)
                codewords.push_back(encode(draw_message(cp.block_n, cp.prime, msg_rng), code));
            const CplxVec y = transmit(h, precoder, codewords, noise_rng);
            r.equation_error = equation_error(relay_decode(y, alpha, a, code), true_equation(codewords, a, code));
        } catch (const SearchFailureError& e) {
            r.failed = true;
            r.failure = e.what();
        } catch (const EnumerationTooLargeError& e) {
            r.failed = true;
            r.failure = e.what();
        }
        out.records[job] = std::move(r);
    });

    for (std::size_t s = 0; s < snrs; ++s) {
        ErrorRateRow row;
        row.snr_db = cfg.snr_db[s];
        for (std::uint64_t t = 0; t < cfg.trials; ++t) {
            const TrialRecord& r = out.records[s * cfg.trials + t];
            if (r.failed) {
                ++row.failures;
                continue;
            }
            ++row.trials;
            if (*r.equation_error) ++row.errors;
        }
        row.error_rate = row.trials ? static_cast<double>(row.errors) / static_cast<double>(row.trials) : 0.0;
        std::tie(row.ci_low, row.ci_high) = binomial_ci95(row.errors, row.trials);
        out.rows.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Empirical degrees of freedom

/// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) throw ConfigError("slope fit needs distinct SNR points");
    return sxy / sxx;
}

/// One-sided sign test: P(Bin(wins + losses, 1/2) >= wins).
inline double sign_test_p_value(std::uint64_t wins, std::uint64_t losses) {
    const std::uint64_t n = wins + losses;
    if (n == 0) return 1.0;
    double p = 0.0;
    for (std::uint64_t k = wins; k <= n; ++k)
        p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::numbers::ln2);
    return std::min(1.0, p);
}

struct ChannelSlope {
    std::uint64_t trial_id = 0;
    double slope_plain = 0.0;
    double slope_pp = 0.0;
    std::vector<double> rate_plain;  ///< one per fitted SNR point
    std::vector<double> rate_pp;
};

struct DofResult {
    std::size_t users = 0;
    std::vector<double> fit_snr_db;  ///< SNR points used by the fit
    std::vector<ChannelSlope> channels;
    double mean_slope_plain = 0.0;
    double mean_slope_pp = 0.0;
    std::uint64_t pp_wins = 0;
    std::uint64_t pp_losses = 0;
    double sign_test_p = 1.0;
    std::uint64_t failures = 0;
};

/// Upper half of the (sorted) SNR grid, never fewer than three points.
inline std::vector<double> dof_fit_points(std::vector<double> snr_db) {
    std::sort(snr_db.begin(), snr_db.end());
    snr_db.erase(std::unique(snr_db.begin(), snr_db.end()), snr_db.end());
    if (snr_db.size() < 3) throw ConfigError("slope fit needs at least three distinct SNR points");
    if (snr_db.back() - snr_db.front() < 30.0) throw ConfigError("SNR grid must span at least 30 dB");
    const std::size_t keep = std::max<std::size_t>(3, (snr_db.size() + 1) / 2);
    return {snr_db.end() - static_cast<std::ptrdiff_t>(keep), snr_db.end()};
}

inline DofResult dof_slope_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    DofResult out;
    out.users = cfg.users;
    out.fit_snr_db = dof_fit_points(cfg.snr_db);
    std::vector<double> log_rho;
    for (double s : out.fit_snr_db) log_rho.push_back(std::log2(db_to_linear(s)));

    std::vector<std::optional<ChannelSlope>> slots(cfg.trials);
    parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
        const ChannelVec h = cfg.channel_for(t);
        ChannelSlope c;
        c.trial_id = t;
        try {
            for (double s : out.fit_snr_db) {
                const double rho = db_to_linear(s);
                c.rate_plain.push_back(search(h, Precoder::identity(h.size()), rho, cfg.search).rate_bits);
                c.rate_pp.push_back(precoded_search(h, rho, cfg.search).rate_bits);
            }
        } catch (const SearchFailureError&) {
            return;
        } catch (const EnumerationTooLargeError&) {
            return;
        }
        c.slope_plain = ls_slope(log_rho, c.rate_plain);
        c.slope_pp = ls_slope(log_rho, c.rate_pp);
        slots[t] = std::move(c);
    });

    for (auto& s : slots) {
        if (!s) {
            ++out.failures;
            continue;
        }
        out.mean_slope_plain += s->slope_plain;
        out.mean_slope_pp += s->slope_pp;
        if (s->slope_pp > s->slope_plain + 1e-12) ++out.pp_wins;
        if (s->slope_pp < s->slope_plain - 1e-12) ++out.pp_losses;
        out.channels.push_back(std::move(*s));
    }
    if (!out.channels.empty()) {
        out.mean_slope_plain /= static_cast<double>(out.channels.size());
        out.mean_slope_pp /= static_cast<double>(out.channels.size());
    }
    out.sign_test_p = sign_test_p_value(out.pp_wins, out.pp_losses);
    return out;
}

// ---------------------------------------------------------------------------
// Searcher benchmark

struct BenchRow {
    Searcher searcher = Searcher::qes;
    std::size_t users = 0;
    double snr_db = 0.0;
    double mean_ops = 0.0;
    double mean_rate = 0.0;
    double mean_gap = 0.0;  ///< exact optimum rate minus achieved rate
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
};

inline std::vector<BenchRow> search_bench(const ExperimentConfig& cfg, const std::vector<Searcher>& searchers) {
    cfg.validate();
    std::vector<BenchRow> rows;
    for (double snr : cfg.snr_db) {
        const double rho = db_to_linear(snr);
        std::vector<double> exact(cfg.trials);
        parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
            const ChannelVec h = cfg.channel_for(t);
            exact[t] = sphere_min(gram_form(h, rho), cfg.search.budget()).rate_bits;
        });
        for (Searcher s : searchers) {
            SearchConfig sc = cfg.search;
            sc.searcher = s;
            std::vector<std::optional<SearchResult>> results(cfg.trials);
            parallel_for(cfg.trials, cfg.workers, [&](std::size_t t) {
                const ChannelVec h = cfg.channel_for(t);
                try {
                    results[t] = search(h, Precoder::identity(h.size()), rho, sc);
                } catch (const SearchFailureError&) {
                } catch (const EnumerationTooLargeError&) {
                }
            });
            BenchRow row;
            row.searcher = s;
            row.users = cfg.users;
            row.snr_db = snr;
            for (std::uint64_t t = 0; t < cfg.trials; ++t) {
                if (!results[t]) {
                    ++row.failures;
                    continue;
                }
                ++row.trials;
                row.mean_ops += static_cast<double>(results[t]->ops_count);
                row.mean_rate += results[t]->rate_bits;
                row.mean_gap += exact[t] - results[t]->rate_bits;
            }
            if (row.trials) {
                const double n = static_cast<double>(row.trials);
                row.mean_ops /= n;
                row.mean_rate /= n;
                row.mean_gap /= n;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Destination-side recovery

struct RelayOutcome {
    ChannelVec h;
    GaussVec a;
    Precoder precoder;
    bool equation_error = false;
};

struct RecoveryDemo {
    std::int64_t prime = 0;
    double snr_db = 0.0;
    std::vector<RelayOutcome> relays;
    Fp2Matrix coefficients;
    Fp2 determinant;
    Fp2Matrix messages;                   ///< true messages, one row per user
    std::optional<Fp2Matrix> recovered;   ///< nullopt when the coefficient matrix is singular
};

/// L relays, each with its own channel, decode one equation of the same L
/// messages; the destination solves the resulting system over F_{p^2}.
///
/// With precoding enabled every relay gets its own optimal precoder, i.e. each
/// relay is treated as the single relay the precoder was designed for.
inline RecoveryDemo recover_demo(const ExperimentConfig& cfg) {
    cfg.validate();
    const CodeParams cp = cfg.code.value_or(CodeParams{});
    require_field_prime(cp.prime);
    const std::size_t L = cfg.users;

    RecoveryDemo demo;
    demo.prime = cp.prime;
    demo.snr_db = cfg.snr_db.front();
    const double rho = db_to_linear(demo.snr_db);
    const LatticeCode code = LatticeCode::for_snr(cp.block_n, cp.prime, rho, cp.normalization);

    auto msg_rng = trial_rng(cfg.seed, 0, Stream::messages);
    std::vector<Message> messages;
    std::vector<CplxVec> codewords;
    for (std::size_t l = 0; l < L; ++l) {
        messages.push_back(draw_message(cp.block_n, cp.prime, msg_rng));
        codewords.push_back(encode(messages.back(), code));
        Fp2Vec row;
        for (auto s : messages.back()) row.push_back(to_field(s, cp.prime));
        demo.messages.push_back(std::move(row));
    }

    Fp2Matrix rhs;
    for (std::size_t m = 0; m < L; ++m) {
        RelayOutcome relay;
        relay.h = cfg.channel_for(m);
        cplx alpha;
        if (cfg.precoding == Precoding::optimal) {
            const PrecodedChoice pc = precoded_search(relay.h, rho, cfg.search);
            relay.precoder = pc.precoder;
            relay.a = pc.a;
            alpha = pc.alpha;
        } else {
            relay.precoder = Precoder::identity(L);
            const SearchResult sr = search(relay.h, relay.precoder, rho, cfg.search);
            relay.a = sr.a;
            alpha = sr.alpha;
        }
        auto noise_rng = trial_rng(cfg.seed, m, Stream::noise);
        const CplxVec y = transmit(relay.h, relay.precoder, codewords, noise_rng);
        const EquationEstimate est = relay_decode(y, alpha, relay.a, code);
        relay.equation_error = equation_error(est, true_equation(codewords, relay.a, code));
        demo.coefficients.push_back(reduce_coeffs(relay.a, cp.prime));
        rhs.push_back(est.field_symbols());
        demo.relays.push_back(std::move(relay));
    }
    demo.determinant = determinant(demo.coefficients);
    demo.recovered = solve(EquationSystem{demo.coefficients, rhs});
    return demo;
}

}  // namespace ppcof
