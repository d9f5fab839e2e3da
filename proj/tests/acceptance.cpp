// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ppcof/cli.hpp"

using namespace ppcof;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1. Precoded rate never below the plain rate for the same a.
Verdict dominance() {
    auto g = oracle::rng(1001);
    int ok = 0;
    double worst = INFINITY;
    const int n = 10000;
    for (int t = 0; t < n; ++t) {
        const std::size_t L = 2 + t % 3;
        const CplxVec h = oracle::random_channel(g, L);
        const GaussVec a = oracle::random_coeffs(g, L, 4);
        const double rho = std::array{1.0, 10.0, 100.0}[t % 3];
        const double d = pp_rate_optimal_closed_form(h, a, rho).rate_bits - computation_rate(h, a, rho).rate_bits;
        worst = std::min(worst, d);
        ok += d >= -1e-9;
    }
    return {ok == n, fmt("%d/%d cases with pp - plain >= -1e-9 (min difference %.3g)", ok, n, worst)};
}

// 2. MMSE alpha against a refined grid.
Verdict mmse_grid() {
    auto g = oracle::rng(1002);
    double worst = 0.0;
    int below = 0;
    const int n = 100;
    for (int t = 0; t < n; ++t) {
        const std::size_t L = 1 + t % 3;
        const CplxVec h = oracle::random_channel(g, L);
        const GaussVec a = oracle::random_coeffs(g, L, 3);
        const double rho = std::pow(10.0, oracle::uniform(g, 0, 2));
        const cplx alpha = mmse_alpha(h, a, rho);
        const auto grid = oracle::grid_min_alpha(h, a, rho, 2.0 * std::abs(alpha) + 1.0);
        const double q = noise_energy(h, a, alpha, rho);
        worst = std::max(worst, std::abs(q - grid.value));
        below += q <= grid.value + 1e-12;
    }
    return {worst <= 1e-6 && below == n,
            fmt("max |Q(alpha_mmse) - Q(grid min)| = %.3g (tolerance 1e-6), grid never lower in %d/%d instances", worst,
                below, n)};
}

// 3. Closed-form rate equals the grid-maximized rate.
Verdict closed_form_rate() {
    auto g = oracle::rng(1003);
    double worst = 0.0;
    const int n = 100;
    for (int t = 0; t < n; ++t) {
        const std::size_t L = 2 + t % 2;
        const CplxVec h = oracle::random_channel(g, L);
        const double rho = std::pow(10.0, oracle::uniform(g, 0.5, 2.5));
        const GaussVec a = sphere_min(gram_form(h, rho)).a;
        const RateReport r = computation_rate(h, a, rho);
        const auto grid = oracle::grid_min_alpha(h, a, rho, 2.0 * std::abs(r.alpha) + 1.0);
        const double grid_rate = std::max(0.0, std::log2(rho / grid.value));
        const double rel = std::abs(r.rate_bits - grid_rate) / std::max(grid_rate, 1e-300);
        worst = std::max(worst, grid_rate == 0.0 && r.rate_bits == 0.0 ? 0.0 : rel);
    }
    return {worst <= 1e-6, fmt("max relative difference %.3g over %d instances (tolerance 1e-6)", worst, n)};
}

// 4. Exact solvers agree.
Verdict exact_agreement() {
    auto g = oracle::rng(1004);
    double worst = 0.0;
    const int n = 200;
    for (int t = 0; t < n; ++t) {
        const CplxVec h = oracle::random_channel(g, 2);
        const double rho = t % 2 ? 10.0 : 100.0;
        const GramForm m = gram_form(h, rho);
        const double b = bruteforce(h, Precoder::identity(2), rho).form_value;
        const double s = sphere_min(m).form_value;
        const double l = lll_assisted(m).form_value;
        worst = std::max({worst, std::abs(b - s), std::abs(l - s)});
    }
    return {worst <= 1e-9, fmt("max pairwise form difference %.3g over %d instances (tolerance 1e-9)", worst, n)};
}

// 5. QES never beats the optimum and evaluates exactly (floor(90/d)+1) * alpha_max candidates.
Verdict qes_soundness() {
    auto g = oracle::rng(1005);
    int sound = 0, counted = 0, n = 0, skipped = 0;
    double gap = 0.0;
    for (double d : {5.0, 7.0, 10.0, 30.0}) {
        for (int t = 0; t < 125; ++t) {
            const CplxVec h = oracle::random_channel(g, 2);
            const double rho = std::array{10.0, 100.0, 1000.0}[t % 3];
            SearchConfig cfg;
            cfg.searcher = Searcher::qes;
            cfg.phase_step_deg = d;
            SearchResult q;
            try {
                q = qes(h, Precoder::identity(2), rho, cfg);
            } catch (const SearchFailureError&) {
                ++skipped;  // every grid point quantized to zero
                continue;
            }
            ++n;
            const SearchResult s = sphere_min(gram_form(h, rho));
            sound += q.noise_energy >= s.noise_energy - 1e-12;
            const auto expected = (static_cast<std::uint64_t>(std::floor(90.0 / d)) + 1) *
                                  static_cast<std::uint64_t>(default_alpha_max(h, rho));
            counted += q.ops_count == expected;
            gap += s.rate_bits - q.rate_bits;
        }
    }
    return {sound == n && counted == n && skipped * 20 < n,
            fmt("%d/%d never below exact noise energy, %d/%d exact candidate counts, %d search failures; "
                "mean rate gap %.4f bits",
                sound, n, counted, n, skipped, gap / n)};
}

// 6. Real-embedding isometry.
Verdict embedding_isometry() {
    auto g = oracle::rng(1006);
    double worst = 0.0;
    const int n = 1000;
    std::srand(1006);
    for (int t = 0; t < n; ++t) {
        const auto L = static_cast<Eigen::Index>(1 + t % 4);
        Eigen::MatrixXcd m;
        if (t % 2) {
            const Eigen::MatrixXcd b = Eigen::MatrixXcd::Random(L, L);
            m = b * b.adjoint();
        } else {
            m = gram_form(oracle::random_channel(g, static_cast<std::size_t>(L)), oracle::uniform(g, 1, 1000)).matrix();
        }
        const GaussVec a = oracle::random_coeffs(g, static_cast<std::size_t>(L), 5);
        const Eigen::VectorXd v = real_embedding(a);
        worst = std::max(worst, std::abs(v.dot(real_embedding(m) * v) - oracle::form(m, a)));
    }
    return {worst <= 1e-10, fmt("max |a~ M~ a~^T - a M a^H| = %.3g over %d pairs (tolerance 1e-10)", worst, n)};
}

// 7. Scaling lemma on constructed instances.
Verdict scaling_lemma() {
    auto g = oracle::rng(1007);
    int violations = 0, n = 0, bad_hypothesis = 0;
    for (std::size_t L : {2u, 4u})
        for (int c : {2, 3})
            for (int t = 0; t < 2500; ++t, ++n) {
                const auto inst = oracle::lemma_instance(g, L, c);
                if (oracle::lemma_hypothesis_gap(inst) > std::pow(c, -static_cast<double>(L + 1))) ++bad_hypothesis;
                const auto [left, right] = oracle::lemma_sides(inst);
                violations += left > right + 1e-12;
            }
    return {violations == 0 && bad_hypothesis == 0,
            fmt("%d violations, %d instances outside the hypothesis, %d instances", violations, bad_hypothesis, n)};
}

// 8. Codec round trip and bounded-noise decoding.
Verdict codec() {
    auto g = oracle::rng(1008);
    int round_trip = 0, corrected = 0;
    const int n = 1000;
    for (int t = 0; t < n; ++t) {
        const std::int64_t p = std::array<std::int64_t, 3>{3, 7, 11}[t % 3];
        const LatticeCode code = LatticeCode::for_snr(16, p, oracle::uniform(g, 1, 1e4));
        const Message w = draw_message(16, p, g);
        const EquationEstimate est = relay_decode(encode(w, code), 1.0, GaussVec{{1, 0}}, code);
        bool same = true;
        for (std::size_t k = 0; k < w.size(); ++k) same = same && to_field(est.residues[k], p) == to_field(w[k], p);
        round_trip += same;

        std::vector<CplxVec> xs;
        for (int l = 0; l < 3; ++l) xs.push_back(encode(draw_message(16, p, g), code));
        const GaussVec a = oracle::random_coeffs(g, 3, 3);
        const cplx alpha = std::polar(oracle::uniform(g, 0.5, 2.0), oracle::uniform(g, -3.0, 3.0));
        CplxVec y(16, cplx{0.0, 0.0});
        const double half = 0.4999 * code.beta();
        for (std::size_t k = 0; k < 16; ++k) {
            for (int l = 0; l < 3; ++l) y[k] += a[l].to_complex() * xs[l][k];
            y[k] = (y[k] + cplx(oracle::uniform(g, -half, half), oracle::uniform(g, -half, half))) / alpha;
        }
        corrected += !equation_error(relay_decode(y, alpha, a, code), true_equation(xs, a, code));
    }
    return {round_trip == n && corrected == n,
            fmt("%d/%d noiseless round trips, %d/%d bounded-noise decodes correct", round_trip, n, corrected, n)};
}

// 9. Finite-field recovery and singularity rate.
Verdict field_recovery() {
    auto g = oracle::rng(1009);
    int exact = 0, n = 0;
    std::string rates;
    bool rates_ok = true;
    for (std::int64_t p : {3, 7, 11}) {
        for (int solved = 0; solved < 1000;) {
            const std::size_t L = 2 + solved % 3;
            const Fp2Matrix a = random_matrix(L, L, p, g);
            if (determinant(a).is_zero()) continue;
            const Fp2Matrix w = random_matrix(L, 8, p, g);
            const auto got = solve({a, multiply(a, w)});
            exact += got && *got == w;
            ++solved;
            ++n;
        }
        const std::uint64_t trials = 100000;
        const double q = singular_fraction_exact(2, p);
        const double rate = singularity_rate(2, p, trials, 77 + static_cast<std::uint64_t>(p));
        const double sigma = std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
        rates_ok = rates_ok && std::abs(rate - q) <= 3.0 * sigma;
        rates += fmt(" p=%lld: %.5f vs %.5f (3 sigma %.5f);", static_cast<long long>(p), rate, q, 3.0 * sigma);
    }
    return {exact == n && rates_ok, fmt("%d/%d systems solved exactly;", exact, n) + rates};
}

// 10. Precoded sup-rate slopes dominate plain slopes (paired sign test).
Verdict dof_ordering() {
    ExperimentConfig cfg;
    cfg.users = 2;
    cfg.snr_db = {30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0};
    cfg.trials = 200;
    cfg.seed = 2024;
    cfg.workers = std::max(1u, std::thread::hardware_concurrency());
    const DofResult r = dof_slope_experiment(cfg);
    std::vector<double> plain;
    for (const auto& c : r.channels) plain.push_back(c.slope_plain);
    std::sort(plain.begin(), plain.end());
    const auto below = std::count_if(plain.begin(), plain.end(), [](double s) { return s < 0.75; });
    const bool pass = r.channels.size() == 200 && r.mean_slope_pp >= r.mean_slope_plain && r.sign_test_p < 0.05;
    return {pass, fmt("mean slope plain %.4f, precoded %.4f; wins %llu, losses %llu, sign-test p = %.3g; "
                      "plain slope median %.3f, %lld/%zu below 0.75",
                      r.mean_slope_plain, r.mean_slope_pp, static_cast<unsigned long long>(r.pp_wins),
                      static_cast<unsigned long long>(r.pp_losses), r.sign_test_p, plain[plain.size() / 2],
                      static_cast<long long>(below), plain.size())};
}

// 11. Byte-identical output across reruns and worker counts.
Verdict determinism() {
    const fs::path dir = fs::temp_directory_path() / "ppcof_acceptance";
    fs::create_directories(dir);
    const std::vector<std::vector<std::string>> commands{
        {"rate-cdf", "--users", "2", "--snr-db", "20", "--trials", "1000", "--seed", "7"},
        {"error-rate", "--users", "2", "--snr-db", "10,20,30", "--trials", "200", "--seed", "8", "--prime", "3"},
        {"dof-slope", "--users", "2", "--snr-db", "30,40,50,60", "--trials", "20", "--seed", "9"},
        {"search-bench", "--users", "2", "--snr-db", "10,20", "--trials", "20", "--seed", "10", "--format", "json"},
        {"recover-demo", "--users", "3", "--prime", "7", "--seed", "11"},
    };
    int identical = 0;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::vector<std::string> outputs;
        for (const char* workers : {"1", "1", "3", "8"}) {
            const fs::path out = dir / ("run" + std::to_string(c) + "_" + std::to_string(outputs.size()));
            std::vector<std::string> args{"ppcof"};
            args.insert(args.end(), commands[c].begin(), commands[c].end());
            args.insert(args.end(), {"--workers", workers, "--out", out.string()});
            std::vector<const char*> argv;
            for (const auto& s : args) argv.push_back(s.c_str());
            std::ostringstream sink_out, sink_err;
            if (cli::run(static_cast<int>(argv.size()), argv.data(), sink_out, sink_err) != 0) break;
            std::ifstream f(out, std::ios::binary);
            outputs.emplace_back(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
        }
        identical += outputs.size() == 4 && !outputs[0].empty() &&
                     std::all_of(outputs.begin(), outputs.end(), [&](const std::string& s) { return s == outputs[0]; });
    }
    fs::remove_all(dir);
    return {identical == static_cast<int>(commands.size()),
            fmt("%d/%zu subcommands byte-identical over 2 reruns and 1, 3, 8 workers", identical, commands.size())};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"dominance of the precoded rate", dominance},
        {"MMSE scalar is the noise minimizer", mmse_grid},
        {"closed-form rate equals grid-maximized rate", closed_form_rate},
        {"exact solvers agree", exact_agreement},
        {"QES soundness and cost", qes_soundness},
        {"real-embedding isometry", embedding_isometry},
        {"scaling lemma", scaling_lemma},
        {"codec correctness", codec},
        {"finite-field recovery", field_recovery},
        {"empirical DoF ordering", dof_ordering},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !v.pass;
        std::printf("%s %2zu %s: %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, v.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
