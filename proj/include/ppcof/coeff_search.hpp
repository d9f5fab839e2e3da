#pragma once

// Network-equation coefficient search: find a nonzero a in Z[i]^L minimizing
// a M' a^H for M' = Phi^H M Phi, together with the MMSE scalar alpha.
//
//   qes         grid over alpha (modulus 1..alpha_max, argument 0..90 deg),
//               quantize alpha h', re-fit alpha, keep the lowest effective noise
//   bruteforce  every a with ||a||^2 < 1 + rho||h||^2
//   sphere_min  Cholesky + Schnorr-Euchner enumeration on the real 2L form
//   lll_assisted  LLL on the Cholesky basis, shortest reduced row as the
//               starting radius, then the same enumeration
//
// Every searcher reports ops_count (candidates evaluated for qes/bruteforce,
// enumeration-tree nodes for the lattice searchers).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ppcof/lattice_core.hpp"
#include "ppcof/phase_opt.hpp"
#include "ppcof/rate_engine.hpp"

namespace ppcof {

enum class Searcher { qes, bruteforce, sphere, lll };

inline const char* to_string(Searcher s) {
    switch (s) {
        case Searcher::qes: return "qes";
        case Searcher::bruteforce: return "bruteforce";
        case Searcher::sphere: return "sphere";
        case Searcher::lll: return "lll";
    }
    return "?";
}

inline std::optional<Searcher> parse_searcher(const std::string& s) {
    if (s == "qes") return Searcher::qes;
    if (s == "bruteforce") return Searcher::bruteforce;
    if (s == "sphere") return Searcher::sphere;
    if (s == "lll") return Searcher::lll;
    return std::nullopt;
}

inline constexpr std::uint64_t kDefaultSearchBudget = 100'000'000;

struct SearchConfig {
    std::optional<int> alpha_max;  ///< default: ceil(sqrt(1 + rho||h||^2))
    double phase_step_deg = 5.0;
    Searcher searcher = Searcher::sphere;
    std::optional<std::uint64_t> ops_budget;

    void validate() const {
        if (alpha_max && *alpha_max < 1) throw ConfigError("alpha_max must be >= 1");
        if (!(phase_step_deg > 0.0 && phase_step_deg <= 90.0)) throw ConfigError("phase step must be in (0, 90] degrees");
        if (ops_budget && *ops_budget == 0) throw ConfigError("ops budget must be positive");
    }

    std::uint64_t budget() const { return ops_budget.value_or(kDefaultSearchBudget); }
};

struct SearchResult {
    GaussVec a;
    cplx alpha{0.0, 0.0};
    double noise_energy = 0.0;  ///< rho ||alpha h' - a||^2 + |alpha|^2
    double rate_bits = 0.0;
    double form_value = 0.0;    ///< a M' a^H
    std::uint64_t ops_count = 0;
};

/// Beyond this modulus every alpha has |alpha|^2 >= 1 + rho||h||^2 and the rate is zero.
inline int default_alpha_max(std::span<const cplx> h, double rho) {
    return static_cast<int>(std::ceil(std::sqrt(1.0 + rho * norm2(h))));
}

inline std::uint64_t qes_angle_count(double phase_step_deg) {
    return static_cast<std::uint64_t>(std::floor(90.0 / phase_step_deg + 1e-9)) + 1;
}

/// Number of alpha grid points qes evaluates, both ends of the argument range included.
inline std::uint64_t qes_candidate_count(double phase_step_deg, int alpha_max) {
    return qes_angle_count(phase_step_deg) * static_cast<std::uint64_t>(alpha_max);
}

/// Lexicographic order on (Re a_1, Im a_1, Re a_2, ...).
inline bool lex_less(std::span<const GaussInt> x, std::span<const GaussInt> y) {
    for (std::size_t l = 0; l < std::min(x.size(), y.size()); ++l) {
        if (x[l].re != y[l].re) return x[l].re < y[l].re;
        if (x[l].im != y[l].im) return x[l].im < y[l].im;
    }
    return x.size() < y.size();
}

/// Unit u making arg(u * first nonzero entry) fall in [-pi/4, pi/4).
inline GaussUnit canonical_unit(std::span<const GaussInt> a) {
    for (auto g : a) {
        if (g.is_zero()) continue;
        for (int k = 0; k < 4; ++k) {
            const GaussInt r = unit_value(unit_from_power(k)) * g;
            if (r.re > 0 && -r.re <= r.im && r.im < r.re) return unit_from_power(k);
        }
    }
    return GaussUnit::one;
}

inline GaussVec times_unit(std::span<const GaussInt> a, GaussUnit u) {
    GaussVec out;
    out.reserve(a.size());
    for (auto g : a) out.push_back(unit_value(u) * g);
    return out;
}

namespace detail {

inline SearchResult finish(std::span<const cplx> hp, double rho, GaussVec a, std::uint64_t ops) {
    a = times_unit(a, canonical_unit(a));
    SearchResult r;
    r.alpha = mmse_alpha(hp, a, rho);
    r.noise_energy = noise_energy(hp, a, r.alpha, rho);
    r.form_value = (static_cast<double>(norm2(a)) + rho * misalignment(hp, a)) / (1.0 + rho * norm2(hp));
    r.rate_bits = log2_plus(1.0 / r.form_value);
    r.a = std::move(a);
    r.ops_count = ops;
    return r;
}

// Real coordinates (Re a, Im a) -> Gaussian integers.
inline GaussVec to_gauss(std::span<const std::int64_t> z) {
    const std::size_t L = z.size() / 2;
    GaussVec a(L);
    for (std::size_t l = 0; l < L; ++l) a[l] = {z[l], z[l + L]};
    return a;
}

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kTieTolerance = 1e-12;

// Depth-first Schnorr-Euchner enumeration of min z G z^T over nonzero integer
// z, G symmetric positive definite. Candidates are mapped to output
// coordinates by `transform` (row vector z times T) before tie-breaking, so
// the same lexicographic rule applies whatever basis is enumerated.
class Enumerator {
public:
    Enumerator(const Eigen::MatrixXd& gram, double radius, std::uint64_t budget, const IntMatrix* transform)
        : n_(gram.rows()), radius_(radius), budget_(budget), transform_(transform), z_(static_cast<std::size_t>(n_), 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) throw NumericError("Cholesky factorization failed: form is not positive definite");
        r_ = llt.matrixU();
        for (Eigen::Index i = 0; i < n_; ++i)
            if (!(r_(i, i) > 0.0)) throw NumericError("Cholesky factor has a non-positive pivot");
    }

    /// Seed the incumbent (e.g. a reduced basis row); the radius shrinks to its value.
    void seed(std::vector<std::int64_t> z, double value) {
        best_ = output(z);
        best_value_ = value;
        found_ = true;
        radius_ = std::min(radius_, value);
    }

    void run() { descend(n_ - 1, 0.0); }

    bool found() const { return found_; }
    const std::vector<std::int64_t>& best() const { return best_; }
    double best_value() const { return best_value_; }
    std::uint64_t nodes() const { return nodes_; }

private:
    std::vector<std::int64_t> output(const std::vector<std::int64_t>& z) const {
        if (!transform_) return z;
        std::vector<std::int64_t> a(static_cast<std::size_t>(n_), 0);
        for (Eigen::Index i = 0; i < n_; ++i)
            if (z[i] != 0)
                for (Eigen::Index j = 0; j < n_; ++j) a[j] += z[i] * (*transform_)(i, j);
        return a;
    }

    void leaf(double value) {
        if (std::all_of(z_.begin(), z_.end(), [](std::int64_t v) { return v == 0; })) return;
        auto a = output(z_);
        const bool better = !found_ || value < best_value_ - kTieTolerance;
        const bool tie = found_ && std::fabs(value - best_value_) <= kTieTolerance &&
                         lex_less(to_gauss(a), to_gauss(best_));
        if (!better && !tie) return;
        if (better) best_value_ = value;
        best_ = std::move(a);
        found_ = true;
        radius_ = std::min(radius_, best_value_);
    }

    void descend(Eigen::Index i, double partial) {
        if (++nodes_ > budget_)
            throw EnumerationTooLargeError("enumeration exceeded its node budget", static_cast<double>(nodes_));
        double center = 0.0;
        for (Eigen::Index j = i + 1; j < n_; ++j) center -= r_(i, j) * static_cast<double>(z_[j]);
        center /= r_(i, i);

        const double start = std::round(center);
        const double dir = center >= start ? 1.0 : -1.0;
        for (int step = 0;; ++step) {
            // start, start+dir, start-dir, start+2dir, ... : nondecreasing distance to center
            const double offset = (step % 2 == 1 ? 1.0 : -1.0) * ((step + 1) / 2);
            const double x = start + dir * offset;
            const double gap = r_(i, i) * (x - center);
            const double d = partial + gap * gap;
            if (d > radius_ + kTieTolerance) break;
            z_[i] = static_cast<std::int64_t>(x);
            if (i == 0)
                leaf(d);
            else
                descend(i - 1, d);
        }
        z_[i] = 0;
    }

    Eigen::Index n_;
    Eigen::MatrixXd r_;
    double radius_;
    std::uint64_t budget_;
    const IntMatrix* transform_;
    std::vector<std::int64_t> z_;
    std::vector<std::int64_t> best_;
    double best_value_ = std::numeric_limits<double>::infinity();
    bool found_ = false;
    std::uint64_t nodes_ = 0;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// QES

inline SearchResult qes(std::span<const cplx> h, const Precoder& p, double rho, const SearchConfig& cfg) {
    detail::require_rho(rho);
    cfg.validate();
    const ChannelVec hp = apply_precoder(h, p);
    const int alpha_max = cfg.alpha_max.value_or(default_alpha_max(h, rho));
    const std::uint64_t angles = qes_angle_count(cfg.phase_step_deg);
    const std::uint64_t total = angles * static_cast<std::uint64_t>(alpha_max);
    if (cfg.ops_budget && total > *cfg.ops_budget)
        throw EnumerationTooLargeError("qes grid exceeds the ops budget", static_cast<double>(total));

    const double denom = 1.0 + rho * norm2(h);
    double best_q = std::numeric_limits<double>::infinity();
    GaussVec best_a;
    for (int modulus = 1; modulus <= alpha_max; ++modulus) {
        for (std::uint64_t k = 0; k < angles; ++k) {
            const double angle = static_cast<double>(k) * cfg.phase_step_deg * std::numbers::pi / 180.0;
            const cplx grid_alpha = std::polar(static_cast<double>(modulus), angle);
            GaussVec a(hp.size());
            for (std::size_t l = 0; l < hp.size(); ++l) a[l] = quantize_zi(grid_alpha * hp[l]);
            if (is_zero(a)) continue;
            const cplx alpha = rho * inner(a, hp) / denom;
            const double q = noise_energy(hp, a, alpha, rho);
            if (q < best_q) {
                best_q = q;
                best_a = std::move(a);
            }
        }
    }
    if (best_a.empty())
        throw SearchFailureError("qes: every candidate quantized to zero; raise alpha_max");
    return detail::finish(hp, rho, std::move(best_a), total);
}

// ---------------------------------------------------------------------------
// Exhaustive search inside the zero-rate sphere

/// Lattice points of Z^{2L} in a ball of squared radius r: pi^L r^L / L!.
inline double sphere_point_estimate(std::size_t users, double radius_sq) {
    return std::exp(static_cast<double>(users) * std::log(std::numbers::pi * radius_sq) -
                    std::lgamma(static_cast<double>(users) + 1.0));
}

inline SearchResult bruteforce(std::span<const cplx> h, const Precoder& p, double rho,
                               std::uint64_t budget = kDefaultSearchBudget) {
    detail::require_rho(rho);
    const ChannelVec hp = apply_precoder(h, p);
    const GramForm m = gram_form(hp, rho);
    const double radius = m.zero_rate_radius();
    const std::size_t L = hp.size();
    const double estimate = sphere_point_estimate(L, radius);
    if (estimate > static_cast<double>(budget))
        throw EnumerationTooLargeError("bruteforce: sphere too large to enumerate", estimate);

    std::vector<std::int64_t> z(2 * L, 0);
    GaussVec a(L), best;
    double best_value = std::numeric_limits<double>::infinity();
    std::uint64_t ops = 0;

    // Coordinates visited in the order Re a_1, Im a_1, Re a_2, ...
    std::function<void(std::size_t, double)> walk = [&](std::size_t pos, double remaining) {
        if (pos == 2 * L) {
            for (std::size_t l = 0; l < L; ++l) a[l] = {z[2 * l], z[2 * l + 1]};
            if (is_zero(a)) return;
            ++ops;
            const double v = m.quadratic(a);
            if (v < best_value - detail::kTieTolerance ||
                (std::fabs(v - best_value) <= detail::kTieTolerance && lex_less(a, best))) {
                best_value = std::min(best_value, v);
                best = a;
            }
            return;
        }
        auto bound = static_cast<std::int64_t>(std::floor(std::sqrt(remaining)));
        while (bound >= 0 && static_cast<double>(bound * bound) >= remaining) --bound;
        for (std::int64_t x = -bound; x <= bound; ++x) {
            z[pos] = x;
            walk(pos + 1, remaining - static_cast<double>(x * x));
        }
        z[pos] = 0;
    };
    walk(0, radius);
    if (best.empty()) throw SearchFailureError("bruteforce: no nonzero candidate inside the sphere");
    return detail::finish(hp, rho, std::move(best), ops);
}

// ---------------------------------------------------------------------------
// Exact enumeration

/// Minimum of a M a^H over nonzero a in Z[i]^L for a generic Hermitian positive definite M.
struct FormMinimum {
    GaussVec a;
    double value = 0.0;
    std::uint64_t nodes = 0;
};

inline FormMinimum sphere_min(const Eigen::MatrixXcd& m, std::uint64_t budget = kDefaultSearchBudget) {
    const Eigen::MatrixXd g = real_embedding(m);
    double radius = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m.rows(); ++i) radius = std::min(radius, m(i, i).real());
    detail::Enumerator e(g, radius, budget, nullptr);
    e.run();
    if (!e.found()) throw NumericError("sphere_min: no lattice point inside the initial radius");
    FormMinimum out;
    out.a = detail::to_gauss(e.best());
    out.a = times_unit(out.a, canonical_unit(out.a));
    const Eigen::VectorXd v = real_embedding(out.a);
    out.value = v.dot(g * v);
    out.nodes = e.nodes();
    return out;
}

/// Exact optimum for a Gram form, starting from the radius 1 + rho||h||^2.
inline SearchResult sphere_min(const GramForm& m, std::uint64_t budget = kDefaultSearchBudget) {
    detail::Enumerator e(real_embedding(m), m.zero_rate_radius(), budget, nullptr);
    e.run();
    if (!e.found()) throw NumericError("sphere_min: no lattice point inside the zero-rate radius");
    return detail::finish(m.channel(), m.rho(), detail::to_gauss(e.best()), e.nodes());
}

// ---------------------------------------------------------------------------
// LLL

struct LllReduction {
    Eigen::MatrixXd basis;        ///< reduced rows
    detail::IntMatrix transform;  ///< unimodular T with basis = T * input
    std::uint64_t swaps = 0;
};

/// Textbook LLL on the rows of `basis` with Lovasz parameter delta.
inline LllReduction lll_reduce(Eigen::MatrixXd basis, double delta = 0.75) {
    if (!(delta > 0.25 && delta <= 1.0)) throw InvalidParameterError("lll_reduce: delta must be in (1/4, 1]");
    const Eigen::Index n = basis.rows();
    LllReduction out;
    out.transform = detail::IntMatrix::Identity(n, n);
    Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd bstar_sq(n);

    auto gram_schmidt = [&] {
        Eigen::MatrixXd bstar = basis;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < i; ++j) {
                mu(i, j) = basis.row(i).dot(bstar.row(j)) / bstar_sq(j);
                bstar.row(i) -= mu(i, j) * bstar.row(j);
            }
            bstar_sq(i) = bstar.row(i).squaredNorm();
            if (!(bstar_sq(i) > 0.0)) throw NumericError("lll_reduce: basis rows are linearly dependent");
        }
    };
    gram_schmidt();

    Eigen::Index k = 1;
    std::uint64_t guard = 0;
    while (k < n) {
        if (++guard > 10'000'000) throw NumericError("lll_reduce: no convergence");
        for (Eigen::Index j = k - 1; j >= 0; --j) {
            const double q = std::round(mu(k, j));
            if (q == 0.0) continue;
            basis.row(k) -= q * basis.row(j);
            out.transform.row(k) -= static_cast<std::int64_t>(q) * out.transform.row(j);
            for (Eigen::Index i = 0; i < j; ++i) mu(k, i) -= q * mu(j, i);
            mu(k, j) -= q;
        }
        if (bstar_sq(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * bstar_sq(k - 1)) {
            ++k;
        } else {
            basis.row(k).swap(basis.row(k - 1));
            out.transform.row(k).swap(out.transform.row(k - 1));
            ++out.swaps;
            gram_schmidt();
            k = std::max<Eigen::Index>(k - 1, 1);
        }
    }
    out.basis = std::move(basis);
    return out;
}

/// Cholesky rows of the real form (M~ = B B^T), reduced by LLL.
inline LllReduction reduce_gram_basis(const GramForm& m, double delta = 0.75) {
    Eigen::LLT<Eigen::MatrixXd> llt(real_embedding(m));
    if (llt.info() != Eigen::Success) throw NumericError("Cholesky factorization failed: form is not positive definite");
    return lll_reduce(llt.matrixL(), delta);
}

inline SearchResult lll_assisted(const GramForm& m, std::uint64_t budget = kDefaultSearchBudget, double delta = 0.75) {
    const LllReduction red = reduce_gram_basis(m, delta);
    const Eigen::MatrixXd g = red.basis * red.basis.transpose();

    Eigen::Index shortest = 0;
    for (Eigen::Index i = 1; i < g.rows(); ++i)
        if (g(i, i) < g(shortest, shortest)) shortest = i;

    detail::Enumerator e(g, g(shortest, shortest), budget, &red.transform);
    std::vector<std::int64_t> unit(static_cast<std::size_t>(g.rows()), 0);
    unit[static_cast<std::size_t>(shortest)] = 1;
    e.seed(unit, g(shortest, shortest));
    e.run();
    return detail::finish(m.channel(), m.rho(), detail::to_gauss(e.best()), e.nodes());
}

// ---------------------------------------------------------------------------
// Joint search over coefficients and phases
//
// With the best phases for a given a the loss only sees the moduli m_l = |a_l|:
// s * (m^T G m) with G = I - rho/s |h||h|^T and s = 1 + rho||h||^2. The moduli
// range over {sqrt(n) : n a sum of two squares}, so the same depth-first
// enumeration runs over that set instead of the integers.

inline constexpr std::uint64_t kMaxModulusTable = 50'000'000;

struct JointOptimum {
    GaussVec a;         ///< one Gaussian integer per modulus, x + iy with x >= y >= 0
    double form_value;  ///< loss / (1 + rho||h||^2); the precoded rate is -log2 of it
    std::uint64_t ops_count;
};

namespace detail {

class ModulusEnumerator {
public:
    ModulusEnumerator(std::span<const cplx> h, double rho, double radius, std::uint64_t budget)
        : n_(static_cast<Eigen::Index>(h.size())), rho_(rho), radius_(radius), budget_(budget), idx_(h.size(), 0) {
        for (auto z : h) r_.push_back(std::abs(z));
        s_ = 1.0 + rho * norm2(h);
        const Eigen::Map<const Eigen::VectorXd> r(r_.data(), n_);
        const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n_, n_) - (rho / s_) * r * r.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt(g);
        if (llt.info() != Eigen::Success) throw NumericError("modulus form is not positive definite");
        u_ = llt.matrixU();

        // ||m||^2 <= s * value since the smallest eigenvalue of G is 1/s.
        const double limit = std::floor(s_ * radius * (1.0 + 1e-9)) + 1.0;
        if (!(limit <= static_cast<double>(kMaxModulusTable)))
            throw EnumerationTooLargeError("modulus table too large", limit);
        build_table(static_cast<std::int64_t>(limit));
    }

    void run() { descend(n_ - 1, 0.0); }
    bool found() const { return found_; }
    double best_value() const { return best_value_; }
    std::uint64_t nodes() const { return nodes_; }

    GaussVec best() const {
        GaussVec a;
        for (auto k : best_) a.push_back(reps_[k]);
        return a;
    }

private:
    void build_table(std::int64_t limit) {
        std::vector<std::int32_t> first(static_cast<std::size_t>(limit) + 1, -1);  // smallest y per n
        for (std::int64_t x = 0; x * x <= limit; ++x)
            for (std::int64_t y = 0; y <= x && x * x + y * y <= limit; ++y) {
                auto& f = first[static_cast<std::size_t>(x * x + y * y)];
                if (f < 0) f = static_cast<std::int32_t>(y);
            }
        for (std::int64_t n = 0; n <= limit; ++n) {
            const std::int32_t y = first[static_cast<std::size_t>(n)];
            if (y < 0) continue;
            const auto x = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n - std::int64_t{y} * y))));
            moduli_.push_back(std::sqrt(static_cast<double>(n)));
            norms_.push_back(n);
            reps_.push_back({x, y});
        }
    }

    // Exact loss / s from integer norms, via the Lagrange identity.
    double value() const {
        double sq = 0.0, mis = 0.0;
        for (Eigen::Index i = 0; i < n_; ++i) {
            sq += static_cast<double>(norms_[idx_[i]]);
            for (Eigen::Index j = i + 1; j < n_; ++j) {
                const double d = r_[i] * moduli_[idx_[j]] - r_[j] * moduli_[idx_[i]];
                mis += d * d;
            }
        }
        return (sq + rho_ * mis) / s_;
    }

    void leaf() {
        if (std::all_of(idx_.begin(), idx_.end(), [](std::size_t k) { return k == 0; })) return;
        const double v = value();
        const bool better = !found_ || v < best_value_ - kTieTolerance;
        const bool tie = found_ && std::fabs(v - best_value_) <= kTieTolerance && lex_less(candidate(), best());
        if (!better && !tie) return;
        if (better) best_value_ = v;
        best_ = idx_;
        found_ = true;
        radius_ = std::min(radius_, best_value_);
    }

    GaussVec candidate() const {
        GaussVec a;
        for (auto k : idx_) a.push_back(reps_[k]);
        return a;
    }

    void visit(Eigen::Index i, std::size_t k, double partial) {
        idx_[i] = k;
        if (i == 0)
            leaf();
        else
            descend(i - 1, partial);
    }

    void descend(Eigen::Index i, double partial) {
        if (++nodes_ > budget_)
            throw EnumerationTooLargeError("modulus enumeration exceeded its node budget", static_cast<double>(nodes_));
        double center = 0.0;
        for (Eigen::Index j = i + 1; j < n_; ++j) center -= u_(i, j) * moduli_[idx_[j]];
        center /= u_(i, i);

        // Walk outward from the center through the sorted moduli, nearest first.
        const auto mid = std::lower_bound(moduli_.begin(), moduli_.end(), center) - moduli_.begin();
        std::ptrdiff_t up = mid, down = mid - 1;
        const auto size = static_cast<std::ptrdiff_t>(moduli_.size());
        auto cost = [&](std::ptrdiff_t k) {
            const double gap = u_(i, i) * (moduli_[static_cast<std::size_t>(k)] - center);
            return partial + gap * gap;
        };
        while (true) {
            const double cu = up < size ? cost(up) : INFINITY;
            const double cd = down >= 0 ? cost(down) : INFINITY;
            const bool take_up = cu <= cd;
            const double d = take_up ? cu : cd;
            if (d > radius_ + kTieTolerance) break;
            visit(i, static_cast<std::size_t>(take_up ? up++ : down--), d);
        }
        idx_[i] = 0;
    }

    Eigen::Index n_;
    double rho_, s_ = 1.0, radius_;
    std::uint64_t budget_;
    std::vector<double> r_;
    Eigen::MatrixXd u_;
    std::vector<double> moduli_;
    std::vector<std::int64_t> norms_;
    std::vector<GaussInt> reps_;
    std::vector<std::size_t> idx_, best_;
    double best_value_ = std::numeric_limits<double>::infinity();
    bool found_ = false;
    std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Exact maximizer of the optimally precoded rate over nonzero a with value
/// at most `radius` (1 always admits a unit vector). Empty if nothing qualifies.
inline std::optional<JointOptimum> joint_search(std::span<const cplx> h, double rho, double radius = 1.0,
                                                std::uint64_t budget = kDefaultSearchBudget) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidParameterError("joint_search: rho must be positive");
    if (h.empty()) throw DimensionError("joint_search: empty channel");
    if (!all_finite(h)) throw InvalidInputError("non-finite channel entry");
    detail::ModulusEnumerator e(h, rho, radius, budget);
    e.run();
    if (!e.found()) return std::nullopt;
    return JointOptimum{e.best(), e.best_value(), e.nodes()};
}

// ---------------------------------------------------------------------------

/// Runs the configured searcher on the precoded channel h Phi.
inline SearchResult search(std::span<const cplx> h, const Precoder& p, double rho, const SearchConfig& cfg) {
    cfg.validate();
    switch (cfg.searcher) {
        case Searcher::qes: return qes(h, p, rho, cfg);
        case Searcher::bruteforce: return bruteforce(h, p, rho, cfg.budget());
        case Searcher::sphere: return sphere_min(gram_form(apply_precoder(h, p), rho), cfg.budget());
        case Searcher::lll: return lll_assisted(gram_form(apply_precoder(h, p), rho), cfg.budget());
    }
    throw ConfigError("unknown searcher");
}

}  // namespace ppcof
