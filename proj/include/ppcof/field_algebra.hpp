#pragma once

// Exact arithmetic in F_{p^2} = F_p[i] for primes p = 3 (mod 4), and
// destination-side recovery of the L messages from L relay equations.

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "ppcof/lattice_core.hpp"

namespace ppcof {

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::int64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

/// Throws unless Z[i]/pZ[i] is a field of order p^2.
inline void require_field_prime(std::int64_t p) {
    if (!is_prime(p) || p % 4 != 3)
        throw InvalidFieldError("p = " + std::to_string(p) + " must be a prime congruent to 3 mod 4");
    if (p > (std::int64_t{1} << 30)) throw InvalidFieldError("p too large for 64-bit products");
}

/// Element re + im*i of F_p[i]. Canonical representatives in [0, p).
class Fp2 {
public:
    Fp2() = default;
    Fp2(std::int64_t re, std::int64_t im, std::int64_t p) : re_(reduce(re, p)), im_(reduce(im, p)), p_(p) {}

    static Fp2 zero(std::int64_t p) { return {0, 0, p}; }
    static Fp2 one(std::int64_t p) { return {1, 0, p}; }

    std::int64_t re() const { return re_; }
    std::int64_t im() const { return im_; }
    std::int64_t prime() const { return p_; }
    bool is_zero() const { return re_ == 0 && im_ == 0; }

    friend Fp2 operator+(const Fp2& x, const Fp2& y) { return {x.re_ + y.re_, x.im_ + y.im_, same(x, y)}; }
    friend Fp2 operator-(const Fp2& x, const Fp2& y) { return {x.re_ - y.re_, x.im_ - y.im_, same(x, y)}; }
    friend Fp2 operator-(const Fp2& x) { return {-x.re_, -x.im_, x.p_}; }
    friend Fp2 operator*(const Fp2& x, const Fp2& y) {
        const std::int64_t p = same(x, y);
        return {x.re_ * y.re_ % p - x.im_ * y.im_ % p, x.re_ * y.im_ % p + x.im_ * y.re_ % p, p};
    }
    Fp2& operator+=(const Fp2& y) { return *this = *this + y; }
    Fp2& operator-=(const Fp2& y) { return *this = *this - y; }
    Fp2& operator*=(const Fp2& y) { return *this = *this * y; }
    friend bool operator==(const Fp2& x, const Fp2& y) { return x.re_ == y.re_ && x.im_ == y.im_ && x.p_ == y.p_; }

    /// (a + bi)^{-1} = (a - bi) / (a^2 + b^2); the norm is nonzero because -1 is a non-residue mod p.
    Fp2 inverse() const {
        if (is_zero()) throw std::domain_error("Fp2: inverse of zero");
        const std::int64_t n = (re_ * re_ + im_ * im_) % p_;
        const std::int64_t n_inv = pow_mod(n, p_ - 2, p_);
        return {re_ * n_inv, -im_ * n_inv, p_};
    }

    friend std::ostream& operator<<(std::ostream& os, const Fp2& x) { return os << x.re_ << "+" << x.im_ << "i"; }

private:
    static std::int64_t reduce(std::int64_t v, std::int64_t p) {
        std::int64_t r = v % p;
        return r < 0 ? r + p : r;
    }
    static std::int64_t same(const Fp2& x, const Fp2& y) {
        if (x.p_ != y.p_) throw InvalidFieldError("Fp2: operands from different fields");
        return x.p_;
    }
    static std::int64_t pow_mod(std::int64_t b, std::int64_t e, std::int64_t m) {
        std::int64_t r = 1;
        b %= m;
        while (e > 0) {
            if (e & 1) r = r * b % m;
            b = b * b % m;
            e >>= 1;
        }
        return r;
    }

    std::int64_t re_ = 0;
    std::int64_t im_ = 0;
    std::int64_t p_ = 3;
};

using Fp2Vec = std::vector<Fp2>;
using Fp2Matrix = std::vector<Fp2Vec>;  ///< row-major

inline Fp2 to_field(GaussInt g, std::int64_t p) { return {g.re, g.im, p}; }

/// Componentwise (Re a mod p, Im a mod p).
inline Fp2Vec reduce_coeffs(std::span<const GaussInt> a, std::int64_t p) {
    require_field_prime(p);
    Fp2Vec out;
    out.reserve(a.size());
    for (auto g : a) out.push_back(to_field(g, p));
    return out;
}

/// A * W = C: A is L x L, each row of C (and of the solution W) a length-n message.
struct EquationSystem {
    Fp2Matrix coefficients;
    Fp2Matrix rhs;

    void validate() const {
        const std::size_t L = coefficients.size();
        if (L == 0) throw DimensionError("EquationSystem: no equations");
        if (rhs.size() != L) throw DimensionError("EquationSystem: right-hand side count differs from equation count");
        const std::int64_t p = coefficients[0].empty() ? 0 : coefficients[0][0].prime();
        for (const auto& row : coefficients) {
            if (row.size() != L) throw DimensionError("EquationSystem: coefficient matrix is not square");
            for (const auto& x : row)
                if (x.prime() != p) throw InvalidFieldError("EquationSystem: mixed fields");
        }
        const std::size_t n = rhs[0].size();
        for (const auto& row : rhs) {
            if (row.size() != n) throw DimensionError("EquationSystem: ragged right-hand side");
            for (const auto& x : row)
                if (x.prime() != p) throw InvalidFieldError("EquationSystem: mixed fields");
        }
    }
};

namespace detail {

// Forward elimination with first-nonzero pivoting; returns the determinant and
// leaves `m` (and `rhs`, if given) in reduced row-echelon form when nonsingular.
inline Fp2 eliminate(Fp2Matrix& m, Fp2Matrix* rhs) {
    const std::size_t L = m.size();
    const std::int64_t p = m[0][0].prime();
    Fp2 det = Fp2::one(p);
    for (std::size_t col = 0; col < L; ++col) {
        std::size_t pivot = col;
        while (pivot < L && m[pivot][col].is_zero()) ++pivot;
        if (pivot == L) return Fp2::zero(p);
        if (pivot != col) {
            std::swap(m[pivot], m[col]);
            if (rhs) std::swap((*rhs)[pivot], (*rhs)[col]);
            det = -det;
        }
        det *= m[col][col];
        const Fp2 inv = m[col][col].inverse();
        for (auto& x : m[col]) x *= inv;
        if (rhs)
            for (auto& x : (*rhs)[col]) x *= inv;
        for (std::size_t r = 0; r < L; ++r) {
            if (r == col || m[r][col].is_zero()) continue;
            const Fp2 f = m[r][col];
            for (std::size_t c = col; c < L; ++c) m[r][c] -= f * m[col][c];
            if (rhs)
                for (std::size_t c = 0; c < (*rhs)[r].size(); ++c) (*rhs)[r][c] -= f * (*rhs)[col][c];
        }
    }
    return det;
}

}  // namespace detail

inline Fp2 determinant(Fp2Matrix m) {
    if (m.empty() || m[0].size() != m.size()) throw DimensionError("determinant: matrix must be square and nonempty");
    return detail::eliminate(m, nullptr);
}

/// Messages W with A W = C, or nullopt when A is singular.
inline std::optional<Fp2Matrix> solve(const EquationSystem& system) {
    system.validate();
    Fp2Matrix m = system.coefficients;
    Fp2Matrix w = system.rhs;
    if (detail::eliminate(m, &w).is_zero()) return std::nullopt;
    return w;
}

inline Fp2Matrix multiply(const Fp2Matrix& a, const Fp2Matrix& b) {
    if (a.empty() || b.empty() || a[0].size() != b.size()) throw DimensionError("multiply: inner dimensions differ");
    const std::int64_t p = a[0][0].prime();
    Fp2Matrix out(a.size(), Fp2Vec(b[0].size(), Fp2::zero(p)));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            for (std::size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

inline Fp2 random_fp2(std::int64_t p, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::int64_t> u(0, p - 1);
    const std::int64_t re = u(rng);
    return {re, u(rng), p};
}

inline Fp2Matrix random_matrix(std::size_t rows, std::size_t cols, std::int64_t p, std::mt19937_64& rng) {
    Fp2Matrix m(rows, Fp2Vec(cols));
    for (auto& row : m)
        for (auto& x : row) x = random_fp2(p, rng);
    return m;
}

/// Fraction of uniformly random L x L matrices over F_{p^2} that are singular.
inline double singularity_rate(std::size_t users, std::int64_t p, std::uint64_t trials, std::uint64_t seed) {
    require_field_prime(p);
    if (users == 0) throw InvalidParameterError("singularity_rate: L must be >= 1");
    if (trials == 0) throw InvalidParameterError("singularity_rate: trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::uint64_t singular = 0;
    for (std::uint64_t t = 0; t < trials; ++t)
        if (determinant(random_matrix(users, users, p, rng)).is_zero()) ++singular;
    return static_cast<double>(singular) / static_cast<double>(trials);
}

/// 1 - prod_{k=1}^{L} (1 - q^{-k}) with q = p^2.
inline double singular_fraction_exact(std::size_t users, std::int64_t p) {
    const double q = static_cast<double>(p) * static_cast<double>(p);
    double nonsingular = 1.0;
    for (std::size_t k = 1; k <= users; ++k) nonsingular *= 1.0 - std::pow(q, -static_cast<double>(k));
    return 1.0 - nonsingular;
}

}  // namespace ppcof
