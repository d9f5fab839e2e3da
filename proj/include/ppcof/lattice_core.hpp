#pragma once

// Complex vectors, Gaussian integers, nearest-point quantization onto Z[i]^n
// and reduction modulo the scaled lattice pZ[i]^n.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include "ppcof/errors.hpp"

namespace ppcof {

using cplx = std::complex<double>;
using CplxVec = std::vector<cplx>;

/// Element of Z[i]. Arithmetic is exact for operands well inside the int64 range.
struct GaussInt {
    std::int64_t re = 0;
    std::int64_t im = 0;

    constexpr GaussInt() = default;
    constexpr GaussInt(std::int64_t r, std::int64_t i = 0) : re(r), im(i) {}

    constexpr bool is_zero() const { return re == 0 && im == 0; }
    constexpr std::int64_t norm() const { return re * re + im * im; }
    constexpr GaussInt conj() const { return {re, -im}; }
    cplx to_complex() const { return {static_cast<double>(re), static_cast<double>(im)}; }

    friend constexpr GaussInt operator+(GaussInt a, GaussInt b) { return {a.re + b.re, a.im + b.im}; }
    friend constexpr GaussInt operator-(GaussInt a, GaussInt b) { return {a.re - b.re, a.im - b.im}; }
    friend constexpr GaussInt operator-(GaussInt a) { return {-a.re, -a.im}; }
    friend constexpr GaussInt operator*(GaussInt a, GaussInt b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    constexpr GaussInt& operator+=(GaussInt b) { return *this = *this + b; }
    constexpr GaussInt& operator-=(GaussInt b) { return *this = *this - b; }
    friend constexpr bool operator==(GaussInt, GaussInt) = default;

    friend std::ostream& operator<<(std::ostream& os, GaussInt g) {
        return os << g.re << (g.im < 0 ? "-" : "+") << (g.im < 0 ? -g.im : g.im) << "i";
    }
};

using GaussVec = std::vector<GaussInt>;

/// One of the four units of Z[i], stored as the exponent k of i^k.
enum class GaussUnit : std::uint8_t { one = 0, i = 1, minus_one = 2, minus_i = 3 };

constexpr GaussUnit unit_from_power(int k) { return static_cast<GaussUnit>(((k % 4) + 4) % 4); }

constexpr GaussInt unit_value(GaussUnit u) {
    switch (u) {
        case GaussUnit::one: return {1, 0};
        case GaussUnit::i: return {0, 1};
        case GaussUnit::minus_one: return {-1, 0};
        case GaussUnit::minus_i: return {0, -1};
    }
    return {1, 0};
}

constexpr GaussUnit conj(GaussUnit u) { return unit_from_power(-static_cast<int>(u)); }

inline double unit_arg(GaussUnit u) { return static_cast<int>(u) * (std::numbers::pi / 2.0); }

// ---------------------------------------------------------------------------
// Vector helpers

inline bool is_zero(std::span<const GaussInt> a) {
    for (auto g : a)
        if (!g.is_zero()) return false;
    return true;
}

inline double norm2(std::span<const cplx> v) {
    double s = 0.0;
    for (auto z : v) s += std::norm(z);
    return s;
}

inline std::int64_t norm2(std::span<const GaussInt> a) {
    std::int64_t s = 0;
    for (auto g : a) s += g.norm();
    return s;
}

inline CplxVec to_complex(std::span<const GaussInt> a) {
    CplxVec out;
    out.reserve(a.size());
    for (auto g : a) out.push_back(g.to_complex());
    return out;
}

/// sum_l a_l * conj(h_l), i.e. a h^H for row vectors.
inline cplx inner(std::span<const GaussInt> a, std::span<const cplx> h) {
    if (a.size() != h.size()) throw DimensionError("inner: length mismatch");
    cplx s{0.0, 0.0};
    for (std::size_t l = 0; l < a.size(); ++l) s += a[l].to_complex() * std::conj(h[l]);
    return s;
}

inline bool all_finite(std::span<const cplx> v) {
    for (auto z : v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Quantization

namespace detail {

// Largest magnitude we round into an int64 without risking overflow in later sums.
inline constexpr double kQuantizeLimit = 4.0e15;

inline std::int64_t round_axis(double x) {
    if (!std::isfinite(x)) throw InvalidInputError("quantize_zi: non-finite input");
    if (std::fabs(x) > kQuantizeLimit) throw InvalidInputError("quantize_zi: input magnitude out of range");
    return static_cast<std::int64_t>(std::round(x));  // half away from zero
}

}  // namespace detail

/// Nearest Gaussian integer, rounding each axis half away from zero.
inline GaussInt quantize_zi(cplx z) { return {detail::round_axis(z.real()), detail::round_axis(z.imag())}; }

inline GaussVec quantize_zi(std::span<const cplx> v) {
    GaussVec out;
    out.reserve(v.size());
    for (auto z : v) out.push_back(quantize_zi(z));
    return out;
}

/// v mod pZ[i]^n = v - p * Q(v / p). Each axis of the result lies in [-p/2, p/2].
inline CplxVec mod_lattice(std::span<const cplx> v, std::int64_t p) {
    if (p < 2) throw InvalidParameterError("mod_lattice: scale p must be >= 2");
    const double scale = static_cast<double>(p);
    CplxVec out;
    out.reserve(v.size());
    for (auto z : v) {
        const GaussInt q = quantize_zi(z / scale);
        out.push_back(z - scale * q.to_complex());
    }
    return out;
}

/// Exact centered residue of an integer modulo odd p, in [-(p-1)/2, (p-1)/2].
inline std::int64_t centered_mod(std::int64_t x, std::int64_t p) {
    std::int64_t r = x % p;
    if (r < 0) r += p;
    if (r > p / 2) r -= p;
    return r;
}

inline GaussInt centered_mod(GaussInt g, std::int64_t p) { return {centered_mod(g.re, p), centered_mod(g.im, p)}; }

// ---------------------------------------------------------------------------
// Polar form

struct Polar {
    double modulus = 0.0;
    double phase = 0.0;  ///< in (-pi, pi]; 0 for a zero entry
};

inline Polar polar(cplx z) {
    if (z == cplx{0.0, 0.0}) return {0.0, 0.0};
    double phase = std::arg(z);
    if (phase <= -std::numbers::pi) phase = std::numbers::pi;  // arg(-x - 0i) = -pi
    return {std::abs(z), phase};
}

inline std::vector<Polar> polar(std::span<const cplx> v) {
    std::vector<Polar> out;
    out.reserve(v.size());
    for (auto z : v) out.push_back(polar(z));
    return out;
}

inline std::vector<Polar> polar(std::span<const GaussInt> a) {
    std::vector<Polar> out;
    out.reserve(a.size());
    for (auto g : a) out.push_back(polar(g.to_complex()));
    return out;
}

}  // namespace ppcof
