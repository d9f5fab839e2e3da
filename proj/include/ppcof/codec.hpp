#pragma once

// Construction-A lattice code Lambda/Lambda' with Lambda = beta Z[i]^n and
// Lambda' = beta p Z[i]^n (k = n, full rate). Codewords are the centered
// residues of the F_p[i] message scaled by beta.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ppcof/field_algebra.hpp"
#include "ppcof/lattice_core.hpp"

namespace ppcof {

enum class PowerNormalization {
    average,  ///< beta^2 E|residue|^2 = rho over uniform messages
    peak,     ///< every symbol, hence every codeword, within the power budget
};

class LatticeCode {
public:
    LatticeCode(std::size_t block_length, std::int64_t prime, double beta) : n_(block_length), p_(prime), beta_(beta) {
        require_field_prime(p_);
        if (n_ == 0) throw InvalidParameterError("LatticeCode: block length must be >= 1");
        if (!(beta_ > 0.0) || !std::isfinite(beta_)) throw InvalidParameterError("LatticeCode: beta must be positive");
    }

    /// Scales the code so that symbols carry power rho under the chosen normalization.
    static LatticeCode for_snr(std::size_t block_length, std::int64_t prime, double rho,
                               PowerNormalization norm = PowerNormalization::average) {
        if (!(rho > 0.0)) throw InvalidParameterError("LatticeCode: rho must be positive");
        require_field_prime(prime);
        const double energy = norm == PowerNormalization::average ? average_residue_energy(prime)
                                                                  : peak_residue_energy(prime);
        return {block_length, prime, std::sqrt(rho / energy)};
    }

    /// E|r|^2 for r uniform on the centered residues: 2 (p^2 - 1) / 12.
    static double average_residue_energy(std::int64_t p) {
        const double pd = static_cast<double>(p);
        return (pd * pd - 1.0) / 6.0;
    }

    /// max |r|^2 = 2 ((p - 1) / 2)^2.
    static double peak_residue_energy(std::int64_t p) {
        const double half = static_cast<double>(p - 1) / 2.0;
        return 2.0 * half * half;
    }

    std::size_t block_length() const { return n_; }
    std::int64_t prime() const { return p_; }
    double beta() const { return beta_; }

    /// Largest squared norm of any codeword.
    double max_codeword_energy() const { return static_cast<double>(n_) * beta_ * beta_ * peak_residue_energy(p_); }

private:
    std::size_t n_;
    std::int64_t p_;
    double beta_;
};

/// Symbol vector over F_p[i], each part represented in [0, p).
using Message = GaussVec;

inline CplxVec encode(std::span<const GaussInt> w, const LatticeCode& code) {
    if (w.size() != code.block_length())
        throw DimensionError("encode: message length " + std::to_string(w.size()) + " != block length " +
                             std::to_string(code.block_length()));
    const std::int64_t p = code.prime();
    CplxVec x;
    x.reserve(w.size());
    for (auto s : w) {
        if (s.re < 0 || s.re >= p || s.im < 0 || s.im >= p)
            throw InvalidSymbolError("encode: symbol outside [0, p) on some axis");
        x.push_back(code.beta() * centered_mod(s, p).to_complex());
    }
    return x;
}

/// Point of Lambda/Lambda' for the integer combination a, stored as centered residues.
struct EquationEstimate {
    GaussVec a;
    GaussVec residues;
    double beta = 1.0;
    std::int64_t prime = 3;

    CplxVec point() const {
        CplxVec out;
        out.reserve(residues.size());
        for (auto r : residues) out.push_back(beta * r.to_complex());
        return out;
    }

    /// The same point as a vector over F_p[i].
    Fp2Vec field_symbols() const {
        Fp2Vec out;
        out.reserve(residues.size());
        for (auto r : residues) out.push_back(to_field(r, prime));
        return out;
    }
};

/// c_hat = Q_Lambda(alpha y) mod Lambda'.
inline EquationEstimate relay_decode(std::span<const cplx> y, cplx alpha, std::span<const GaussInt> a,
                                     const LatticeCode& code) {
    if (y.size() != code.block_length()) throw DimensionError("relay_decode: received block has the wrong length");
    if (!all_finite(y)) throw InvalidInputError("relay_decode: non-finite received sample");
    CplxVec lattice_units;
    lattice_units.reserve(y.size());
    for (auto s : y) lattice_units.push_back(quantize_zi(alpha * s / code.beta()).to_complex());
    const CplxVec reduced = mod_lattice(lattice_units, code.prime());

    EquationEstimate est;
    est.a.assign(a.begin(), a.end());
    est.residues = quantize_zi(reduced);
    est.beta = code.beta();
    est.prime = code.prime();
    return est;
}

/// c = (sum_l a_l x_l) mod Lambda', computed on integer residues.
inline EquationEstimate true_equation(const std::vector<CplxVec>& codewords, std::span<const GaussInt> a,
                                      const LatticeCode& code) {
    if (codewords.size() != a.size()) throw DimensionError("true_equation: one coefficient per codeword required");
    const std::size_t n = code.block_length();
    GaussVec sum(n);
    for (std::size_t l = 0; l < codewords.size(); ++l) {
        if (codewords[l].size() != n) throw DimensionError("true_equation: codeword has the wrong length");
        for (std::size_t k = 0; k < n; ++k) sum[k] += a[l] * quantize_zi(codewords[l][k] / code.beta());
    }
    EquationEstimate est;
    est.a.assign(a.begin(), a.end());
    est.residues.reserve(n);
    for (auto s : sum) est.residues.push_back(centered_mod(s, code.prime()));
    est.beta = code.beta();
    est.prime = code.prime();
    return est;
}

/// True iff the decoded combination differs from the transmitted one in any coordinate.
inline bool equation_error(const EquationEstimate& est, const EquationEstimate& truth) {
    if (est.a != truth.a) throw InvalidComparisonError("equation_error: estimates are for different coefficient vectors");
    if (est.residues.size() != truth.residues.size()) throw DimensionError("equation_error: block lengths differ");
    return est.residues != truth.residues;
}

}  // namespace ppcof
