#pragma once

// Computation rates of compute-and-forward with and without phase precoding.
// All rates are in bits per complex channel use.

#include <algorithm>
#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "ppcof/lattice_core.hpp"
#include "ppcof/phase_opt.hpp"

namespace ppcof {

using ChannelVec = CplxVec;

inline double log2_plus(double x) { return std::max(0.0, std::log2(x)); }

namespace detail {

inline void require_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidParameterError("rho must be a positive finite SNR");
}

inline void require_same_length(std::span<const cplx> h, std::span<const GaussInt> a) {
    if (h.size() != a.size())
        throw DimensionError("channel has " + std::to_string(h.size()) + " users but a has " +
                             std::to_string(a.size()) + " entries");
}

// ||h||^2 ||a||^2 - |<a,h>|^2 written as a sum of squares (Lagrange identity), so
// it stays nonnegative and free of cancellation when a is nearly parallel to h.
inline double misalignment(std::span<const cplx> h, std::span<const GaussInt> a) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = i + 1; j < h.size(); ++j)
            s += std::norm(h[i] * a[j].to_complex() - h[j] * a[i].to_complex());
    return s;
}

// Same with every entry replaced by its modulus: the misalignment left after optimal phase precoding.
inline double modulus_misalignment(std::span<const cplx> h, std::span<const GaussInt> a) {
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = i + 1; j < h.size(); ++j) {
            const double d = std::abs(h[i]) * std::sqrt(static_cast<double>(a[j].norm())) -
                             std::abs(h[j]) * std::sqrt(static_cast<double>(a[i].norm()));
            s += d * d;
        }
    return s;
}

}  // namespace detail

/// M = I - rho/(1 + rho||h||^2) h^H h for a row vector h.
///
/// Positive definite with eigenvalues 1 (multiplicity L-1) and 1/(1+rho||h||^2).
class GramForm {
public:
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    double rho() const { return rho_; }
    const ChannelVec& channel() const { return channel_; }
    std::size_t size() const { return channel_.size(); }
    double channel_norm2() const { return norm2(channel_); }

    /// Squared-radius bound: any a with ||a||^2 >= 1 + rho||h||^2 has zero rate.
    double zero_rate_radius() const { return 1.0 + rho_ * channel_norm2(); }

    /// a M a^H, evaluated as (||a||^2 + rho * misalignment) / (1 + rho||h||^2).
    double quadratic(std::span<const GaussInt> a) const {
        detail::require_same_length(channel_, a);
        return (static_cast<double>(norm2(a)) + rho_ * detail::misalignment(channel_, a)) / zero_rate_radius();
    }

    /// a M a^H summed entry by entry over the stored matrix.
    double quadratic_direct(std::span<const GaussInt> a) const {
        detail::require_same_length(channel_, a);
        cplx s{0.0, 0.0};
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j)
                s += a[i].to_complex() * matrix_(i, j) * std::conj(a[j].to_complex());
        return s.real();
    }

    friend GramForm gram_form(std::span<const cplx> h, double rho);

private:
    Eigen::MatrixXcd matrix_;
    double rho_ = 0.0;
    ChannelVec channel_;
};

inline GramForm gram_form(std::span<const cplx> h, double rho) {
    detail::require_rho(rho);
    if (h.empty()) throw DimensionError("gram_form: empty channel");
    if (!all_finite(h)) throw InvalidInputError("gram_form: non-finite channel entry");
    const double hn = norm2(h);
    if (!(hn > 0.0)) throw InvalidParameterError("gram_form: channel must be nonzero");

    GramForm g;
    g.rho_ = rho;
    g.channel_.assign(h.begin(), h.end());
    const std::size_t L = h.size();
    const double c = rho / (1.0 + rho * hn);
    g.matrix_.resize(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
    for (std::size_t i = 0; i < L; ++i) {
        g.matrix_(i, i) = cplx{1.0 - c * std::norm(h[i]), 0.0};
        for (std::size_t j = i + 1; j < L; ++j) {
            const cplx v = -c * std::conj(h[i]) * h[j];
            g.matrix_(i, j) = v;
            g.matrix_(j, i) = std::conj(v);
        }
    }
    return g;
}

struct RateReport {
    double rate_bits = 0.0;
    cplx alpha{0.0, 0.0};
    double noise_energy = 0.0;  ///< Q(a, alpha) at the reported alpha
    double loss_term = 0.0;     ///< ||a||^2 + rho * (||h||^2 ||a||^2 - |<h,a>|^2)
};

/// rho * ||alpha h - a||^2 + |alpha|^2.
inline double noise_energy(std::span<const cplx> h, std::span<const GaussInt> a, cplx alpha, double rho) {
    detail::require_same_length(h, a);
    double s = 0.0;
    for (std::size_t l = 0; l < h.size(); ++l) s += std::norm(alpha * h[l] - a[l].to_complex());
    return rho * s + std::norm(alpha);
}

/// The alpha minimizing noise_energy: rho * sum_l a_l conj(h_l) / (1 + rho||h||^2).
inline cplx mmse_alpha(std::span<const cplx> h, std::span<const GaussInt> a, double rho) {
    detail::require_rho(rho);
    detail::require_same_length(h, a);
    if (is_zero(a)) throw ZeroCoefficientError();
    return rho * inner(a, h) / (1.0 + rho * norm2(h));
}

inline RateReport computation_rate(std::span<const cplx> h, std::span<const GaussInt> a, double rho) {
    const GramForm m = gram_form(h, rho);
    detail::require_same_length(h, a);
    if (is_zero(a)) throw ZeroCoefficientError();

    RateReport r;
    r.rate_bits = log2_plus(1.0 / m.quadratic(a));
    r.alpha = mmse_alpha(h, a, rho);
    r.noise_energy = noise_energy(h, a, r.alpha, rho);
    r.loss_term = static_cast<double>(norm2(a)) + rho * detail::misalignment(h, a);
    return r;
}

/// Rate when user l transmits e^{i phi_l} x_l and the relay decodes a.
inline RateReport pp_computation_rate(std::span<const cplx> h, const Precoder& phi, std::span<const GaussInt> a,
                                      double rho) {
    const ChannelVec hp = apply_precoder(h, phi);
    return computation_rate(hp, a, rho);
}

/// Rate of a under the optimal precoder: only the moduli |h_l|, |a_l| survive.
inline RateReport pp_rate_optimal_closed_form(std::span<const cplx> h, std::span<const GaussInt> a, double rho) {
    detail::require_rho(rho);
    detail::require_same_length(h, a);
    if (!all_finite(h)) throw InvalidInputError("non-finite channel entry");
    if (is_zero(a)) throw ZeroCoefficientError();

    const double hn = norm2(h);
    double aligned = 0.0;  // sum_l |h_l||a_l|
    for (std::size_t l = 0; l < h.size(); ++l) aligned += std::abs(h[l]) * std::sqrt(static_cast<double>(a[l].norm()));

    RateReport r;
    r.loss_term = static_cast<double>(norm2(a)) + rho * detail::modulus_misalignment(h, a);
    r.rate_bits = std::max(0.0, std::log2(1.0 + rho * hn) - std::log2(r.loss_term));
    r.alpha = cplx{rho * aligned / (1.0 + rho * hn), 0.0};
    r.noise_energy = rho * r.loss_term / (1.0 + rho * hn);
    return r;
}

// ---------------------------------------------------------------------------
// Real 2L x 2L version of a Hermitian form

inline Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw DimensionError("real_embedding: matrix is not square");
    const Eigen::Index n = m.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
            if (std::abs(m(i, j) - std::conj(m(j, i))) > 1e-12 * (1.0 + std::abs(m(i, j))))
                throw InvalidInputError("real_embedding: matrix is not Hermitian");

    Eigen::MatrixXd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = m.real();
    out.topRightCorner(n, n) = m.imag();
    out.bottomLeftCorner(n, n) = -m.imag();
    out.bottomRightCorner(n, n) = m.real();
    return out;
}

inline Eigen::MatrixXd real_embedding(const GramForm& m) { return real_embedding(m.matrix()); }

/// (Re a_1 .. Re a_L, Im a_1 .. Im a_L)
inline Eigen::VectorXd real_embedding(std::span<const GaussInt> a) {
    const auto L = static_cast<Eigen::Index>(a.size());
    Eigen::VectorXd v(2 * L);
    for (Eigen::Index l = 0; l < L; ++l) {
        v(l) = static_cast<double>(a[l].re);
        v(l + L) = static_cast<double>(a[l].im);
    }
    return v;
}

}  // namespace ppcof
