#pragma once

// Per-transmitter phase precoding. Each user multiplies its codeword by
// e^{i phi_l} with phi_l in [-pi/4, pi/4]; the quarter-turn left over when an
// optimal phase is folded into that interval is absorbed into the coefficient
// vector as a Gaussian unit.

#include <cmath>
#include <numbers>
#include <vector>

#include "ppcof/lattice_core.hpp"

namespace ppcof {

inline constexpr double kQuarterPi = std::numbers::pi / 4.0;

class Precoder {
public:
    Precoder() = default;

    Precoder(std::vector<double> phases, std::vector<GaussUnit> units)
        : phases_(std::move(phases)), units_(std::move(units)) {
        if (phases_.size() != units_.size()) throw DimensionError("Precoder: phases and units differ in length");
        for (double p : phases_)
            if (!(p >= -kQuarterPi && p <= kQuarterPi))
                throw InvalidParameterError("Precoder: phase outside [-pi/4, pi/4]");
    }

    static Precoder identity(std::size_t users) {
        return Precoder(std::vector<double>(users, 0.0), std::vector<GaussUnit>(users, GaussUnit::one));
    }

    std::size_t size() const { return phases_.size(); }
    const std::vector<double>& phases() const { return phases_; }
    const std::vector<GaussUnit>& units() const { return units_; }

    /// Factor applied at transmitter l.
    cplx multiplier(std::size_t l) const { return std::polar(1.0, phases_.at(l)); }

    /// u_l e^{i phi_l}: the unfolded optimal rotation, pairing with the coefficient vector before unit absorption.
    cplx raw_multiplier(std::size_t l) const { return unit_value(units_.at(l)).to_complex() * multiplier(l); }

    bool is_identity() const {
        for (std::size_t l = 0; l < size(); ++l)
            if (phases_[l] != 0.0 || units_[l] != GaussUnit::one) return false;
        return true;
    }

private:
    std::vector<double> phases_;
    std::vector<GaussUnit> units_;
};

/// Splits a phase into u * e^{i phi} with phi in [-pi/4, pi/4); pi/4 itself maps downward.
struct FoldedPhase {
    GaussUnit unit = GaussUnit::one;
    double phase = 0.0;
};

inline FoldedPhase fold_phase(double raw) {
    constexpr double quarter_turn = std::numbers::pi / 2.0;
    int k = static_cast<int>(std::floor((raw + kQuarterPi) / quarter_turn));
    double phi = raw - k * quarter_turn;
    if (phi >= kQuarterPi) {
        phi -= quarter_turn;
        ++k;
    } else if (phi < -kQuarterPi) {
        phi += quarter_turn;
        --k;
    }
    return {unit_from_power(k), phi};
}

/// h'_l = h_l e^{i phi_l}. Norm preserving.
inline CplxVec apply_precoder(std::span<const cplx> h, const Precoder& p) {
    if (h.size() != p.size()) throw DimensionError("apply_precoder: precoder has " + std::to_string(p.size()) +
                                                   " phases for " + std::to_string(h.size()) + " users");
    CplxVec out(h.begin(), h.end());
    for (std::size_t l = 0; l < out.size(); ++l) out[l] *= p.multiplier(l);
    return out;
}

struct OptimalPrecoder {
    Precoder precoder;
    GaussVec adjusted_a;            ///< conj(u_l) * a_l; what the relay decodes under this precoder
    std::vector<double> raw_phases; ///< psi_l - theta_l before folding (0 where h_l or a_l vanishes)
};

/// Phases that rotate every h_l onto the direction of a_l, maximizing |<h', a>|.
///
/// Only phase differences matter; the zero-offset member of the optimal
/// family is returned so that arg h'_l = arg(adjusted a_l) entrywise.
inline OptimalPrecoder optimal_precoder(std::span<const cplx> h, std::span<const GaussInt> a) {
    if (h.size() != a.size()) throw DimensionError("optimal_precoder: h and a differ in length");
    if (is_zero(a)) throw ZeroCoefficientError();

    OptimalPrecoder out;
    std::vector<double> phases(h.size(), 0.0);
    std::vector<GaussUnit> units(h.size(), GaussUnit::one);
    out.raw_phases.assign(h.size(), 0.0);
    out.adjusted_a.assign(a.begin(), a.end());

    for (std::size_t l = 0; l < h.size(); ++l) {
        if (a[l].is_zero() || h[l] == cplx{0.0, 0.0}) continue;
        const double raw = polar(a[l].to_complex()).phase - polar(h[l]).phase;
        const FoldedPhase f = fold_phase(raw);
        out.raw_phases[l] = raw;
        phases[l] = f.phase;
        units[l] = f.unit;
        out.adjusted_a[l] = unit_value(conj(f.unit)) * a[l];
    }
    out.precoder = Precoder(std::move(phases), std::move(units));
    return out;
}

}  // namespace ppcof
