#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "ppcof/rate_engine.hpp"

using namespace ppcof;

namespace {

constexpr cplx I{0.0, 1.0};

}  // namespace

TEST(GramForm, TwoUserExample) {
    const CplxVec h{{1.0, 0.0}, {0.0, 0.0}};
    const GramForm m = gram_form(h, 1.0);
    EXPECT_NEAR(std::abs(m.matrix()(0, 0) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(m.matrix()(1, 1) - 1.0), 0.0, 1e-15);
    EXPECT_EQ(m.matrix()(0, 1), cplx(0.0, 0.0));
    EXPECT_EQ(m.matrix()(1, 0), cplx(0.0, 0.0));
}

TEST(GramForm, ApproachesIdentityAsRhoVanishes) {
    auto g = oracle::rng(21);
    const CplxVec h = oracle::random_channel(g, 3);
    const double rho = 1e-9;
    const GramForm m = gram_form(h, rho);
    const double tol = rho * norm2(h);
    EXPECT_LE((m.matrix() - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), tol);
}

TEST(GramForm, MatchesStraightLineFormula) {
    auto g = oracle::rng(22);
    for (int t = 0; t < 200; ++t) {
        const std::size_t L = 1 + t % 5;
        const CplxVec h = oracle::random_channel(g, L);
        const double rho = std::pow(10.0, oracle::uniform(g, -1, 4));
        const GramForm m = gram_form(h, rho);
        EXPECT_LE((m.matrix() - oracle::gram(h, rho)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_EQ(m.matrix(), m.matrix().adjoint());
    }
}

TEST(GramForm, RejectsBadInput) {
    const CplxVec h{{1.0, 0.0}};
    const CplxVec zero{{0.0, 0.0}, {0.0, 0.0}};
    EXPECT_THROW(gram_form(h, 0.0), InvalidParameterError);
    EXPECT_THROW(gram_form(h, -1.0), InvalidParameterError);
    EXPECT_THROW(gram_form(zero, 1.0), InvalidParameterError);
}

TEST(GramForm, PositiveDefiniteOnSmallBox) {
    auto g = oracle::rng(23);
    for (int t = 0; t < 20; ++t) {
        const CplxVec h = oracle::random_channel(g, 2);
        const GramForm m = gram_form(h, std::pow(10.0, oracle::uniform(g, 0, 4)));
        for (int a1 = -5; a1 <= 5; ++a1)
            for (int b1 = -5; b1 <= 5; ++b1)
                for (int a2 = -5; a2 <= 5; ++a2)
                    for (int b2 = -5; b2 <= 5; ++b2) {
                        const GaussVec a{{a1, b1}, {a2, b2}};
                        if (is_zero(a)) continue;
                        ASSERT_GT(m.quadratic(a), 0.0);
                    }
        EXPECT_EQ(Eigen::LLT<Eigen::MatrixXcd>(m.matrix()).info(), Eigen::Success);
    }
}

TEST(GramForm, StableAndDirectQuadraticAgree) {
    auto g = oracle::rng(24);
    for (int t = 0; t < 500; ++t) {
        const CplxVec h = oracle::random_channel(g, 3);
        const double rho = std::pow(10.0, oracle::uniform(g, 0, 3));
        const GaussVec a = oracle::random_coeffs(g, 3, 4);
        const GramForm m = gram_form(h, rho);
        const double want = oracle::form(oracle::gram(h, rho), a);
        EXPECT_NEAR(m.quadratic(a), want, 1e-9 * (1.0 + want));
        EXPECT_NEAR(m.quadratic_direct(a), want, 1e-9 * (1.0 + want));
    }
}

TEST(MmseAlpha, Examples) {
    const CplxVec h1{{1.0, 0.0}, {0.0, 0.0}};
    const GaussVec a1{{1, 0}, {0, 0}};
    EXPECT_NEAR(std::abs(mmse_alpha(h1, a1, 1.0) - 0.5), 0.0, 1e-15);

    const CplxVec h2{{1.0, 0.0}, {1.0, 0.0}};
    const GaussVec a2{{1, 0}, {1, 0}};
    EXPECT_NEAR(std::abs(mmse_alpha(h2, a2, 2.0) - 0.8), 0.0, 1e-15);

    EXPECT_THROW(mmse_alpha(h2, GaussVec{{0, 0}, {0, 0}}, 1.0), ZeroCoefficientError);
}

TEST(MmseAlpha, MatchesGridMinimizer) {
    auto g = oracle::rng(25);
    for (int t = 0; t < 40; ++t) {
        const std::size_t L = 1 + t % 3;
        const CplxVec h = oracle::random_channel(g, L);
        const GaussVec a = oracle::random_coeffs(g, L, 3);
        const double rho = std::pow(10.0, oracle::uniform(g, 0, 2));
        const cplx alpha = mmse_alpha(h, a, rho);
        const auto grid = oracle::grid_min_alpha(h, a, rho, 2.0 * std::abs(alpha) + 1.0);
        EXPECT_LT(std::abs(grid.alpha - alpha), 1e-4);
        EXPECT_LE(noise_energy(h, a, alpha, rho), grid.value + 1e-12);
    }
}

TEST(MmseAlpha, StrictLocalMinimum) {
    auto g = oracle::rng(26);
    for (int t = 0; t < 1000; ++t) {
        const CplxVec h = oracle::random_channel(g, 2);
        const GaussVec a = oracle::random_coeffs(g, 2, 3);
        const double rho = std::pow(10.0, oracle::uniform(g, 0, 3));
        const cplx alpha = mmse_alpha(h, a, rho);
        const double q = noise_energy(h, a, alpha, rho);
        for (int k = 0; k < 20; ++k) {
            const cplx delta = std::polar(oracle::uniform(g, 0, 1), oracle::uniform(g, -3.2, 3.2));
            EXPECT_LE(q, noise_energy(h, a, alpha + delta, rho) + 1e-12);
        }
    }
}

TEST(NoiseEnergy, Examples) {
    const CplxVec h{{0.3, -1.2}, {2.0, 0.5}};
    const GaussVec a{{1, 2}, {-1, 0}};
    EXPECT_NEAR(noise_energy(h, a, 0.0, 3.0), 3.0 * 6.0, 1e-12);

    const CplxVec hi{{1.0, 1.0}, {2.0, 0.0}};
    const GaussVec ai{{1, 1}, {2, 0}};
    EXPECT_NEAR(noise_energy(hi, ai, 1.0, 7.0), 1.0, 1e-15);
}

TEST(NoiseEnergy, MatchesFormula) {
    auto g = oracle::rng(27);
    for (int t = 0; t < 500; ++t) {
        const CplxVec h = oracle::random_channel(g, 3);
        const GaussVec a = oracle::random_coeffs(g, 3, 5);
        const cplx alpha(oracle::uniform(g, -3, 3), oracle::uniform(g, -3, 3));
        const double rho = oracle::uniform(g, 0.1, 100);
        const double want = oracle::effective_noise(h, a, alpha, rho);
        EXPECT_NEAR(noise_energy(h, a, alpha, rho), want, 1e-12 * (1.0 + want));
    }
}

TEST(ComputationRate, Examples) {
    const CplxVec h{{1.0, 0.0}, I};
    const GaussVec a{{1, 0}, {1, 0}};
    const GramForm m = gram_form(h, 1.0);
    EXPECT_NEAR(m.quadratic(a), 4.0 / 3.0, 1e-15);
    EXPECT_EQ(computation_rate(h, a, 1.0).rate_bits, 0.0);

    const CplxVec h2{{1.0, 0.0}, {1.0, 0.0}};
    const RateReport r = computation_rate(h2, a, 10.0);
    EXPECT_NEAR(r.rate_bits, std::log2(21.0 / 2.0), 1e-12);
}

TEST(ComputationRate, AlignedIntegerChannelHasMinimalLoss) {
    const CplxVec h{{2.0, 1.0}, {-1.0, 3.0}, {0.0, 1.0}};
    const GaussVec a{{2, 1}, {-1, 3}, {0, 1}};
    for (double rho : {1.0, 100.0, 1e6}) {
        const RateReport r = computation_rate(h, a, rho);
        EXPECT_EQ(r.loss_term, static_cast<double>(norm2(a)));
        EXPECT_NEAR(r.rate_bits, std::log2((1.0 + rho * 16.0) / 16.0), 1e-12);
    }
}

TEST(ComputationRate, InternalConsistency) {
    auto g = oracle::rng(28);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t L = 1 + t % 4;
        const CplxVec h = oracle::random_channel(g, L);
        const GaussVec a = oracle::random_coeffs(g, L, 3);
        const double rho = std::pow(10.0, oracle::uniform(g, 0, 3));
        const RateReport r = computation_rate(h, a, rho);
        EXPECT_NEAR(r.rate_bits, std::max(0.0, std::log2(rho / r.noise_energy)), 1e-9);
        EXPECT_GE(r.loss_term, static_cast<double>(norm2(a)) - 1e-12);
        EXPECT_GE(r.rate_bits, 0.0);
    }
}

TEST(ComputationRate, EqualsGridMaximizedRate) {
    auto g = oracle::rng(29);
    for (int t = 0; t < 30; ++t) {
        const CplxVec h = oracle::random_channel(g, 2);
        const double rho = std::pow(10.0, oracle::uniform(g, 0.5, 2));
        // Pick an a with positive rate so the relative comparison is meaningful.
        GaussVec a{quantize_zi(h[0] * 2.0), quantize_zi(h[1] * 2.0)};
        if (is_zero(a)) a = {{1, 0}, {0, 0}};
        const RateReport r = computation_rate(h, a, rho);
        if (r.rate_bits == 0.0) continue;
        const auto grid = oracle::grid_min_alpha(h, a, rho, 2.0 * std::abs(r.alpha) + 1.0);
        const double grid_rate = std::max(0.0, std::log2(rho / grid.value));
        EXPECT_NEAR(r.rate_bits, grid_rate, 1e-6 * grid_rate);
    }
}

TEST(ComputationRate, ZeroBeyondRadius) {
    auto g = oracle::rng(30);
    for (int t = 0; t < 500; ++t) {
        const CplxVec h = oracle::random_channel(g, 2);
        const double rho = oracle::uniform(g, 0.5, 20);
        const GaussVec a = oracle::random_coeffs(g, 2, 8);
        if (static_cast<double>(norm2(a)) >= 1.0 + rho * norm2(h)) {
            EXPECT_EQ(computation_rate(h, a, rho).rate_bits, 0.0);
        }
    }
}

TEST(ComputationRate, Errors) {
    const CplxVec h{{1.0, 0.0}, {0.5, 0.0}};
    EXPECT_THROW(computation_rate(h, GaussVec{{0, 0}, {0, 0}}, 1.0), ZeroCoefficientError);
    EXPECT_THROW(computation_rate(h, GaussVec{{1, 0}}, 1.0), DimensionError);
}

TEST(PrecodedRate, IdentityPrecoderIsPlainRate) {
    auto g = oracle::rng(31);
    for (int t = 0; t < 200; ++t) {
        const CplxVec h = oracle::random_channel(g, 3);
        const GaussVec a = oracle::random_coeffs(g, 3, 2);
        const double rho = oracle::uniform(g, 1, 100);
        EXPECT_EQ(pp_computation_rate(h, Precoder::identity(3), a, rho).rate_bits,
                  computation_rate(h, a, rho).rate_bits);
    }
    EXPECT_THROW(pp_computation_rate(CplxVec{{1.0, 0.0}}, Precoder::identity(2), GaussVec{{1, 0}}, 1.0), DimensionError);
}

TEST(PrecodedRate, PositiveRealInputsNeedNoPrecoding) {
    const CplxVec h{{0.7, 0.0}, {1.9, 0.0}};
    const GaussVec a{{1, 0}, {2, 0}};
    for (double rho : {1.0, 10.0, 1000.0})
        EXPECT_NEAR(pp_rate_optimal_closed_form(h, a, rho).rate_bits, computation_rate(h, a, rho).rate_bits, 1e-12);
}

TEST(PrecodedRate, ClosedFormExamples) {
    const CplxVec h{std::polar(1.0, std::numbers::pi / 7.0), std::polar(1.0, -std::numbers::pi / 5.0)};
    const GaussVec a{{1, 0}, {1, 0}};
    for (double rho : {0.5, 3.0, 100.0, 1e5}) {
        const RateReport r = pp_rate_optimal_closed_form(h, a, rho);
        EXPECT_NEAR(r.loss_term, 2.0, 1e-12);
        EXPECT_NEAR(r.rate_bits, std::max(0.0, std::log2((1.0 + 2.0 * rho) / 2.0)), 1e-12);
    }

    // |h_l| proportional to |a_l|: Cauchy-Schwarz equality.
    const CplxVec hp{std::polar(0.6, 1.0), std::polar(1.2, -2.0)};
    const GaussVec ap{{0, 1}, {2, 0}};
    EXPECT_NEAR(pp_rate_optimal_closed_form(hp, ap, 50.0).loss_term, 5.0, 1e-12);
}

TEST(PrecodedRate, DominatesPlainRate) {
    auto g = oracle::rng(32);
    for (int t = 0; t < 5000; ++t) {
        const std::size_t L = 1 + t % 4;
        const CplxVec h = oracle::random_channel(g, L);
        const GaussVec a = oracle::random_coeffs(g, L, 3);
        const double rho = std::pow(10.0, oracle::uniform(g, 0, 3));
        EXPECT_GE(pp_rate_optimal_closed_form(h, a, rho).rate_bits, computation_rate(h, a, rho).rate_bits - 1e-9);
    }
}

TEST(PrecodedRate, EqualityWhenPhaseOffsetsCoincide) {
    auto g = oracle::rng(33);
    for (int t = 0; t < 200; ++t) {
        const GaussVec a = oracle::random_coeffs(g, 3, 3);
        const double offset = oracle::uniform(g, -3, 3);
        CplxVec h(3);
        for (std::size_t l = 0; l < 3; ++l)
            h[l] = std::polar(oracle::uniform(g, 0.1, 2), polar(a[l].to_complex()).phase + offset);
        const double rho = oracle::uniform(g, 1, 1000);
        EXPECT_NEAR(pp_rate_optimal_closed_form(h, a, rho).rate_bits, computation_rate(h, a, rho).rate_bits, 1e-9);
    }
}

TEST(RealEmbedding, Examples) {
    EXPECT_EQ(real_embedding(Eigen::MatrixXcd::Identity(3, 3)), Eigen::MatrixXd::Identity(6, 6));
    Eigen::MatrixXcd one(1, 1);
    one(0, 0) = 2.5;
    const Eigen::MatrixXd e = real_embedding(one);
    EXPECT_EQ(e, (Eigen::MatrixXd(2, 2) << 2.5, 0.0, 0.0, 2.5).finished());

    Eigen::MatrixXcd bad(2, 2);
    bad << 1.0, I, I, 1.0;
    EXPECT_THROW(real_embedding(bad), InvalidInputError);
}

TEST(RealEmbedding, Isometry) {
    auto g = oracle::rng(34);
    for (int t = 0; t < 1000; ++t) {
        const auto L = static_cast<Eigen::Index>(1 + t % 4);
        const Eigen::MatrixXcd b = Eigen::MatrixXcd::Random(L, L);
        const Eigen::MatrixXcd m = b * b.adjoint();
        const GaussVec a = oracle::random_coeffs(g, static_cast<std::size_t>(L), 6);
        const Eigen::VectorXd v = real_embedding(a);
        const double want = oracle::form(m, a);
        EXPECT_NEAR(v.dot(real_embedding(m) * v), want, 1e-10 * (1.0 + std::abs(want)));
    }
}

TEST(RealEmbedding, GramFormIsometry) {
    auto g = oracle::rng(35);
    for (int t = 0; t < 300; ++t) {
        const CplxVec h = oracle::random_channel(g, 3);
        const GramForm m = gram_form(h, oracle::uniform(g, 1, 1000));
        const GaussVec a = oracle::random_coeffs(g, 3, 6);
        const Eigen::VectorXd v = real_embedding(a);
        EXPECT_NEAR(v.dot(real_embedding(m) * v), m.quadratic(a), 1e-10 * (1.0 + m.quadratic(a)));
    }
}

TEST(ScalingLemma, HoldsOnConstructedInstances) {
    auto g = oracle::rng(36);
    for (std::size_t L : {2u, 4u})
        for (int c : {2, 3})
            for (int t = 0; t < 2500; ++t) {
                const auto inst = oracle::lemma_instance(g, L, c);
                ASSERT_LE(oracle::lemma_hypothesis_gap(inst), std::pow(c, -static_cast<double>(L + 1)));
                const auto [left, right] = oracle::lemma_sides(inst);
                EXPECT_LE(left, right + 1e-12);
            }
}

TEST(ScalingLemma, HypothesisExcludesLongerIntegerVectors) {
    // A unit h^ within c^-(L+1) (sup norm) of w' has | ||w'|| - 1 | <= sqrt(2L) c^-(L+1),
    // which rules out ||w||^2 >= 2 for every L >= 2, c >= 2.
    for (int L = 2; L <= 12; ++L)
        for (int c = 2; c <= 5; ++c) EXPECT_LT(std::sqrt(2.0 * L) * std::pow(c, -(L + 1.0)), std::sqrt(2.0) - 1.0);
}
