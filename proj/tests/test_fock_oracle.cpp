#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "cvmdi/analytic_states.hpp"
#include "cvmdi/dense_oracles.hpp"
#include "cvmdi/fock_oracle.hpp"

using namespace cvmdi;

TEST(TmsvState, ZeroSqueezingIsVacuum) {
    const SchmidtState s = tmsv_state(0.0);
    EXPECT_DOUBLE_EQ(s.coeffs[0], 1.0);
    for (std::size_t n = 1; n < s.coeffs.size(); ++n) EXPECT_EQ(s.coeffs[n], 0.0);
    EXPECT_EQ(s.success_prob, 1.0);
    EXPECT_TRUE(s.normalized);
}

TEST(TmsvState, DirectCoefficients) {
    const SchmidtState s = tmsv_state(0.5);
    EXPECT_NEAR(s.coeffs[0], std::sqrt(0.75), 1e-15);
    EXPECT_NEAR(s.coeffs[1], 0.4330127018922193, 1e-15);
    EXPECT_NEAR(s.coeffs[2], 0.21650635094610965, 1e-15);
}

TEST(TmsvState, GeometricSeriesSumsToOneAtCutoff40) {
    const double lambda = 0.33228;
    // raw series, independent of the normalization step
    double raw = 0.0;
    for (int n = 0; n <= 40; ++n) raw += (1 - lambda * lambda) * std::pow(lambda, 2 * n);
    EXPECT_NEAR(raw, 1.0, 1e-12);
    const SchmidtState s = tmsv_state(lambda, 40);
    EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
}

TEST(TmsvState, DomainErrors) {
    EXPECT_THROW(tmsv_state(1.0), DomainError);
    EXPECT_THROW(tmsv_state(-0.1), DomainError);
    EXPECT_THROW(tmsv_state(0.3, 5), DomainError);
}

TEST(TmsvState, TooSmallCutoffReportsRequired) {
    try {
        tmsv_state(0.9, 10);
        FAIL() << "expected TruncationError";
    } catch (const TruncationError& e) {
        EXPECT_GT(e.required_cutoff(), 10u);
        EXPECT_NO_THROW(tmsv_state(0.9, e.required_cutoff()));
    }
}

TEST(TmsvState, AutoCutoffIsAdequate) {
    for (double lambda : {0.05, 0.33228, 0.7, 0.85}) {
        const SchmidtState s = tmsv_state(lambda);
        EXPECT_TRUE(truncation_adequate(s.coeffs)) << lambda;
        EXPECT_NEAR(s.norm_squared(), 1.0, kNormTolerance);
    }
    EXPECT_THROW(tmsv_state(0.97), TruncationError);
}

TEST(BeamSplitter, ClosedFormMatchesMatrixExponential) {
    for (double t : {0.3, 0.7, 0.95}) {
        for (unsigned j = 0; j <= 6; ++j)
            for (unsigned m = 0; m <= 1; ++m)
                for (unsigned n = 0; n <= 1; ++n) {
                    if (j + m < n) continue;
                    const unsigned jo = j + m - n;
                    EXPECT_NEAR(bs_amplitude(t, j, m, jo, n), dense::bs_amplitude_by_expm(t, j, m, jo, n),
                                1e-12)
                        << "t=" << t << " j=" << j << " m=" << m << " n=" << n;
                }
        // a multi-photon element exercises the general binomial sum
        EXPECT_NEAR(bs_amplitude(t, 3, 2, 1, 4), dense::bs_amplitude_by_expm(t, 3, 2, 1, 4), 1e-12);
    }
}

TEST(BeamSplitter, PhotonNumberBlocksAreUnitary) {
    for (double t : {0.2, 0.6, 0.9}) {
        for (unsigned total = 0; total <= 20; ++total) {
            Eigen::MatrixXd u(total + 1, total + 1);
            for (unsigned jo = 0; jo <= total; ++jo)
                for (unsigned j = 0; j <= total; ++j) u(jo, j) = bs_amplitude(t, j, total - j, jo, total - jo);
            const Eigen::MatrixXd err = u.transpose() * u - Eigen::MatrixXd::Identity(total + 1, total + 1);
            EXPECT_LT(err.cwiseAbs().maxCoeff(), 1e-12) << "t=" << t << " total=" << total;
        }
    }
}

TEST(BsKraus, AttenuationDiagonal) {
    const double T = 0.64;
    const DenseMatrix ki = bs_kraus(T, 0, 0, 12, BeamSplitterConvention::intensity);
    const DenseMatrix ka = bs_kraus(T, 0, 0, 12, BeamSplitterConvention::amplitude);
    for (std::size_t j = 0; j < 12; ++j) {
        EXPECT_NEAR(ki(j, j), std::pow(T, j / 2.0), 1e-14);
        EXPECT_NEAR(ka(j, j), std::pow(T, double(j)), 1e-14);
        for (std::size_t i = 0; i < 12; ++i) {
            if (i != j) {
                EXPECT_EQ(ki(i, j), 0.0);
            }
        }
    }
}

TEST(BsKraus, PhotonAdditionIsSuperdiagonal) {
    const double T = 0.7;
    const DenseMatrix k = bs_kraus(T, 1, 0, 10, BeamSplitterConvention::intensity);
    for (std::size_t j = 0; j < 10; ++j)
        for (std::size_t i = 0; i < 10; ++i) {
            if (i == j + 1) {
                EXPECT_NEAR(std::abs(k(i, j)), std::sqrt(j + 1.0) * std::sqrt(1 - T) * std::pow(T, j / 2.0),
                            1e-14);
            } else {
                EXPECT_EQ(k(i, j), 0.0);
            }
        }
}

TEST(BsKraus, HeraldedOperatorsAreContractions) {
    for (unsigned m = 0; m <= 1; ++m)
        for (double T : {0.1, 0.5, 0.9}) {
            const DenseMatrix k = bs_kraus(T, m, m, 20);
            Eigen::MatrixXd e(20, 20);
            double diag = 0.0;
            for (int i = 0; i < 20; ++i) {
                for (int j = 0; j < 20; ++j) e(i, j) = k(i, j);
                diag += k(i, i) * k(i, i);
            }
            EXPECT_LE(diag, 20.0);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
            EXPECT_LE(svd.singularValues().maxCoeff(), 1.0 + 1e-12);
        }
}

TEST(ApplyHerald, VacuumPasKeepsVacuum) {
    for (double T : {0.2, 0.5, 0.8}) {
        const SchmidtState out = apply_herald(tmsv_state(0.0), HeraldSpec::pas(T));
        EXPECT_NEAR(out.coeffs[0], 1.0, 1e-15);
        EXPECT_NEAR(out.success_prob, std::pow(1 - T * T, 2), 1e-15);
    }
}

TEST(ApplyHerald, NonSchmidtSpecIsRejected) {
    // photon addition alone shifts |n n> to |n, n+1>
    EXPECT_THROW(apply_herald(tmsv_state(0.3), HeraldSpec{1, 0, 0, 0, 0.5}), ShapeError);
}

TEST(ApplyHerald, ZeroProbabilityIsRejected) {
    // <8,1|U|8,1> = t^7 (t^2 - 8 s^2) underflows for a nearly opaque splitter
    SchmidtState eight{{0, 0, 0, 0, 0, 0, 0, 0, 1.0}, 1.0, true};
    EXPECT_THROW(apply_herald(eight, HeraldSpec::pr2(1e-50)), ZeroProbabilityError);
}

TEST(ApplyHerald, InvalidSpecs) {
    EXPECT_THROW(apply_herald(tmsv_state(0.3), HeraldSpec{1, 0, 0, 1, 1.0}), DomainError);
    EXPECT_THROW(apply_herald(tmsv_state(0.3), HeraldSpec{2, 0, 0, 1, 0.5}), DomainError);
    SchmidtState raw{{1.0, 1.0, 0, 0, 0, 0, 0, 0, 0}, 1.0, false};
    EXPECT_THROW(apply_herald(raw, HeraldSpec::pas(0.5)), DomainError);
}

TEST(ApplyHerald, ProbabilityBound) {
    for (double lambda : {0.05, 0.2, 0.33228})
        for (double T : {0.05, 0.3, 0.6, 0.95})
            for (const HeraldSpec& spec : {HeraldSpec::pas(T), HeraldSpec::pr2(T)}) {
                const SchmidtState s = apply_herald(tmsv_state(lambda), spec);
                EXPECT_GT(s.success_prob, 0.0);
                EXPECT_LE(s.success_prob, 1.0);
                EXPECT_NEAR(s.norm_squared(), 1.0, 1e-12);
                for (double c : s.coeffs) EXPECT_GE(c, 0.0);
            }
}

TEST(ApplyHerald, TruncationConverged) {
    const double lambda = 0.33228, T = 0.9;
    const SchmidtState a = apply_herald(tmsv_state(lambda, 40), HeraldSpec::pas(T));
    const SchmidtState b = apply_herald(tmsv_state(lambda, 80), HeraldSpec::pas(T));
    for (std::size_t n = 0; n < a.coeffs.size(); ++n) EXPECT_NEAR(a.coeffs[n], b.coeffs[n], 1e-12);
    EXPECT_NEAR(a.success_prob, b.success_prob, 1e-12);
}

TEST(ApplyHerald, ChainingAccumulatesProbability) {
    const double lambda = 0.2, T = 0.6;
    const SchmidtState once = apply_herald(tmsv_state(lambda), HeraldSpec::pas(T));
    const SchmidtState twice = apply_herald(once, HeraldSpec::pas(T));
    const SchmidtState fresh = apply_herald(SchmidtState{once.coeffs, 1.0, true}, HeraldSpec::pas(T));
    EXPECT_NEAR(twice.success_prob, once.success_prob * fresh.success_prob, 1e-15);
}

TEST(ApplyHerald, IntensityReadingDoesNotReproduceSeries) {
    const SqueezeParam sq = from_db(1.0);
    const double T = 0.6;
    const SchmidtState lit = apply_herald(tmsv_state(sq.lambda), HeraldSpec::pas(T),
                                          BeamSplitterConvention::intensity);
    const SchmidtState ref = coeffs(StateKind::PAS1, sq, T, lit.cutoff());
    EXPECT_GT(std::abs(lit.success_prob - ref.success_prob), 1e-3);
    // the intensity reading is the series evaluated at sqrt(T)
    const SchmidtState at_sqrt = coeffs(StateKind::PAS1, sq, std::sqrt(T), lit.cutoff());
    EXPECT_NEAR(lit.success_prob, at_sqrt.success_prob, 1e-12);
}
