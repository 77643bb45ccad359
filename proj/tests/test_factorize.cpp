#include "helpers.hpp"

#include "nrh/factorize.hpp"

using namespace nrh;

namespace {

// pi_2 on l1_2 by direct minimization over the two merged sign functionals.
double pi2_oracle_l1_2(const ComplexMatrix& a) {
    const ComplexMatrix ata = a.adjoint() * a;
    return std::sqrt(fixture::minimize_1d(
        [&](double mu) {
            ComplexMatrix g(2, 2);
            g << 1.0, 2.0 * mu - 1.0, 2.0 * mu - 1.0, 1.0;
            const ComplexMatrix gih = psd_sqrt(HermitianMatrix::symmetrize(g)).matrix().inverse();
            return lambda_max(HermitianMatrix::symmetrize(gih * ata * gih));
        },
        1e-9, 1.0 - 1e-9, 4000));
}

Factorization factor(const BilinearForm& t, Variant v) { return gns_factorize(t, dual_norm(t, v)); }

} // namespace

TEST(GNS, ZeroFormGivesEmptyFactorization) {
    for (const Space& s : {Space{MatrixAlgebra{2}}, Space{MinSpace{family_l1(3)}}}) {
        const Eigen::Index d = coord_dim(s);
        const BilinearForm t{s, ComplexMatrix::Zero(d, d)};
        const auto f = factor(t, is_matrix(s) ? Variant::wh : Variant::wH);
        EXPECT_EQ(f.a.rows(), 0);
        EXPECT_EQ(f.a.cols(), d);
        EXPECT_EQ(f.bound(), 0.0);
        EXPECT_TRUE(verify_factorization(t, f, 0.0).ok());
    }
}

TEST(GNS, ExtremeFunctionalSquare) {
    const auto fam = family_l1(2);
    const ComplexMatrix f0 = fam->functionals.row(0);
    const BilinearForm t{MinSpace{fam}, f0.transpose() * f0};
    RealVector point = RealVector::Zero(fam->size());
    point(0) = 1.0;
    DualCert cert;
    cert.value = 1.0;
    cert.lower = 1.0;
    cert.variant = Variant::wH;
    cert.state = ProbabilityVector{point, fam};
    const auto f = gns_factorize(t, cert);
    ASSERT_EQ(f.a.rows(), 1);
    EXPECT_LT(max_abs(f.a - f0), 1e-12);
    EXPECT_NEAR(f.b(0, 0).real(), 1.0, 1e-12);
    EXPECT_NEAR(f.b(0, 0).imag(), 0.0, 1e-12);
    EXPECT_LT(f.residual, 1e-12);

    // the computed certificate reaches the same value
    const auto g = factor(t, Variant::wH);
    EXPECT_LT(g.residual, 1e-9);
    EXPECT_NEAR(g.bound(), 1.0, 1e-5);
}

TEST(GNS, ScalarForm) {
    const BilinearForm t{MatrixAlgebra{1}, ComplexMatrix::Constant(1, 1, cplx(0.0, -2.0))};
    const auto f = factor(t, Variant::wh);
    EXPECT_EQ(f.kind, FactorKind::adjoint);
    EXPECT_LT(f.residual, 1e-12);
    EXPECT_NEAR(f.bound(), 2.0, 2e-6);
}

TEST(GNS, ReconstructsAndMeetsBound) {
    auto rng = fixture::rng_for(60);
    const std::vector<std::pair<Space, Variant>> cases{{MatrixAlgebra{2}, Variant::wh},
                                                       {MatrixAlgebra{2}, Variant::whp},
                                                       {MatrixAlgebra{3}, Variant::wh},
                                                       {MinSpace{family_l1(3)}, Variant::wH},
                                                       {MinSpace{family_linf(3)}, Variant::wh}};
    for (const auto& [space, variant] : cases) {
        for (int trial = 0; trial < 2; ++trial) {
            const auto t = gen::form(rng, space);
            const auto cert = dual_norm(t, variant);
            const auto f = gns_factorize(t, cert);
            EXPECT_EQ(f.kind, variant == Variant::wh ? FactorKind::adjoint : FactorKind::transpose);
            EXPECT_LE(f.a.rows(), coord_dim(space));
            const auto rep = verify_factorization(t, f, cert.value);
            EXPECT_TRUE(rep.residual_ok) << space_label(space) << " residual " << rep.residual;
            EXPECT_TRUE(rep.a_norm_recomputed);
            EXPECT_TRUE(rep.bound_ok.value_or(false)) << rep.product << " vs " << cert.value;
            // the bound cannot beat the dual norm either
            EXPECT_GE(rep.product, cert.lower * (1.0 - 1e-6));
        }
    }
}

TEST(GNS, WrongKindIsDetected) {
    auto rng = fixture::rng_for(61);
    for (Eigen::Index n : {2, 3}) {
        const auto t = gen::form(rng, MatrixAlgebra{n});
        auto f = factor(t, Variant::wh);
        f.kind = FactorKind::transpose;
        EXPECT_FALSE(verify_factorization(t, f).residual_ok);
    }
}

TEST(GNS, TamperedFactorIsDetected) {
    auto rng = fixture::rng_for(62);
    const auto t = gen::form(rng, MinSpace{family_l1(3)});
    auto f = factor(t, Variant::wH);
    f.b(0, 0) += 1e-3;
    EXPECT_FALSE(verify_factorization(t, f).residual_ok);

    // same reconstruction, but the recomputed pi_2 sees the larger a
    auto g = factor(t, Variant::wH);
    const double p0 = pietsch_pi2(g.a, family_l1(3)).pi2;
    g.a *= 1.1;
    g.b /= 1.21;
    const auto rep = verify_factorization(t, g);
    EXPECT_TRUE(rep.residual_ok);
    EXPECT_NEAR(rep.a_norm, 1.1 * p0, 1e-5 * p0);
}

TEST(GNS, RejectsNonDominatingState) {
    auto rng = fixture::rng_for(63);
    const auto t = gen::form(rng, MatrixAlgebra{2});
    auto cert = dual_norm(t, Variant::wh);
    cert.value *= 0.5;
    EXPECT_THROW(gns_factorize(t, cert), RejectedCertificate);
}

TEST(Pi2, IdentityOnL1IsOne) {
    for (Eigen::Index n = 1; n <= 5; ++n) {
        const auto r = pietsch_pi2(ComplexMatrix::Identity(n, n), family_l1(n));
        EXPECT_TRUE(r.bounded);
        EXPECT_NEAR(r.pi2, 1.0, 1e-6);
        EXPECT_LE(r.lower, r.pi2);
        EXPECT_NEAR(r.measure.p.sum(), 1.0, 1e-12);
    }
}

TEST(Pi2, IdentityOnLinfIsSqrtN) {
    for (Eigen::Index n = 1; n <= 5; ++n) {
        EXPECT_NEAR(pietsch_pi2(ComplexMatrix::Identity(n, n), family_linf(n)).pi2, std::sqrt(double(n)), 1e-5);
    }
}

TEST(Pi2, FunctionalEqualsDualNorm) {
    // a = v^T: pi_2 of a rank-one map is the norm of v in the dual, max |v_i| on l1.
    auto rng = fixture::rng_for(64);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix v = gen::gaussian(rng, 1, 4, true);
        EXPECT_NEAR(pietsch_pi2(v, family_l1(4)).pi2, v.cwiseAbs().maxCoeff(), 1e-5 * v.cwiseAbs().maxCoeff());
    }
}

TEST(Pi2, MatchesOneParameterOracle) {
    auto rng = fixture::rng_for(65);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = gen::gaussian(rng, gen::uniform_int(rng, 1, 3), 2, trial % 2 == 0);
        const double oracle = pi2_oracle_l1_2(a);
        const auto r = pietsch_pi2(a, family_l1(2));
        EXPECT_NEAR(r.pi2, oracle, 1e-5 * oracle);
        EXPECT_LE(r.lower, oracle * (1.0 + 1e-9));
    }
}

TEST(Pi2, Homogeneous) {
    auto rng = fixture::rng_for(70);
    const ComplexMatrix a = gen::gaussian(rng, 2, 3);
    const double p = pietsch_pi2(a, family_l1(3)).pi2;
    EXPECT_NEAR(pietsch_pi2(cplx(-2.0, 1.5) * a, family_l1(3)).pi2, 2.5 * p, 1e-5 * p);
}

TEST(Pi2, ZeroMap) {
    EXPECT_EQ(pietsch_pi2(ComplexMatrix::Zero(2, 3), family_l1(3)).pi2, 0.0);
    EXPECT_EQ(pietsch_pi2(ComplexMatrix::Zero(0, 3), family_l1(3)).pi2, 0.0);
}

TEST(Pi2, NonSpanningFamilyIsUnbounded) {
    auto fam = std::make_shared<FunctionalFamily>();
    fam->dim = 2;
    fam->functionals = ComplexMatrix::Zero(1, 2);
    fam->functionals(0, 0) = 1.0;
    const auto r = pietsch_pi2(ComplexMatrix::Identity(2, 2), fam);
    EXPECT_FALSE(r.bounded);
    EXPECT_TRUE(std::isinf(r.pi2));
}

TEST(Pi2, ShapeMismatch) {
    EXPECT_THROW(pietsch_pi2(ComplexMatrix::Identity(2, 2), family_l1(3)), InvalidInput);
}

TEST(CbLower, NeverAbovePi2) {
    auto rng = fixture::rng_for(66);
    for (int trial = 0; trial < 8; ++trial) {
        const Eigen::Index dim = gen::uniform_int(rng, 2, 3);
        const ComplexMatrix a = gen::gaussian(rng, dim, dim, trial % 2 == 0);
        const auto fam = family_l1(dim);
        const double p = pietsch_pi2(a, fam).pi2;
        for (int level = 1; level <= dim; ++level) {
            EXPECT_LE(cb_lower_column(a, fam, level), p * (1.0 + 1e-6));
        }
    }
}

TEST(CbLower, LevelOneWitnesses) {
    // unit vectors are level-one inputs of l1 norm 1
    auto rng = fixture::rng_for(67);
    const ComplexMatrix a = gen::gaussian(rng, 3, 3);
    EXPECT_GE(cb_lower_column(a, family_l1(3), 1), a.colwise().norm().maxCoeff() - 1e-12);
    EXPECT_GE(cb_lower_column(ComplexMatrix::Identity(2, 2), family_l1(2), 1), 1.0 - 1e-6);
    EXPECT_EQ(cb_lower_column(ComplexMatrix::Zero(2, 2), family_l1(2), 1), 0.0);
}

TEST(CbLower, FullLevelReachesPi2) {
    auto rng = fixture::rng_for(68);
    for (int trial = 0; trial < 4; ++trial) {
        const ComplexMatrix a = gen::gaussian(rng, 2, 2, true);
        const double p = pietsch_pi2(a, family_l1(2)).pi2;
        EXPECT_NEAR(cb_lower_column(a, family_l1(2), 2), p, 1e-3 * p);
    }
}

TEST(Banach, FactorizationThroughL2) {
    auto rng = fixture::rng_for(69);
    for (int trial = 0; trial < 4; ++trial) {
        const auto t = gen::form(rng, MinSpace{family_l1(3)}, trial % 2 == 0);
        const auto c = dual_norm(t, Variant::wH);
        const auto f = banach_factorize(t);
        EXPECT_EQ(f.kind, FactorKind::transpose);
        const auto rep = verify_factorization(t, f, c.value);
        EXPECT_TRUE(rep.ok()) << rep.product << " vs " << c.value;
        EXPECT_NEAR(rep.a_norm, f.a_norm, 1e-6 * f.a_norm);
    }
    EXPECT_THROW(banach_factorize(BilinearForm{MatrixAlgebra{2}, ComplexMatrix::Identity(4, 4)}), InvalidInput);
}

TEST(FactorKind, StringRoundTrip) {
    EXPECT_EQ(factor_kind_from_string(to_string(FactorKind::adjoint)), FactorKind::adjoint);
    EXPECT_EQ(factor_kind_from_string(to_string(FactorKind::transpose)), FactorKind::transpose);
    EXPECT_THROW(factor_kind_from_string("both"), InvalidInput);
}
