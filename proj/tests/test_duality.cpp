#include "helpers.hpp"

#include "nrh/duality.hpp"

using namespace nrh;

namespace {

ComplexMatrix rank_one(const ComplexMatrix& f) { return f.transpose() * f; }

// Least c for a fixed pair of Gram matrices: ||conj(G1)^{-1/2} C G2^{-1/2}||.
double fixed_state_value(const ComplexMatrix& c, const ComplexMatrix& g1, const ComplexMatrix& g2) {
    const ComplexMatrix a = psd_sqrt(HermitianMatrix::symmetrize(g1.conjugate())).matrix();
    const ComplexMatrix b = psd_sqrt(HermitianMatrix::symmetrize(g2)).matrix();
    return operator_norm(a.inverse() * c * b.inverse());
}

ComplexMatrix bloch_state(const RealVector& v) {
    const double r = v.norm();
    const RealVector u = r > 0.0 ? RealVector(v * (std::tanh(r) / r)) : v;
    ComplexMatrix rho(2, 2);
    rho << 1.0 + u(2), cplx(u(0), -u(1)), cplx(u(0), u(1)), 1.0 - u(2);
    return 0.5 * rho;
}

} // namespace

TEST(GramPair, Examples) {
    const auto one = gram_pair(DensityMatrix{HermitianMatrix::identity(1)}, MatrixAlgebra{1});
    EXPECT_NEAR(one.g1(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(one.g2(0, 0).real(), 1.0, 1e-15);

    const auto fam = family_l1(2);
    RealVector point = RealVector::Zero(4);
    point(2) = 1.0;
    const auto g = gram_pair(ProbabilityVector{point, fam}, MinSpace{fam});
    const ComplexMatrix f = fam->functionals.row(2);
    EXPECT_LT(max_abs(g.g1.matrix() - f.adjoint() * f), 1e-15);
    EXPECT_LT(max_abs(g.g2.matrix() - g.g1.matrix()), 1e-15);

    // average of f^dagger f over the four sign vectors
    const auto u = gram_pair(ProbabilityVector{RealVector::Constant(4, 0.25), fam}, MinSpace{fam});
    EXPECT_LT(max_abs(u.g1.matrix() - ComplexMatrix::Identity(2, 2)), 1e-15);
}

TEST(GramPair, QuadraticFormsMatchStateValues) {
    auto rng = fixture::rng_for(40);
    const ComplexMatrix s = gen::gaussian(rng, 3, 3);
    const ComplexMatrix rho = s * s.adjoint() / (s * s.adjoint()).trace();
    const DensityMatrix st{HermitianMatrix::symmetrize(rho)};
    const auto wh = gram_pair(st, MatrixAlgebra{3}, Variant::wh);
    const auto whp = gram_pair(st, MatrixAlgebra{3}, Variant::whp);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix x = gen::gaussian(rng, 3, 3);
        const ComplexVector v = vec(x);
        const cplx pxx = (rho * x * x.adjoint()).trace();
        const cplx pxsx = (rho * x.adjoint() * x).trace();
        EXPECT_NEAR((v.adjoint() * wh.g1.matrix() * v)(0, 0).real(), pxx.real(), 1e-12);
        EXPECT_NEAR((v.adjoint() * wh.g2.matrix() * v)(0, 0).real(), pxsx.real(), 1e-12);
        EXPECT_NEAR((v.adjoint() * whp.g1.matrix() * v)(0, 0).real(), pxsx.real(), 1e-12);
    }
    EXPECT_THROW(gram_pair(st, MatrixAlgebra{2}), InvalidInput);
}

TEST(Domination, Examples) {
    const auto fam = family_l1(2);
    const BilinearForm zero{MinSpace{fam}, ComplexMatrix::Zero(2, 2)};
    const State uniform = ProbabilityVector{RealVector::Constant(4, 0.25), fam};
    EXPECT_TRUE(domination_check(zero, uniform, 0.0).ok);

    RealVector point = RealVector::Zero(4);
    point(1) = 1.0;
    const BilinearForm ff{MinSpace{fam}, rank_one(fam->functionals.row(1))};
    const auto chk = domination_check(ff, ProbabilityVector{point, fam}, 1.0);
    EXPECT_TRUE(chk.ok);
    EXPECT_GE(chk.lambda_min, -1e-12);

    const cplx t(0.6, -0.8);
    const BilinearForm scalar{MinSpace{family_linf(1)}, ComplexMatrix::Constant(1, 1, t)};
    const State trivial = ProbabilityVector{RealVector::Constant(2, 0.5), family_linf(1)};
    EXPECT_FALSE(domination_check(scalar, trivial, std::abs(t) * (1.0 - 1e-3)).ok);
    EXPECT_TRUE(domination_check(scalar, trivial, std::abs(t)).ok);
    EXPECT_THROW(domination_check(scalar, trivial, -1.0), InvalidInput);
}

TEST(Domination, MonotoneInC) {
    auto rng = fixture::rng_for(41);
    const auto fam = family_l1(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = gen::form(rng, MinSpace{fam});
        RealVector p = gen::gaussian(rng, 8, 1, true).col(0).real().cwiseAbs();
        p /= p.sum();
        const State st = ProbabilityVector{p, fam};
        bool seen_ok = false;
        for (double c = 0.0; c < 50.0; c += 0.25) {
            const bool ok = domination_check(t, st, c).ok;
            if (seen_ok) {
                EXPECT_TRUE(ok);
            }
            seen_ok = seen_ok || ok;
        }
    }
}

TEST(DualNorm, ZeroForm) {
    const auto c = dual_norm(BilinearForm{MinSpace{family_l1(2)}, ComplexMatrix::Zero(2, 2)}, Variant::wH);
    EXPECT_EQ(c.value, 0.0);
    EXPECT_EQ(c.status, CertStatus::Converged);
}

TEST(DualNorm, ScalarSpace) {
    for (cplx t : {cplx(3, 4), cplx(-2, 0), cplx(0, 0.1)}) {
        const auto c = dual_norm(BilinearForm{MinSpace{family_linf(1)}, ComplexMatrix::Constant(1, 1, t)}, Variant::wH);
        EXPECT_NEAR(c.value, std::abs(t), 1e-6 * std::abs(t));
        const auto m = dual_norm(BilinearForm{MatrixAlgebra{1}, ComplexMatrix::Constant(1, 1, t)}, Variant::wh);
        EXPECT_NEAR(m.value, std::abs(t), 1e-6 * std::abs(t));
    }
}

TEST(DualNorm, RankOneExtremeFunctional) {
    const auto fam = family_l1(2);
    for (Eigen::Index k = 0; k < fam->size(); ++k) {
        const BilinearForm ff{MinSpace{fam}, rank_one(fam->functionals.row(k))};
        const auto c = dual_norm(ff, Variant::wH);
        EXPECT_LE(c.value, 1.0 + 1e-6);
        // attained by u = x (x) y with f(x) = f(y) = 1
        TensorRep u;
        u.space = ff.space;
        ComplexMatrix x = ComplexMatrix::Zero(2, 1);
        x(0, 0) = fam->functionals(k, 0);
        u.left.push_back(x);
        u.right.push_back(x);
        EXPECT_NEAR(std::abs(ff.pair(u)) / wH_upper(u), 1.0, 1e-12);
        EXPECT_GE(c.value, 1.0 - 1e-6);
    }
}

TEST(DualNorm, MatchesOneParameterOracleOnL1Two) {
    // Merged sign functionals of l1_2: (1, 1) and (1, -1) with weights p, 1 - p.
    auto rng = fixture::rng_for(42);
    const auto fam = family_l1(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = gen::form(rng, MinSpace{fam}, trial % 2 == 0);
        const auto gram = [&](double p) {
            const ComplexMatrix f1 = (ComplexMatrix(1, 2) << 1.0, 1.0).finished();
            const ComplexMatrix f2 = (ComplexMatrix(1, 2) << 1.0, -1.0).finished();
            return ComplexMatrix(p * f1.adjoint() * f1 + (1.0 - p) * f2.adjoint() * f2);
        };
        const double oracle = fixture::minimize_1d(
            [&](double p) { return fixed_state_value(t.coeffs, gram(p), gram(p)); }, 1e-9, 1.0 - 1e-9, 4000);
        const auto c = dual_norm(t, Variant::wH);
        EXPECT_EQ(c.status, CertStatus::Converged);
        EXPECT_NEAR(c.value, oracle, 1e-6 * oracle);
        EXPECT_LE(c.lower, oracle * (1.0 + 1e-9));
    }
}

TEST(DualNorm, MatchesNelderMeadOracleOnM2) {
    auto rng = fixture::rng_for(43);
    for (int trial = 0; trial < 6; ++trial) {
        const auto t = gen::form(rng, MatrixAlgebra{2});
        for (auto variant : {Variant::wh, Variant::whp}) {
            const auto f = [&](const RealVector& v) {
                const auto g = gram_pair(DensityMatrix{HermitianMatrix::symmetrize(bloch_state(v))}, t.space, variant);
                return fixed_state_value(t.coeffs, g.g1.matrix(), g.g2.matrix());
            };
            double oracle = std::numeric_limits<double>::infinity();
            for (int start = 0; start < 4; ++start) {
                oracle = std::min(oracle, fixture::nelder_mead(f, 0.3 * gen::gaussian(rng, 3, 1, true).col(0).real(), 0.5));
            }
            const auto c = dual_norm(t, variant);
            EXPECT_EQ(c.status, CertStatus::Converged);
            // the certified lower bound can never exceed any feasible value
            EXPECT_LE(c.lower, oracle * (1.0 + 1e-9));
            EXPECT_NEAR(c.value, oracle, 1e-4 * oracle);
        }
    }
}

TEST(DualNorm, CertificateSoundness) {
    auto rng = fixture::rng_for(44);
    const std::vector<std::pair<Space, Variant>> cases{
        {MatrixAlgebra{2}, Variant::wh}, {MatrixAlgebra{2}, Variant::whp}, {MinSpace{family_l1(3)}, Variant::wH}};
    for (const auto& [space, variant] : cases) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto t = gen::form(rng, space);
            const auto c = dual_norm(t, variant);
            EXPECT_TRUE(domination_check(t, c.state, c.value * (1.0 + 1e-6), variant).ok);
            EXPECT_LE(c.lower, c.value);
            EXPECT_LE(c.value - c.lower, 1e-6 * c.value);
            for (int k = 0; k < 100; ++k) {
                const auto u = gen::rep_for(rng, space, gen::uniform_int(rng, 1, 4));
                double bound = 0.0;
                if (variant == Variant::wH) {
                    bound = wH_upper(u);
                } else {
                    bound = variant == Variant::wh ? wh_upper(u) : whp_upper(u);
                }
                EXPECT_LE(std::abs(t.pair(u)), c.value * bound * (1.0 + 1e-7));
            }
        }
    }
}

TEST(DualNorm, PhaseInvariance) {
    auto rng = fixture::rng_for(45);
    const auto t = gen::form(rng, MatrixAlgebra{2});
    const auto c = dual_norm(t, Variant::wh);
    const BilinearForm rotated{t.space, std::polar(1.0, 1.1) * t.coeffs};
    EXPECT_NEAR(dual_norm(rotated, Variant::wh).value, c.value, 1e-9 * c.value + 1e-6 * c.value);
}

TEST(DualNorm, MinVariantsCoincide) {
    auto rng = fixture::rng_for(46);
    const auto t = gen::form(rng, MinSpace{family_l1(3)}, true);
    const double wH = dual_norm(t, Variant::wH).value;
    EXPECT_NEAR(dual_norm(t, Variant::wh).value, wH, 1e-6 * wH);
    EXPECT_NEAR(dual_norm(t, Variant::whp).value, wH, 1e-6 * wH);
}

TEST(DualNorm, InexactFamilyIsFlagged) {
    auto rng = fixture::rng_for(47);
    const auto t = gen::form(rng, MinSpace{family_l1c(2, 6)});
    EXPECT_TRUE(dual_norm(t, Variant::wH).approximate);
    EXPECT_FALSE(dual_norm(gen::form(rng, MinSpace{family_l1(2)}), Variant::wH).approximate);
}

TEST(DualNorm, UnreachableToleranceReportsInterval) {
    auto rng = fixture::rng_for(48);
    const auto t = gen::form(rng, MatrixAlgebra{2});
    DualOptions opt;
    opt.tol = 1e-15;
    const auto c = dual_norm(t, Variant::wh, opt);
    EXPECT_EQ(c.status, CertStatus::NotConverged);
    EXPECT_LE(c.lower, c.value);
    EXPECT_GT(c.lower, 0.0);
}

TEST(DualNorm, Preconditions) {
    EXPECT_THROW(dual_norm(BilinearForm{MatrixAlgebra{2}, ComplexMatrix::Identity(4, 4)}, Variant::wH), InvalidInput);
    EXPECT_THROW(dual_norm(BilinearForm{MatrixAlgebra{7}, ComplexMatrix::Identity(49, 49)}, Variant::wh), InvalidInput);
    EXPECT_THROW(dual_norm(BilinearForm{MatrixAlgebra{2}, ComplexMatrix::Identity(3, 3)}, Variant::wh), InvalidInput);
    EXPECT_THROW(variant_from_string("wx"), InvalidInput);
}

TEST(WTensor, ZeroForm) {
    const BilinearForm zero{MinSpace{family_l1(2)}, ComplexMatrix::Zero(2, 2)};
    EXPECT_EQ(w_tensor_lower(zero, ComplexMatrix::Identity(2, 2)), 0.0);
    EXPECT_EQ(w_tensor_lower(zero, ComplexMatrix::Zero(2, 2)), 0.0);
}

TEST(WTensor, ZeroRadiusRejected) {
    const BilinearForm t{MinSpace{family_l1(2)}, ComplexMatrix::Identity(2, 2)};
    EXPECT_THROW(w_tensor_lower(t, ComplexMatrix::Zero(2, 2)), InvalidInput);
}

TEST(WTensor, JordanAlphaBelowDualNorm) {
    ComplexMatrix t = ComplexMatrix::Zero(2, 2);
    t(0, 1) = 1.0; // T(x, y) = x_1 y_2
    const BilinearForm form{MinSpace{family_l1(2)}, t};
    ComplexMatrix alpha = ComplexMatrix::Zero(2, 2);
    alpha(0, 1) = 2.0;
    const double c = dual_norm(form, Variant::wH).value;
    const double lo = w_tensor_lower(form, alpha);
    EXPECT_GT(lo, 0.0);
    EXPECT_LE(lo, c + 1e-6);
}

TEST(WTensor, NeverAboveDualNorm) {
    auto rng = fixture::rng_for(49);
    const auto fam = family_l1(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto t = gen::form(rng, MinSpace{fam}, trial % 2 == 0);
        const double c = dual_norm(t, Variant::wH).value;
        const Eigen::Index n = gen::uniform_int(rng, 1, 3);
        const double lo = w_tensor_lower(t, gen::gaussian(rng, n, n), WTensorOptions{30, static_cast<std::uint64_t>(trial), 40});
        EXPECT_LE(lo, c + 1e-6);
    }
}

TEST(WTensor, IdentityAlphaReachesDualNormForRealForms) {
    // With alpha = 1 (n = 1) and real T the supremum is attained at extreme points.
    auto rng = fixture::rng_for(50);
    const auto fam = family_l1(2);
    for (int trial = 0; trial < 5; ++trial) {
        const auto t = gen::form(rng, MinSpace{fam}, true);
        const double lo = w_tensor_lower(t, ComplexMatrix::Identity(2, 2));
        EXPECT_LE(lo, dual_norm(t, Variant::wH).value + 1e-6);
    }
}
