#include "helpers.hpp"

#include "nrh/schur.hpp"

using namespace nrh;

namespace {

ComplexMatrix unit(Eigen::Index n, Eigen::Index i, Eigen::Index j, cplx v = 1.0) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(i, j) = v;
    return e;
}

} // namespace

TEST(Schur, IdentityPattern) {
    for (Eigen::Index n = 1; n <= 4; ++n) {
        const SchurInstance inst{ComplexMatrix::Identity(n, n)};
        EXPECT_NEAR(schur_w_upper(inst).value, 1.0, 1e-4);
        EXPECT_GE(schur_w_lower(inst), 1.0 - 1e-9);
        EXPECT_LE(schur_w_lower(inst), 1.0 + 1e-9);
    }
}

TEST(Schur, ZeroPattern) {
    const SchurInstance inst{ComplexMatrix::Zero(3, 3)};
    EXPECT_EQ(schur_w_upper(inst).value, 0.0);
    EXPECT_EQ(schur_w_lower(inst), 0.0);
}

TEST(Schur, AllOnesIsTheIdentityMap) {
    const SchurInstance inst{ComplexMatrix::Ones(3, 3)};
    EXPECT_NEAR(schur_w_upper(inst).value, 1.0, 1e-3);
    EXPECT_NEAR(schur_w_lower(inst), 1.0, 1e-9);
}

TEST(Schur, JordanPattern) {
    // alpha o e12 = 2 e12 and w(e12) = 1/2, so the ratio is 2.
    const SchurInstance inst{unit(2, 0, 1, 2.0)};
    EXPECT_NEAR(numerical_radius(inst.alpha.cwiseProduct(unit(2, 0, 1))), 1.0, 1e-10);
    const double lo = schur_w_lower(inst);
    EXPECT_GE(lo, 2.0 - 1e-9);
    EXPECT_GE(schur_w_upper(inst).value, lo - 1e-3);
}

TEST(Schur, DiagonalPatternsBracketMaxEntry) {
    auto rng = fixture::rng_for(80);
    for (int trial = 0; trial < 6; ++trial) {
        const Eigen::Index n = gen::uniform_int(rng, 2, 5);
        const ComplexMatrix d = gen::gaussian(rng, n, 1, true);
        const SchurInstance inst{ComplexMatrix(d.col(0).asDiagonal())};
        const double target = d.cwiseAbs().maxCoeff();
        EXPECT_NEAR(schur_w_upper(inst).value, target, 1e-3 * std::max(1.0, target));
        EXPECT_NEAR(schur_w_lower(inst, 100), target, 1e-3 * std::max(1.0, target));
    }
}

TEST(Schur, LowerNeverAboveUpper) {
    auto rng = fixture::rng_for(81);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = gen::uniform_int(rng, 2, 4);
        const SchurInstance inst{gen::gaussian(rng, n, n, true)};
        EXPECT_LE(schur_w_lower(inst, 100, static_cast<std::uint64_t>(trial)), schur_w_upper(inst).value + 1e-3);
    }
}

TEST(Schur, PermutationCovariance) {
    auto rng = fixture::rng_for(82);
    const ComplexMatrix a = gen::gaussian(rng, 3, 3, true);
    Eigen::PermutationMatrix<Eigen::Dynamic> p(3);
    p.indices() << 2, 0, 1;
    const ComplexMatrix pa = p * a * p.transpose();
    const double up = schur_w_upper(SchurInstance{a}).value;
    EXPECT_NEAR(schur_w_upper(SchurInstance{pa}).value, up, 1e-6 * std::max(1.0, up));
}

TEST(Schur, LowerIsDeterministicPerSeed) {
    auto rng = fixture::rng_for(83);
    const SchurInstance inst{gen::gaussian(rng, 3, 3, true)};
    EXPECT_EQ(schur_w_lower(inst, 50, 9), schur_w_lower(inst, 50, 9));
}

TEST(Schur, ComplexPatternIsApproximate) {
    SchurInstance inst{ComplexMatrix::Identity(2, 2)};
    inst.alpha(0, 1) = cplx(0.0, 0.5);
    inst.field = Field::complex;
    const auto c = schur_w_upper(inst);
    EXPECT_TRUE(c.approximate);
    EXPECT_GE(c.value, schur_w_lower(inst, 100) - 1e-3);
}

TEST(Schur, Preconditions) {
    EXPECT_THROW(schur_w_upper(SchurInstance{ComplexMatrix::Identity(2, 3)}), InvalidInput);
    EXPECT_THROW(schur_w_upper(SchurInstance{ComplexMatrix::Identity(9, 9)}), InvalidInput);
    EXPECT_THROW(schur_w_upper(SchurInstance{ComplexMatrix::Constant(2, 2, cplx(0, 1))}), InvalidInput);
    EXPECT_THROW(schur_w_upper(SchurInstance{ComplexMatrix::Identity(5, 5), Field::complex}), InvalidInput);
    EXPECT_THROW(field_from_string("quaternion"), InvalidInput);
}
