#pragma once

// Numerical-radius norm of the Schur multiplier x -> alpha o x: an upper
// certificate from the bilinear form T(x, y) = sum_ij alpha_ij x_i y_j on
// Min(l1_n) (the wH dual norm), and a sampled lower bound
// sup_x w(alpha o x) / w(x).

#include "nrh/duality.hpp"

namespace nrh {

enum class Field { real, complex };

inline std::string to_string(Field f) { return f == Field::real ? "real" : "complex"; }

inline Field field_from_string(const std::string& s) {
    if (s == "real") return Field::real;
    if (s == "complex") return Field::complex;
    throw InvalidInput("unknown field '" + s + "' (expected real or complex)");
}

struct SchurInstance {
    ComplexMatrix alpha;
    Field field = Field::real;
    int phases = 8; // grid for the complex l1 family

    void validate() const {
        if (alpha.rows() != alpha.cols() || alpha.rows() == 0) {
            throw InvalidInput("schur: alpha must be a non-empty square matrix");
        }
        if (!detail::all_finite(alpha)) {
            throw InvalidInput("schur: non-finite entries");
        }
        if (field == Field::real) {
            if (alpha.rows() > 8) {
                throw InvalidInput("schur: real instances are supported up to n = 8");
            }
            if (alpha.imag().cwiseAbs().maxCoeff() > 0.0) {
                throw InvalidInput("schur: complex entries need --field complex");
            }
        } else if (alpha.rows() > 4) {
            throw InvalidInput("schur: complex instances are supported up to n = 4");
        }
    }

    FamilyPtr family() const {
        const Eigen::Index n = alpha.rows();
        return field == Field::real ? family_l1(n) : family_l1c(n, phases);
    }

    BilinearForm form() const { return BilinearForm{MinSpace{family()}, alpha}; }
};

inline DualCert schur_w_upper(const SchurInstance& inst, const DualOptions& opt = {}) {
    inst.validate();
    return dual_norm(inst.form(), Variant::wH, opt);
}

/// max of w(alpha o x) / w(x) over seeded random x and a fixed battery of
/// matrix units, Jordan blocks and rank-one projections.
inline double schur_w_lower(const SchurInstance& inst, int trials = 500, std::uint64_t seed = 1) {
    inst.validate();
    const Eigen::Index n = inst.alpha.rows();
    if (max_abs(inst.alpha) == 0.0) {
        return 0.0;
    }
    double best = 0.0;
    auto consider = [&](const ComplexMatrix& x) {
        const double wx = numerical_radius(x);
        if (wx < 1e-12) {
            return;
        }
        best = std::max(best, numerical_radius(inst.alpha.cwiseProduct(x)) / wx);
    };
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            ComplexMatrix e = ComplexMatrix::Zero(n, n);
            e(i, j) = 1.0;
            consider(e);
            if (i != j) {
                // 2x2 Jordan-type block on {i, j} plus its symmetrization
                ComplexMatrix s = e;
                s(j, i) = 1.0;
                consider(s);
                s(i, i) = 1.0;
                s(j, j) = 1.0;
                consider(s);
            }
        }
    }
    // full Jordan block and all-ones
    ComplexMatrix jn = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        jn(i, i + 1) = 1.0;
    }
    consider(jn);
    consider(ComplexMatrix::Ones(n, n));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (int t = 0; t < trials; ++t) {
        ComplexVector v(n);
        ComplexMatrix x(n, n);
        switch (t % 3) {
        case 0:
            for (Eigen::Index i = 0; i < n; ++i) {
                v(i) = cplx(nd(rng), nd(rng));
            }
            consider(v * v.adjoint());
            break;
        case 1:
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                x.data()[i] = cplx(nd(rng), 0.0);
            }
            consider(x);
            break;
        default:
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                x.data()[i] = cplx(nd(rng), nd(rng));
            }
            consider(x);
            break;
        }
    }
    return best;
}

} // namespace nrh
