#pragma once

// Factorizations T = a^* b a / T = a^t b a built from a dominating state by the
// GNS construction, 2-summing norms and their Pietsch measures, and the
// Banach-space factorization through a 2-summing map.
//
// Reconstruction conventions (C = coefficient matrix of T, vec row-major):
//   transpose kind:  C = a^T b a
//   adjoint kind:    C = S a^dagger b a  on M_n, S the star permutation
//                    (vec(x^*) = S conj(vec(x))), so T(x, y) = <b a vec(y), a vec(x^*)>.
// On Min(X) the adjoint is taken for the star of C(Omega), under which
// a(x^*) = conj(a(x)); the adjoint kind then reconstructs as a^T b a too.

#include "nrh/duality.hpp"

namespace nrh {

class RejectedCertificate : public Error {
public:
    using Error::Error;
};

class InconsistentCertificate : public Error {
public:
    using Error::Error;
};

enum class FactorKind { adjoint, transpose };

inline std::string to_string(FactorKind k) { return k == FactorKind::adjoint ? "adjoint" : "transpose"; }

inline FactorKind factor_kind_from_string(const std::string& s) {
    if (s == "adjoint") return FactorKind::adjoint;
    if (s == "transpose") return FactorKind::transpose;
    throw InvalidInput("unknown factorization kind '" + s + "'");
}

struct Factorization {
    ComplexMatrix a; // k x D
    ComplexMatrix b; // k x k
    FactorKind kind = FactorKind::transpose;
    double a_norm = 0.0; // cb norm of a (pi_2 on Min(X))
    double b_norm = 0.0;
    double residual = 0.0;

    double bound() const { return a_norm * a_norm * b_norm; }
};

struct GNSData {
    State state;
    ComplexMatrix basis; // orthonormal columns
    RealVector weights;
};

namespace detail {

inline double safe_norm(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : operator_norm(m); }

inline ComplexMatrix reconstruct(const Space& space, const Factorization& f) {
    const Eigen::Index d = coord_dim(space);
    if (f.a.cols() != d || f.b.rows() != f.a.rows() || f.b.cols() != f.a.rows()) {
        throw InvalidInput("factorization: shapes of a and b do not match the space");
    }
    if (f.a.rows() == 0) {
        return ComplexMatrix::Zero(d, d);
    }
    if (f.kind == FactorKind::adjoint && is_matrix(space)) {
        const ComplexMatrix s = star_permutation(space).cast<cplx>();
        return s * f.a.adjoint() * f.b * f.a;
    }
    return f.a.transpose() * f.b * f.a;
}

inline FactorKind kind_for(Variant v) { return v == Variant::wh ? FactorKind::adjoint : FactorKind::transpose; }

} // namespace detail

/// GNS space of the certificate state: eigenvectors of rho (matrix case) or
/// the supporting functionals (commutative case), weights < 1e-12 dropped.
inline GNSData gns_data(const State& state) {
    GNSData g;
    g.state = state;
    if (const auto* dm = std::get_if<DensityMatrix>(&state)) {
        const auto eig = hermitian_eig(dm->rho);
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = eig.values.size() - 1; i >= 0; --i) {
            if (eig.values(i) >= 1e-12) {
                keep.push_back(i);
            }
        }
        g.basis.resize(dm->rho.dim(), static_cast<Eigen::Index>(keep.size()));
        g.weights.resize(static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            g.basis.col(static_cast<Eigen::Index>(j)) = eig.vectors.col(keep[j]);
            g.weights(static_cast<Eigen::Index>(j)) = eig.values(keep[j]);
        }
        return g;
    }
    const auto& pv = std::get<ProbabilityVector>(state);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < pv.p.size(); ++k) {
        if (pv.p(k) >= 1e-12) {
            keep.push_back(k);
        }
    }
    g.basis = ComplexMatrix::Zero(pv.p.size(), static_cast<Eigen::Index>(keep.size()));
    g.weights.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        g.basis(keep[j], static_cast<Eigen::Index>(j)) = 1.0;
        g.weights(static_cast<Eigen::Index>(j)) = pv.p(keep[j]);
    }
    return g;
}

struct FactorizationReport {
    double residual = 0.0;
    double a_norm = 0.0;
    double b_norm = 0.0;
    double product = 0.0;
    bool a_norm_recomputed = false;
    bool residual_ok = false;
    std::optional<bool> bound_ok; // only when a target value is supplied
    bool ok() const { return residual_ok && bound_ok.value_or(true); }
};

struct Pi2Result {
    double pi2 = 0.0;
    double lower = 0.0;
    bool bounded = true;
    ProbabilityVector measure;
};

struct Pi2Options {
    double tol = 1e-6; // relative
};

/// pi_2(a) for a : X -> l2_k (a is k x dim) and its Pietsch measure:
/// the least C with ||a x||^2 <= C^2 sum_k mu_k |f_k(x)|^2 for some
/// probability vector mu on the family.
inline Pi2Result pietsch_pi2(const ComplexMatrix& a, const FamilyPtr& family, const Pi2Options& opt = {}) {
    if (!family) {
        throw InvalidInput("pietsch_pi2: no family");
    }
    const auto& fam = *family;
    if (a.cols() != fam.dim) {
        throw InvalidInput("pietsch_pi2: map has " + std::to_string(a.cols()) + " columns, family dimension is " +
                           std::to_string(fam.dim));
    }
    if (!detail::all_finite(a)) {
        throw InvalidInput("pietsch_pi2: non-finite entries");
    }
    Pi2Result res;
    res.measure.family = family;
    const Eigen::Index kall = fam.size();
    res.measure.p = RealVector::Constant(kall, 1.0 / static_cast<double>(std::max<Eigen::Index>(kall, 1)));
    try {
        fam.validate();
    } catch (const InvalidInput&) {
        if (fam.dim > 0 && fam.functionals.cols() == fam.dim && detail::all_finite(fam.functionals) &&
            fam.size() > 0) {
            res.bounded = false;
            res.pi2 = std::numeric_limits<double>::infinity();
            res.lower = res.pi2;
            return res;
        }
        throw;
    }
    if (a.rows() == 0 || max_abs(a) == 0.0) {
        return res;
    }
    const double scale = max_abs(a);
    const ComplexMatrix as = a / scale;
    const ComplexMatrix ata = as.adjoint() * as;

    const auto reps = detail::distinct_functionals(fam);
    const Eigen::Index m = static_cast<Eigen::Index>(reps.size());
    detail::LmiProblem lmi;
    lmi.cost = RealVector::Ones(m);
    detail::LmiBlock blk;
    blk.f0 = -ata;
    for (Eigen::Index j = 0; j < m; ++j) {
        const ComplexMatrix row = fam.functionals.row(reps[static_cast<std::size_t>(j)]);
        blk.fa.push_back(row.adjoint() * row);
        lmi.nonneg.push_back(j);
    }
    lmi.blocks.push_back(std::move(blk));

    auto gram = [&](const RealVector& nu) {
        ComplexMatrix g = ComplexMatrix::Zero(fam.dim, fam.dim);
        for (Eigen::Index j = 0; j < m; ++j) {
            g += nu(j) * lmi.blocks[0].fa[static_cast<std::size_t>(j)];
        }
        return g;
    };
    // Least C^2 for a fixed measure: largest generalized eigenvalue of (a^dagger a, G).
    auto c2_for = [&](const RealVector& mu) {
        const ComplexMatrix g = gram(mu);
        const ComplexMatrix gih = pinv(psd_sqrt(HermitianMatrix::symmetrize(g), 1e-6).matrix());
        return lambda_max(HermitianMatrix::symmetrize(gih * ata * gih));
    };

    RealVector z0 = RealVector::Constant(m, 1.0 / static_cast<double>(m));
    z0 *= 2.0 * c2_for(z0) + 1e-3;

    detail::BarrierOptions bo;
    bo.rel_gap_tol = 0.05 * opt.tol;
    bo.gap_tol = 1e-14;
    bo.t0 = detail::barrier_degree(lmi) / z0.sum();
    const auto br = detail::barrier_minimize(lmi, z0, bo);

    RealVector mu = br.z.cwiseMax(0.0);
    mu /= mu.sum();
    double c2 = c2_for(mu);
    // Guard against the pseudo-inverse hiding a direction the measure misses.
    auto feasible = [&](double c) { return lambda_min(HermitianMatrix::symmetrize(c * gram(mu) - ata)) >= -1e-12; };
    for (int i = 0; i < 80 && !feasible(c2); ++i) {
        c2 *= 1.0 + 1e-10 * std::pow(2.0, i);
    }

    const ComplexMatrix& w = br.inverses.front();
    RealVector g(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        g(j) = (w * lmi.blocks[0].fa[static_cast<std::size_t>(j)]).trace().real();
    }
    const double price = g.maxCoeff();
    const double low2 = price > 0.0 ? (w * ata).trace().real() / price : 0.0;

    res.measure.p = RealVector::Zero(kall);
    for (Eigen::Index j = 0; j < m; ++j) {
        res.measure.p(reps[static_cast<std::size_t>(j)]) = mu(j);
    }
    res.pi2 = std::sqrt(c2) * scale;
    res.lower = std::sqrt(std::clamp(low2, 0.0, c2)) * scale;
    return res;
}

/// Recomputes the reconstruction, the norms and (optionally) the bound
/// a_norm^2 b_norm <= target (1 + tol). a_norm is recomputed as pi_2 on
/// Min(X); on M_n it is recomputed when a has the GNS shape x -> x R.
inline FactorizationReport verify_factorization(const BilinearForm& t, const Factorization& f,
                                                std::optional<double> target = std::nullopt,
                                                double tol = 1e-4) {
    t.validate();
    FactorizationReport rep;
    rep.residual = max_abs(t.coeffs - detail::reconstruct(t.space, f));
    rep.b_norm = detail::safe_norm(f.b);
    rep.a_norm = f.a_norm;
    if (f.a.rows() == 0) {
        rep.a_norm = 0.0;
        rep.a_norm_recomputed = true;
    } else if (const auto* ms = std::get_if<MinSpace>(&t.space)) {
        rep.a_norm = pietsch_pi2(f.a, ms->family).pi2;
        rep.a_norm_recomputed = true;
    } else {
        const Eigen::Index n = std::get<MatrixAlgebra>(t.space).n;
        if (f.a.rows() % n == 0) {
            const Eigen::Index s = f.a.rows() / n;
            const ComplexMatrix rt = f.a.topLeftCorner(s, n);
            if (max_abs(f.a - kron(ComplexMatrix::Identity(n, n), rt)) <= 1e-12 * (1.0 + max_abs(f.a))) {
                rep.a_norm = rt.norm();
                rep.a_norm_recomputed = true;
            }
        }
    }
    rep.product = rep.a_norm * rep.a_norm * rep.b_norm;
    rep.residual_ok = rep.residual <= 1e-6 * (1.0 + detail::safe_norm(t.coeffs));
    if (target) {
        rep.bound_ok = rep.product <= *target * (1.0 + tol);
    }
    return rep;
}

/// Builds a and b from a dominating state (GNS construction); b is the least
/// squares solution on the range of a and zero on its complement.
inline Factorization gns_factorize(const BilinearForm& t, const DualCert& cert, double tol = 1e-6) {
    t.validate();
    detail::check_variant(t.space, cert.variant);
    const auto chk = domination_check(t, cert.state, cert.value * (1.0 + tol), cert.variant);
    if (!chk.ok) {
        throw RejectedCertificate("gns_factorize: state does not dominate T at the certified value (lambda_min = " +
                                  std::to_string(chk.lambda_min) + ")");
    }
    Factorization f;
    f.kind = detail::kind_for(cert.variant);
    const Eigen::Index d = coord_dim(t.space);
    const bool zero = max_abs(t.coeffs) == 0.0;
    const auto g = gns_data(cert.state);
    if (zero) {
        f.a = ComplexMatrix::Zero(0, d);
        f.b = ComplexMatrix::Zero(0, 0);
        return f;
    }
    if (g.weights.size() == 0) {
        throw InconsistentCertificate("gns_factorize: state has empty support but T is non-zero");
    }
    if (const auto* ma = std::get_if<MatrixAlgebra>(&t.space)) {
        // a(x) = x V diag(sqrt w): the GNS map x -> x rho^{1/2} with the
        // unitary V^dagger on the right dropped.
        const ComplexMatrix r = g.basis * g.weights.cwiseSqrt().cast<cplx>().asDiagonal();
        f.a = kron(ComplexMatrix::Identity(ma->n, ma->n), r.transpose());
        f.a_norm = std::sqrt(g.weights.sum());
    } else {
        const auto& fam = family_of(t.space);
        ComplexMatrix a(g.weights.size(), fam.dim);
        for (Eigen::Index j = 0; j < g.weights.size(); ++j) {
            Eigen::Index k = 0;
            g.basis.col(j).cwiseAbs().maxCoeff(&k);
            a.row(j) = std::sqrt(g.weights(j)) * fam.functionals.row(k);
        }
        // Keep k <= dim: rotate onto the row space of a, an isometry of K.
        if (a.rows() > fam.dim) {
            Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
            a = svd.singularValues().cast<cplx>().asDiagonal() * svd.matrixV().adjoint();
        }
        f.a = a;
        f.a_norm = std::sqrt(g.weights.sum());
    }
    const ComplexMatrix pa = pinv(f.a);
    if (f.kind == FactorKind::adjoint && is_matrix(t.space)) {
        const ComplexMatrix s = star_permutation(t.space).cast<cplx>();
        f.b = pinv(f.a.adjoint()) * s * t.coeffs * pa;
    } else {
        f.b = pinv(f.a.transpose()) * t.coeffs * pa;
    }
    f.b_norm = detail::safe_norm(f.b);
    f.residual = max_abs(t.coeffs - detail::reconstruct(t.space, f));
    return f;
}

/// Factorization through a 2-summing map: T = a^t b a with a : X -> l2_k,
/// a_norm = pi_2(a) recomputed from the Pietsch problem.
inline Factorization banach_factorize(const BilinearForm& t, const DualOptions& opt = {}) {
    t.validate();
    if (is_matrix(t.space)) {
        throw InvalidInput("banach_factorize: T must be a form on a Min(X) space");
    }
    const auto cert = dual_norm(t, Variant::wH, opt);
    auto f = gns_factorize(t, cert, opt.tol);
    f.kind = FactorKind::transpose;
    if (f.a.rows() > 0) {
        f.a_norm = pietsch_pi2(f.a, std::get<MinSpace>(t.space).family).pi2;
    }
    return f;
}

struct CbLowerOptions {
    int starts = 8;
    int steps = 2000;
    std::uint64_t seed = 11;
};

/// Lower bound for the column cb norm of a : Min(X) -> l2_k at matrix level
/// `level`: sup over X = [x_1 ... x_level] of (sum ||a x_i||^2 / sup_f sum |f(x_i)|^2)^{1/2}.
inline double cb_lower_column(const ComplexMatrix& a, const FamilyPtr& family, int level,
                              const CbLowerOptions& opt = {}) {
    if (!family) {
        throw InvalidInput("cb_lower_column: no family");
    }
    const auto& fam = *family;
    if (level < 1 || level > 8) {
        throw InvalidInput("cb_lower_column: level must be in [1, 8]");
    }
    if (a.cols() != fam.dim) {
        throw InvalidInput("cb_lower_column: map does not act on the family's space");
    }
    if (a.rows() == 0 || max_abs(a) == 0.0) {
        return 0.0;
    }
    const ComplexMatrix ata = a.adjoint() * a;
    const ComplexMatrix& phi = fam.functionals;
    auto ratio = [&](const ComplexMatrix& x) {
        const double den = (phi * x).rowwise().squaredNorm().maxCoeff();
        return den > 0.0 ? (x.adjoint() * ata * x).trace().real() / den : 0.0;
    };
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd;
    double best = 0.0;
    // Deterministic starts: unit vectors, then random matrices.
    std::vector<ComplexMatrix> starts;
    for (Eigen::Index j = 0; j < fam.dim; ++j) {
        ComplexMatrix x = ComplexMatrix::Zero(fam.dim, level);
        x(j, 0) = 1.0;
        best = std::max(best, ratio(x));
    }
    for (int s = 0; s < opt.starts; ++s) {
        ComplexMatrix x(fam.dim, level);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x.data()[i] = cplx(nd(rng), s % 2 == 0 ? 0.0 : nd(rng));
        }
        starts.push_back(std::move(x));
    }
    for (auto& x : starts) {
        // Smoothed objective: tr(X^dagger A X) / softmax_beta(m_k), beta increasing.
        double cur = ratio(x);
        for (double beta : {20.0, 200.0, 2000.0, 20000.0}) {
            auto smooth = [&](const ComplexMatrix& y, ComplexMatrix* grad) {
                const ComplexMatrix py = phi * y;
                const RealVector mk = py.rowwise().squaredNorm();
                const double mmax = mk.maxCoeff();
                if (mmax <= 0.0) {
                    return 0.0;
                }
                const RealVector e = ((mk.array() - mmax) * (beta / mmax)).exp().matrix();
                const double se = e.sum();
                const double den = mmax + (mmax / beta) * std::log(se);
                const double num = (y.adjoint() * ata * y).trace().real();
                if (grad != nullptr) {
                    // d den / d conj(Y) = sum_k (e_k / se) f_k^dagger f_k Y
                    const ComplexMatrix dden = phi.adjoint() * ((e / se).cast<cplx>().asDiagonal() * py);
                    *grad = (ata * y) / den - (num / (den * den)) * dden;
                }
                return num / den;
            };
            double step = 0.1;
            ComplexMatrix grad;
            double val = smooth(x, &grad);
            for (int it = 0; it < opt.steps && step > 1e-12; ++it) {
                const double xn = x.norm();
                const double gn = grad.norm();
                if (gn == 0.0 || xn == 0.0) {
                    break;
                }
                ComplexMatrix y = x + (step * xn / gn) * grad;
                ComplexMatrix gy;
                const double vy = smooth(y, &gy);
                if (vy > val) {
                    x = y / y.norm();
                    val = smooth(x, &grad);
                    step *= 1.3;
                } else {
                    step *= 0.5;
                }
            }
            cur = std::max(cur, ratio(x));
        }
        best = std::max(best, cur);
    }
    return std::sqrt(best);
}

} // namespace nrh
