#pragma once

// Dual norms of bilinear forms T(x, y) = vec(x)^T C vec(y) through state
// domination, and sampled lower bounds through w(T (x) alpha) / w(alpha).
//
// Orientation. T is bilinear; the Gram forms of a state are sesquilinear:
//   vec(x)^dagger G1 vec(x) = p(x x^*)   (variant wh)   or p(x^* x)  (variant whp),
//   vec(y)^dagger G2 vec(y) = p(y^* y).
// Writing u = conj(vec(x)) gives T(x, y) = u^dagger C vec(y) and
// vec(x)^dagger G1 vec(x) = u^dagger conj(G1) u, so
//   |T(x, y)| <= c p(.)^{1/2} p(.)^{1/2}  for all x, y
// holds exactly when [[c conj(G1), C], [C^dagger, c G2]] is PSD.
// On Min(X) all three variants coincide (the algebra C(Omega) is commutative).

#include "nrh/detail/barrier.hpp"
#include "nrh/minspace.hpp"

#include <random>

namespace nrh {

enum class Variant { wh, whp, wH };

inline std::string to_string(Variant v) {
    switch (v) {
    case Variant::wh: return "wh";
    case Variant::whp: return "whp";
    case Variant::wH: return "wH";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "wh") return Variant::wh;
    if (s == "whp") return Variant::whp;
    if (s == "wH") return Variant::wH;
    throw InvalidInput("unknown variant '" + s + "' (expected wh, whp or wH)");
}

/// T(x, y) = vec(x)^T coeffs vec(y), vec row-major.
struct BilinearForm {
    Space space = MatrixAlgebra{1};
    ComplexMatrix coeffs;

    void validate() const {
        const Eigen::Index d = coord_dim(space);
        if (coeffs.rows() != d || coeffs.cols() != d) {
            throw InvalidInput("bilinear form: coefficient matrix must be " + std::to_string(d) + "x" +
                               std::to_string(d));
        }
        if (!detail::all_finite(coeffs)) {
            throw InvalidInput("bilinear form: non-finite coefficients");
        }
    }

    cplx operator()(const ComplexMatrix& x, const ComplexMatrix& y) const {
        return (vec(x).transpose() * coeffs * vec(y))(0, 0);
    }

    /// T(u) = sum_i T(x_i, y_i).
    cplx pair(const TensorRep& u) const {
        cplx s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            s += (*this)(u.left[i], u.right[i]);
        }
        return s;
    }
};

struct DensityMatrix {
    HermitianMatrix rho;
};

struct ProbabilityVector {
    RealVector p;
    FamilyPtr family;
};

using State = std::variant<DensityMatrix, ProbabilityVector>;

struct GramPair {
    HermitianMatrix g1;
    HermitianMatrix g2;
};

inline GramPair gram_pair(const State& state, const Space& space, Variant variant = Variant::wh) {
    if (const auto* dm = std::get_if<DensityMatrix>(&state)) {
        const auto* ma = std::get_if<MatrixAlgebra>(&space);
        if (ma == nullptr || dm->rho.dim() != ma->n) {
            throw InvalidInput("gram_pair: density matrix does not match the space");
        }
        const ComplexMatrix id = ComplexMatrix::Identity(ma->n, ma->n);
        const ComplexMatrix rho = dm->rho.matrix();
        const ComplexMatrix right = kron(id, rho.transpose()); // p(y^* y)
        const ComplexMatrix left = variant == Variant::wh ? kron(rho, id) : right;
        return {HermitianMatrix::symmetrize(left), HermitianMatrix::symmetrize(right)};
    }
    const auto& pv = std::get<ProbabilityVector>(state);
    const auto& fam = family_of(space);
    if (pv.p.size() != fam.size()) {
        throw InvalidInput("gram_pair: probability vector does not match the family");
    }
    const ComplexMatrix g = fam.functionals.adjoint() * pv.p.cast<cplx>().asDiagonal() * fam.functionals;
    const auto h = HermitianMatrix::symmetrize(g);
    return {h, h};
}

namespace detail {

inline ComplexMatrix domination_block(const ComplexMatrix& c_coeffs, const ComplexMatrix& g1, const ComplexMatrix& g2,
                                      double c) {
    const Eigen::Index d = c_coeffs.rows();
    ComplexMatrix m(2 * d, 2 * d);
    m.topLeftCorner(d, d) = c * g1.conjugate();
    m.topRightCorner(d, d) = c_coeffs;
    m.bottomLeftCorner(d, d) = c_coeffs.adjoint();
    m.bottomRightCorner(d, d) = c * g2;
    return m;
}

inline void check_variant(const Space& space, Variant v) {
    if (v == Variant::wH && is_matrix(space)) {
        throw InvalidInput("variant wH requires a Min(X) space");
    }
}

} // namespace detail

struct DominationCheck {
    bool ok = false;
    double lambda_min = 0.0;
};

inline constexpr double kTolFeas = 1e-8;

/// ok iff lambda_min([[c conj(G1), C], [C^dagger, c G2]]) >= -tol_feas.
inline DominationCheck domination_check(const BilinearForm& t, const State& state, double c,
                                        Variant variant = Variant::wh, double tol_feas = kTolFeas) {
    t.validate();
    if (c < 0.0) {
        throw InvalidInput("domination_check: c must be non-negative");
    }
    const auto g = gram_pair(state, t.space, variant);
    const auto blk = detail::domination_block(t.coeffs, g.g1.matrix(), g.g2.matrix(), c);
    const double lm = lambda_min(HermitianMatrix::symmetrize(blk));
    return {lm >= -tol_feas, lm};
}

enum class CertStatus { Converged, NotConverged };

struct DualCert {
    double value = 0.0; // certified upper bound c*
    double lower = 0.0; // certified lower bound (dual feasible point)
    State state;
    Variant variant = Variant::wh;
    double slack = 0.0; // lambda_min of the domination block at value (1 + tol)
    CertStatus status = CertStatus::Converged;
    bool approximate = false; // family is a discretization of the dual ball
};

struct DualOptions {
    double tol = 1e-6;          // relative, on c
    double tol_feas = kTolFeas;
    int bisection_cap = 60;
    int inner_cap = 2000;        // Newton steps budget
};

namespace detail {

// Rows of the family that are unimodular multiples of each other give the same
// Gram contribution; keep the first of each class.
inline std::vector<Eigen::Index> distinct_functionals(const FunctionalFamily& fam) {
    std::vector<Eigen::Index> reps;
    for (Eigen::Index k = 0; k < fam.size(); ++k) {
        const ComplexVector fk = fam.functionals.row(k).transpose();
        bool dup = false;
        for (auto r : reps) {
            const ComplexVector fr = fam.functionals.row(r).transpose();
            const double nk = fk.norm();
            const double nr = fr.norm();
            if (std::abs(nk - nr) <= 1e-12 * std::max(nk, 1.0) &&
                std::abs(std::abs(fr.dot(fk)) - nk * nr) <= 1e-12 * std::max(nk * nr, 1.0)) {
                dup = true;
                break;
            }
        }
        if (!dup) {
            reps.push_back(k);
        }
    }
    return reps;
}

struct StateProblem {
    LmiProblem lmi;
    RealVector z0;
    // maps dual quantities <W, F_a> of the domination block to the largest
    // "price" of a state; the dual point W / price is feasible.
    std::function<double(const RealVector&)> price;
    std::function<State(const RealVector&)> to_state;
};

inline StateProblem build_state_problem(const BilinearForm& t, Variant variant, const ComplexMatrix& scaled) {
    StateProblem sp;
    const Eigen::Index d = scaled.rows();
    LmiBlock dom;
    dom.f0 = ComplexMatrix::Zero(2 * d, 2 * d);
    dom.f0.topRightCorner(d, d) = scaled;
    dom.f0.bottomLeftCorner(d, d) = scaled.adjoint();

    if (const auto* ma = std::get_if<MatrixAlgebra>(&t.space)) {
        const Eigen::Index n = ma->n;
        const auto basis = hermitian_basis(n);
        const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
        LmiBlock pos;
        pos.f0 = ComplexMatrix::Zero(n, n);
        sp.lmi.cost = RealVector::Zero(m);
        for (Eigen::Index a = 0; a < m; ++a) {
            const auto& e = basis[static_cast<std::size_t>(a)];
            const auto g = gram_pair(DensityMatrix{HermitianMatrix::symmetrize(e)}, t.space, variant);
            dom.fa.push_back(domination_block(ComplexMatrix::Zero(d, d), g.g1.matrix(), g.g2.matrix(), 1.0));
            pos.fa.push_back(e);
            sp.lmi.cost(a) = e.trace().real();
        }
        sp.lmi.blocks.push_back(std::move(dom));
        sp.lmi.blocks.push_back(std::move(pos));
        sp.price = [basis, n](const RealVector& g) {
            ComplexMatrix adj = ComplexMatrix::Zero(n, n);
            for (std::size_t a = 0; a < basis.size(); ++a) {
                adj += g(static_cast<Eigen::Index>(a)) * basis[a];
            }
            return lambda_max(HermitianMatrix::symmetrize(adj));
        };
        sp.to_state = [n](const RealVector& z) {
            ComplexMatrix s = from_hermitian_coords(z, n);
            s /= s.trace().real();
            return State{DensityMatrix{HermitianMatrix::symmetrize(s)}};
        };
        // start: maximally mixed state, scaled until the block is PD
        RealVector z0 = to_hermitian_coords(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
        sp.z0 = z0;
        return sp;
    }

    const auto& fam = family_of(t.space);
    const auto reps = distinct_functionals(fam);
    const Eigen::Index m = static_cast<Eigen::Index>(reps.size());
    sp.lmi.cost = RealVector::Ones(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        const ComplexMatrix row = fam.functionals.row(reps[static_cast<std::size_t>(a)]);
        const ComplexMatrix g = row.adjoint() * row;
        dom.fa.push_back(domination_block(ComplexMatrix::Zero(d, d), g, g, 1.0));
        sp.lmi.nonneg.push_back(a);
    }
    sp.lmi.blocks.push_back(std::move(dom));
    sp.price = [](const RealVector& g) { return g.maxCoeff(); };
    const FamilyPtr famp = std::get<MinSpace>(t.space).family;
    sp.to_state = [famp, reps](const RealVector& z) {
        RealVector p = RealVector::Zero(famp->size());
        const double total = z.sum();
        for (std::size_t a = 0; a < reps.size(); ++a) {
            p(reps[a]) = std::max(0.0, z(static_cast<Eigen::Index>(a))) / total;
        }
        return State{ProbabilityVector{p, famp}};
    };
    sp.z0 = RealVector::Constant(m, 1.0 / static_cast<double>(m));
    return sp;
}

inline double state_mass(const RealVector& z, const LmiProblem& lmi) { return lmi.cost.dot(z); }

} // namespace detail

/// Smallest c such that some state dominates T at level c (the dual norm in
/// the given variant). The optimal state is found by a barrier method on
///   minimize tr(sigma)  s.t.  [[conj(G1(sigma)), C], [C^dagger, G2(sigma)]] >= 0, sigma >= 0,
/// then c is tightened by bisection for that fixed state. The lower bound
/// comes from the rescaled inverse block, a feasible point of the dual problem.
inline DualCert dual_norm(const BilinearForm& t, Variant variant, const DualOptions& opt = {}) {
    t.validate();
    detail::check_variant(t.space, variant);
    if (const auto* ma = std::get_if<MatrixAlgebra>(&t.space); ma != nullptr && ma->n > 6) {
        throw InvalidInput("dual_norm: matrix algebras are supported up to n = 6");
    }
    if (!is_matrix(t.space)) {
        const auto& fam = family_of(t.space);
        fam.validate();
        if (fam.dim > 10) {
            throw InvalidInput("dual_norm: Min(X) spaces are supported up to dim 10");
        }
    }
    DualCert cert;
    cert.variant = variant;
    cert.approximate = !is_matrix(t.space) && !family_of(t.space).exact;

    const double scale = max_abs(t.coeffs);
    const ComplexMatrix unit = scale > 0.0 ? ComplexMatrix(t.coeffs / scale) : t.coeffs;
    auto sp = detail::build_state_problem(t, variant, unit);

    if (scale == 0.0) {
        cert.state = sp.to_state(sp.z0);
        cert.value = 0.0;
        cert.lower = 0.0;
        cert.slack = domination_check(t, cert.state, 0.0, variant, opt.tol_feas).lambda_min;
        return cert;
    }

    // Scale the starting state until the block is strictly PD.
    RealVector z0 = sp.z0;
    {
        const State s0 = sp.to_state(z0);
        const auto g = gram_pair(s0, t.space, variant);
        const ComplexMatrix g1 = g.g1.matrix().conjugate();
        const ComplexMatrix a = psd_sqrt(HermitianMatrix::symmetrize(g1)).matrix();
        const ComplexMatrix b = psd_sqrt(g.g2).matrix();
        const double k = operator_norm(pinv(a) * unit * pinv(b));
        z0 *= (2.0 * k + 1e-3) / detail::state_mass(z0, sp.lmi);
    }

    detail::BarrierOptions bo;
    bo.rel_gap_tol = 0.05 * opt.tol;
    bo.gap_tol = 1e-14;
    bo.t0 = detail::barrier_degree(sp.lmi) / detail::state_mass(z0, sp.lmi);
    bo.max_newton_per_center = std::max(20, opt.inner_cap / 20);
    const auto br = detail::barrier_minimize(sp.lmi, z0, bo);

    // Lower bound from the dual point W / price(W).
    const ComplexMatrix& w = br.inverses.front();
    const auto& dom = sp.lmi.blocks.front();
    RealVector g(static_cast<Eigen::Index>(dom.fa.size()));
    for (std::size_t a = 0; a < dom.fa.size(); ++a) {
        g(static_cast<Eigen::Index>(a)) = (w * dom.fa[a]).trace().real();
    }
    const double price = sp.price(g);
    double lower = 0.0;
    if (price > 0.0) {
        lower = std::max(0.0, -(w * dom.f0).trace().real() / price);
    }

    // Tighten the value for the state found, by bisection on c.
    cert.state = sp.to_state(br.z);
    const BilinearForm unit_form{t.space, unit};
    double hi = detail::state_mass(br.z, sp.lmi);
    double lo = std::min(lower, hi);
    auto feasible = [&](double c) {
        return domination_check(unit_form, cert.state, c, variant, 0.0).ok;
    };
    if (!feasible(hi)) {
        // numerical edge: walk the upper end out until the fixed state certifies it
        for (int i = 0; i < 60 && !feasible(hi); ++i) {
            hi *= 1.0 + 1e-9 * std::pow(2.0, i);
        }
    }
    for (int it = 0; it < opt.bisection_cap && hi - lo > 1e-3 * opt.tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    cert.value = hi * scale;
    cert.lower = std::min(lower, hi) * scale;
    cert.slack = domination_check(t, cert.state, cert.value * (1.0 + opt.tol), variant, opt.tol_feas).lambda_min;
    cert.status = (cert.value - cert.lower) <= opt.tol * cert.value ? CertStatus::Converged : CertStatus::NotConverged;
    return cert;
}

struct WTensorOptions {
    int trials = 200;
    std::uint64_t seed = 7;
    int ascent_steps = 60;
};

namespace detail {

// |sum_ij alpha_ij x_i^* T x_j| for X = [x_1 ... x_n] (coordinate columns), x_i^* = conj(x_i).
inline cplx wtensor_value(const ComplexMatrix& c, const ComplexMatrix& alpha, const ComplexMatrix& x) {
    const ComplexMatrix gram = x.adjoint() * c * x;
    return (alpha.array() * gram.array()).sum();
}

inline double wtensor_scale(const FunctionalFamily& fam, const ComplexMatrix& x) {
    return (fam.functionals * x).rowwise().squaredNorm().maxCoeff();
}

} // namespace detail

/// Max over sampled tuples (x_1, ..., x_n) with sup_f sum |f(x_i)|^2 <= 1 of
/// |sum_ij alpha_ij T(x_i^*, x_j)| / w(alpha). Every sample is a feasible
/// point, so the result is a lower bound for the dual norm.
inline double w_tensor_lower(const BilinearForm& t, const ComplexMatrix& alpha, const WTensorOptions& opt = {}) {
    t.validate();
    const auto& fam = family_of(t.space);
    if (alpha.rows() != alpha.cols()) {
        throw InvalidInput("w_tensor_lower: alpha must be square");
    }
    const double w = numerical_radius(alpha);
    if (max_abs(t.coeffs) == 0.0) {
        return 0.0;
    }
    if (w == 0.0) {
        throw InvalidInput("w_tensor_lower: w(alpha) = 0");
    }
    const Eigen::Index dim = fam.dim;
    const Eigen::Index n = alpha.rows();
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd;
    auto ratio = [&](const ComplexMatrix& x) {
        const double s = detail::wtensor_scale(fam, x);
        return s > 0.0 ? std::abs(detail::wtensor_value(t.coeffs, alpha, x)) / s : 0.0;
    };
    double best = 0.0;
    for (int trial = 0; trial < opt.trials; ++trial) {
        ComplexMatrix x(dim, n);
        const bool real_start = trial % 2 == 0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x.data()[i] = real_start ? cplx(nd(rng), 0.0) : cplx(nd(rng), nd(rng));
        }
        double cur = ratio(x);
        double step = 0.3;
        for (int it = 0; it < opt.ascent_steps && step > 1e-8; ++it) {
            // Wirtinger gradient of |q|^2 with respect to conj(X).
            const cplx q = detail::wtensor_value(t.coeffs, alpha, x);
            ComplexMatrix grad = std::conj(q) * t.coeffs * x * alpha.transpose() +
                                 q * t.coeffs.adjoint() * x * alpha.conjugate();
            const double gn = grad.norm();
            if (gn == 0.0) {
                break;
            }
            grad *= x.norm() / gn;
            ComplexMatrix trial_x = x + step * grad;
            const double r = ratio(trial_x);
            if (r > cur) {
                x = trial_x;
                cur = r;
                step *= 1.5;
            } else {
                step *= 0.5;
            }
        }
        best = std::max(best, cur);
    }
    return best / w;
}

} // namespace nrh
