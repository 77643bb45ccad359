#pragma once

// Finite tensor representations u = sum_i x_i (x) y_i and the
// representation-based upper bounds for the h, wh, wh' and Wh norms,
// together with the constructive conversions between wh and Wh forms.

#include "nrh/numrad.hpp"
#include "nrh/space.hpp"

namespace nrh {

struct TensorRep {
    Space space = MatrixAlgebra{1};
    std::vector<ComplexMatrix> left;
    std::vector<ComplexMatrix> right;
    bool rank_warning = false; // set by minimal_representation when singular values straddle the cut

    std::size_t size() const { return left.size(); }
};

/// u = sum_{ij} xs_i^* alpha_ij (x) xs_j.
struct WhRep {
    Space space = MatrixAlgebra{1};
    std::vector<ComplexMatrix> xs;
    ComplexMatrix alpha;
};

inline void validate(const TensorRep& rep) {
    if (rep.left.size() != rep.right.size()) {
        throw InvalidInput("tensor rep: left and right lists differ in length");
    }
    const auto [r, c] = element_shape(rep.space);
    for (std::size_t i = 0; i < rep.left.size(); ++i) {
        for (const auto* e : {&rep.left[i], &rep.right[i]}) {
            if (e->rows() != r || e->cols() != c) {
                throw InvalidInput("tensor rep: element " + std::to_string(i) + " has shape " +
                                   std::to_string(e->rows()) + "x" + std::to_string(e->cols()) + ", expected " +
                                   std::to_string(r) + "x" + std::to_string(c));
            }
            if (!detail::all_finite(*e)) {
                throw InvalidInput("tensor rep: non-finite entry");
            }
        }
    }
}

inline void validate(const WhRep& rep) {
    if (rep.alpha.rows() != rep.alpha.cols() || rep.alpha.rows() != static_cast<Eigen::Index>(rep.xs.size())) {
        throw InvalidInput("Wh rep: alpha must be square of size xs.size()");
    }
    if (!is_matrix(rep.space)) {
        throw InvalidInput("Wh rep: only matrix-algebra carriers are supported");
    }
    const auto [r, c] = element_shape(rep.space);
    for (const auto& x : rep.xs) {
        if (x.rows() != r || x.cols() != c) {
            throw InvalidInput("Wh rep: element shape mismatch");
        }
    }
}

/// U[p, q] = sum_i vec(x_i)[p] vec(y_i)[q].
inline ComplexMatrix tensor_coefficients(const TensorRep& rep) {
    validate(rep);
    const Eigen::Index d = coord_dim(rep.space);
    ComplexMatrix u = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < rep.size(); ++i) {
        u += vec(rep.left[i]) * vec(rep.right[i]).transpose();
    }
    return u;
}

inline ComplexMatrix tensor_coefficients(const WhRep& rep) {
    validate(rep);
    const Eigen::Index d = coord_dim(rep.space);
    ComplexMatrix u = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < rep.xs.size(); ++i) {
        const ComplexVector xi = vec(rep.xs[i].adjoint());
        for (std::size_t j = 0; j < rep.xs.size(); ++j) {
            const cplx a = rep.alpha(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (a != cplx(0.0)) {
                u += a * xi * vec(rep.xs[j]).transpose();
            }
        }
    }
    return u;
}

namespace detail {

// Min(X) element -> diagonal matrix diag(f_1(x), ..., f_K(x)) in C(Omega).
inline ComplexMatrix embed_element(const FunctionalFamily& fam, const ComplexMatrix& x) {
    return fam.evaluate(x.col(0)).asDiagonal();
}

inline TensorRep as_matrix_rep(const TensorRep& rep) {
    if (is_matrix(rep.space)) {
        return rep;
    }
    validate(rep);
    const auto& fam = family_of(rep.space);
    TensorRep out;
    out.space = MatrixAlgebra{fam.size()};
    out.rank_warning = rep.rank_warning;
    for (std::size_t i = 0; i < rep.size(); ++i) {
        out.left.push_back(embed_element(fam, rep.left[i]));
        out.right.push_back(embed_element(fam, rep.right[i]));
    }
    return out;
}

struct SideGrams {
    ComplexMatrix row;    // sum x x^dagger
    ComplexMatrix col;    // sum y^dagger y
    ComplexMatrix row_t;  // sum x^dagger x
};

inline SideGrams side_grams(const TensorRep& matrix_rep) {
    const auto [r, c] = element_shape(matrix_rep.space);
    SideGrams g{ComplexMatrix::Zero(r, r), ComplexMatrix::Zero(c, c), ComplexMatrix::Zero(c, c)};
    for (std::size_t i = 0; i < matrix_rep.size(); ++i) {
        g.row += matrix_rep.left[i] * matrix_rep.left[i].adjoint();
        g.col += matrix_rep.right[i].adjoint() * matrix_rep.right[i];
        g.row_t += matrix_rep.left[i].adjoint() * matrix_rep.left[i];
    }
    return g;
}

inline double psd_norm(const ComplexMatrix& g) { return std::max(0.0, lambda_max(HermitianMatrix::symmetrize(g))); }

} // namespace detail

/// ||sum x_i x_i^dagger + sum y_i^dagger y_i||^{1/2}; Min(X) reps are embedded first.
inline double block_row_norm(const TensorRep& rep) {
    validate(rep);
    if (rep.size() == 0) {
        return 0.0;
    }
    const auto g = detail::side_grams(detail::as_matrix_rep(rep));
    return std::sqrt(detail::psd_norm(g.row + g.col));
}

/// (1/2) ||[x_1, ..., x_n, y_1^*, ..., y_n^*]||^2.
inline double wh_upper(const TensorRep& rep) {
    const double b = block_row_norm(rep);
    return 0.5 * b * b;
}

/// (1/2) ||[x_1, ..., x_n, y_1, ..., y_n]^t||^2.
inline double whp_upper(const TensorRep& rep) {
    validate(rep);
    if (rep.size() == 0) {
        return 0.0;
    }
    const auto g = detail::side_grams(detail::as_matrix_rep(rep));
    return 0.5 * detail::psd_norm(g.row_t + g.col);
}

/// ||[x_1, ..., x_n]|| ||[y_1, ..., y_n]^t||.
inline double h_upper(const TensorRep& rep) {
    validate(rep);
    if (rep.size() == 0) {
        return 0.0;
    }
    const auto g = detail::side_grams(detail::as_matrix_rep(rep));
    return balance(detail::psd_norm(g.row), detail::psd_norm(g.col)).value;
}

inline TensorRep scale_sides(const TensorRep& rep, double lambda) {
    TensorRep out = rep;
    for (auto& x : out.left) {
        x *= lambda;
    }
    for (auto& y : out.right) {
        y /= lambda;
    }
    return out;
}

/// Scale factor lambda (left by lambda, right by 1/lambda) minimizing
/// (1/2) ||lambda^2 X + lambda^{-2} Y|| with X = sum x x^dagger, Y = sum y^dagger y.
/// Returns 1 when either side vanishes.
inline double rebalance_factor(const TensorRep& rep) {
    validate(rep);
    if (rep.size() == 0) {
        return 1.0;
    }
    const auto g = detail::side_grams(detail::as_matrix_rep(rep));
    const double nx = detail::psd_norm(g.row);
    const double ny = detail::psd_norm(g.col);
    if (nx == 0.0 || ny == 0.0) {
        return 1.0;
    }
    const ComplexMatrix sum = g.row + g.col;
    auto value = [&](double log_s) {
        const double s = std::exp(log_s);
        return detail::psd_norm(s * g.row + g.col / s);
    };
    // The minimizer lies within a factor 2 of the equalizing s = ny / nx.
    const double center = std::log(ny / nx) / 2.0;
    double lo = center - std::log(2.0);
    double hi = center + std::log(2.0);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo);
    double x2 = lo + gr * (hi - lo);
    double f1 = value(x1);
    double f2 = value(x2);
    while (hi - lo > 1e-13) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = value(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = value(x2);
        }
    }
    double best_log = f1 <= f2 ? x1 : x2;
    double best = std::min(f1, f2);
    for (double cand : {0.0, center}) {
        const double v = cand == 0.0 ? detail::psd_norm(sum) : value(cand);
        if (v < best) {
            best = v;
            best_log = cand;
        }
    }
    return std::exp(best_log / 2.0);
}

/// Rescales left by lambda and right by 1/lambda, with lambda minimizing the wh bound.
/// The tensor is unchanged.
inline TensorRep rebalance(const TensorRep& rep) { return scale_sides(rep, rebalance_factor(rep)); }

namespace detail {

struct ReducedSide {
    ComplexMatrix u; // N x k, orthonormal columns spanning the coordinate rows
    bool warning = false;
};

inline ReducedSide reduce_rows(const std::vector<ComplexMatrix>& elems) {
    const Eigen::Index n = static_cast<Eigen::Index>(elems.size());
    const Eigen::Index d = elems.empty() ? 0 : elems.front().size();
    ComplexMatrix coords(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        coords.row(i) = vec(elems[static_cast<std::size_t>(i)]).transpose();
    }
    ReducedSide out;
    if (n == 0 || d == 0 || max_abs(coords) == 0.0) {
        out.u = ComplexMatrix::Zero(n, 0);
        return out;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(coords, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const double rel = s(i) / smax;
        if (rel >= 1e-12 && rel <= 1e-8) {
            out.warning = true;
        }
        if (rel >= 1e-10) {
            ++k;
        }
    }
    out.u = svd.matrixU().leftCols(k);
    return out;
}

} // namespace detail

/// Rewrites the rep so both the left and right families are linearly
/// independent: y = L z with independent z, then
/// x' = x L (L^*L)^{-1/2}, y' = (L^*L)^{1/2} z, applied on the right side and
/// then on the left side. The tensor is preserved and the block row norm does
/// not increase.
inline TensorRep minimal_representation(const TensorRep& rep) {
    validate(rep);
    TensorRep cur = rep;
    cur.rank_warning = rep.rank_warning;

    // Right side: Y = U S V^dagger, x'_j = sum_i x_i U_ij, y'_j = sum_i conj(U_ij) y_i.
    {
        const auto red = detail::reduce_rows(cur.right);
        TensorRep next;
        next.space = cur.space;
        next.rank_warning = cur.rank_warning || red.warning;
        for (Eigen::Index j = 0; j < red.u.cols(); ++j) {
            ComplexMatrix x = ComplexMatrix::Zero(cur.left.front().rows(), cur.left.front().cols());
            ComplexMatrix y = ComplexMatrix::Zero(cur.right.front().rows(), cur.right.front().cols());
            for (std::size_t i = 0; i < cur.size(); ++i) {
                const cplx uij = red.u(static_cast<Eigen::Index>(i), j);
                x += uij * cur.left[i];
                y += std::conj(uij) * cur.right[i];
            }
            next.left.push_back(std::move(x));
            next.right.push_back(std::move(y));
        }
        cur = std::move(next);
    }
    // Left side, symmetrically: x''_l = sum_j conj(U'_jl) x'_j, y''_l = sum_j U'_jl y'_j.
    if (cur.size() > 0) {
        const auto red = detail::reduce_rows(cur.left);
        TensorRep next;
        next.space = cur.space;
        next.rank_warning = cur.rank_warning || red.warning;
        for (Eigen::Index l = 0; l < red.u.cols(); ++l) {
            ComplexMatrix x = ComplexMatrix::Zero(cur.left.front().rows(), cur.left.front().cols());
            ComplexMatrix y = ComplexMatrix::Zero(cur.right.front().rows(), cur.right.front().cols());
            for (std::size_t j = 0; j < cur.size(); ++j) {
                const cplx ujl = red.u(static_cast<Eigen::Index>(j), l);
                x += std::conj(ujl) * cur.left[j];
                y += ujl * cur.right[j];
            }
            next.left.push_back(std::move(x));
            next.right.push_back(std::move(y));
        }
        cur = std::move(next);
    }
    return cur;
}

/// Numerical rank of a family of elements (cut at 1e-10 relative).
inline Eigen::Index family_rank(const std::vector<ComplexMatrix>& elems) {
    return detail::reduce_rows(elems).u.cols();
}

/// ||sum xs_i^dagger xs_i|| w(alpha).
inline double Wh_upper(const WhRep& rep) {
    validate(rep);
    if (rep.xs.empty()) {
        return 0.0;
    }
    ComplexMatrix g = ComplexMatrix::Zero(rep.xs.front().cols(), rep.xs.front().cols());
    for (const auto& x : rep.xs) {
        g += x.adjoint() * x;
    }
    return detail::psd_norm(g) * numerical_radius(rep.alpha);
}

/// u = [x, y^*] [[0, 1], [0, 0]] (.) [x^*, y]^t; Min(X) reps are embedded first.
inline WhRep wh_to_Wh(const TensorRep& rep) {
    const TensorRep m = detail::as_matrix_rep(rep);
    validate(m);
    const Eigen::Index n = static_cast<Eigen::Index>(m.size());
    WhRep out;
    out.space = m.space;
    for (const auto& x : m.left) {
        out.xs.push_back(x.adjoint());
    }
    for (const auto& y : m.right) {
        out.xs.push_back(y);
    }
    out.alpha = ComplexMatrix::Zero(2 * n, 2 * n);
    out.alpha.topRightCorner(n, n) = ComplexMatrix::Identity(n, n);
    return out;
}

struct WhConversionOptions {
    double ando_tol = 1e-9;
};

/// Builds c = [x^*, 0] P^{1/2} and d = P^{1/2} [0, x]^t from an Ando witness
/// for alpha / w(alpha), rescaled back by w(alpha). The resulting wh bound is
/// (1 + eps) Wh_upper, where eps is the clamp applied to the witness.
inline TensorRep Wh_to_wh(const WhRep& rep, const WhConversionOptions& opt = {}) {
    validate(rep);
    const Eigen::Index n = static_cast<Eigen::Index>(rep.xs.size());
    TensorRep out;
    out.space = rep.space;
    const double w = numerical_radius(rep.alpha);
    if (n == 0 || w == 0.0) {
        return out;
    }
    const ComplexMatrix unit_alpha = rep.alpha / w;
    const auto ando = ando_witness(unit_alpha, AndoOptions{opt.ando_tol, std::max<Eigen::Index>(16, n)});
    if (ando.verdict != AndoVerdict::Witness) {
        throw Error("Wh_to_wh: no Ando witness for alpha / w(alpha)");
    }
    ComplexMatrix p = ando.witness->p.matrix();
    const double eps = std::max(0.0, -ando.witness->lambda_min);
    p += eps * ComplexMatrix::Identity(2 * n, 2 * n);
    const ComplexMatrix s = psd_sqrt(HermitianMatrix::symmetrize(p), 1e-7).matrix();
    const double sw = std::sqrt(w);
    const auto [r, c] = element_shape(rep.space);
    for (Eigen::Index k = 0; k < 2 * n; ++k) {
        ComplexMatrix ck = ComplexMatrix::Zero(c, r);
        ComplexMatrix dk = ComplexMatrix::Zero(r, c);
        for (Eigen::Index i = 0; i < n; ++i) {
            ck += s(i, k) * rep.xs[static_cast<std::size_t>(i)].adjoint();
            dk += s(k, n + i) * rep.xs[static_cast<std::size_t>(i)];
        }
        out.left.push_back(sw * ck);
        out.right.push_back(sw * dk);
    }
    return out;
}

} // namespace nrh
