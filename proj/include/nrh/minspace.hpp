#pragma once

// Min(X) for a finite-dimensional X normed by a finite functional family:
// matrix norms, the embedding into the diagonal algebra C(Omega), and the wH bound.

#include "nrh/reps.hpp"

namespace nrh {

using MinVector = ComplexVector;

/// Rectangular array [x_ij] of vectors of X, row-major.
struct MinArray {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    std::vector<MinVector> entries;

    const MinVector& operator()(Eigen::Index i, Eigen::Index j) const {
        return entries[static_cast<std::size_t>(i * cols + j)];
    }
};

/// sup over the family of ||[f(x_ij)]||.
inline double min_matrix_norm(const MinArray& xs, const FunctionalFamily& fam) {
    fam.validate();
    if (static_cast<Eigen::Index>(xs.entries.size()) != xs.rows * xs.cols) {
        throw InvalidInput("min_matrix_norm: entry count does not match shape");
    }
    double best = 0.0;
    ComplexMatrix vals(xs.rows, xs.cols);
    for (Eigen::Index k = 0; k < fam.size(); ++k) {
        for (Eigen::Index i = 0; i < xs.rows; ++i) {
            for (Eigen::Index j = 0; j < xs.cols; ++j) {
                const auto& x = xs(i, j);
                if (x.size() != fam.dim) {
                    throw InvalidInput("min_matrix_norm: vector length does not match family dimension");
                }
                vals(i, j) = fam.functionals.row(k) * x;
            }
        }
        best = std::max(best, operator_norm(vals));
    }
    return best;
}

/// Each x becomes diag(f_1(x), ..., f_K(x)) in the diagonal algebra of K x K matrices.
inline TensorRep embed_min_rep(const TensorRep& rep) {
    if (is_matrix(rep.space)) {
        throw InvalidInput("embed_min_rep: rep is not over a Min(X) space");
    }
    return detail::as_matrix_rep(rep);
}

struct MinProfile {
    RealVector row; // a_k = sum_i |f_k(x_i)|^2
    RealVector col; // b_k = sum_i |f_k(y_i)|^2
};

inline MinProfile min_profile(const TensorRep& rep) {
    validate(rep);
    const auto& fam = family_of(rep.space);
    MinProfile p{RealVector::Zero(fam.size()), RealVector::Zero(fam.size())};
    for (std::size_t i = 0; i < rep.size(); ++i) {
        p.row += fam.evaluate(rep.left[i].col(0)).cwiseAbs2();
        p.col += fam.evaluate(rep.right[i].col(0)).cwiseAbs2();
    }
    return p;
}

/// inf over lambda > 0 of sup_f (1/2)(lambda^2 sum |f(x_i)|^2 + lambda^{-2} sum |f(y_i)|^2).
/// The minimum of this convex piecewise function is located exactly among the
/// piece minima and the pairwise crossings of the Pareto-maximal pieces.
inline double wH_upper(const TensorRep& rep) {
    const auto prof = min_profile(rep);
    const Eigen::Index k = prof.row.size();
    if (rep.size() == 0 || prof.row.maxCoeff() == 0.0 || prof.col.maxCoeff() == 0.0) {
        return 0.0;
    }
    std::vector<std::pair<double, double>> pieces;
    for (Eigen::Index i = 0; i < k; ++i) {
        pieces.emplace_back(prof.row(i), prof.col(i));
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& p, const auto& q) { return p.first > q.first || (p.first == q.first && p.second > q.second); });
    std::vector<std::pair<double, double>> front;
    double best_b = -1.0;
    for (const auto& pc : pieces) {
        if (pc.second > best_b) {
            front.push_back(pc);
            best_b = pc.second;
        }
    }
    auto envelope = [&](double s) {
        double v = 0.0;
        for (const auto& [a, b] : front) {
            v = std::max(v, s * a + b / s);
        }
        return 0.5 * v;
    };
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < front.size(); ++i) {
        const auto [ai, bi] = front[i];
        if (ai > 0.0 && bi > 0.0) {
            best = std::min(best, envelope(std::sqrt(bi / ai)));
        }
        for (std::size_t j = i + 1; j < front.size(); ++j) {
            const auto [aj, bj] = front[j];
            const double da = ai - aj;
            const double db = bj - bi;
            if (da != 0.0 && db / da > 0.0) {
                best = std::min(best, envelope(std::sqrt(db / da)));
            }
        }
    }
    return best;
}

} // namespace nrh
