#pragma once

// Seeded instance generators shared by the verification suites and tests.

#include "nrh/duality.hpp"

#include <random>

namespace nrh::gen {

using Rng = std::mt19937_64;

inline ComplexMatrix gaussian(Rng& rng, Eigen::Index r, Eigen::Index c, bool real = false) {
    std::normal_distribution<double> nd;
    ComplexMatrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double re = nd(rng);
        m.data()[i] = real ? cplx(re, 0.0) : cplx(re, nd(rng));
    }
    return m;
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Square matrix rescaled to numerical radius w.
inline ComplexMatrix with_radius(Rng& rng, Eigen::Index n, double w) {
    ComplexMatrix a = gaussian(rng, n, n);
    while (numerical_radius(a) == 0.0) {
        a = gaussian(rng, n, n);
    }
    return a * (w / numerical_radius(a));
}

inline TensorRep matrix_rep(Rng& rng, Eigen::Index n, int terms) {
    TensorRep rep;
    rep.space = MatrixAlgebra{n};
    for (int i = 0; i < terms; ++i) {
        rep.left.push_back(gaussian(rng, n, n));
        rep.right.push_back(gaussian(rng, n, n));
    }
    return rep;
}

/// Rep whose left and right families are random combinations of `rank`
/// base elements each, so both sides are linearly dependent when terms > rank.
inline TensorRep dependent_rep(Rng& rng, Eigen::Index n, int terms, int rank) {
    TensorRep rep;
    rep.space = MatrixAlgebra{n};
    std::vector<ComplexMatrix> bl;
    std::vector<ComplexMatrix> br;
    for (int k = 0; k < rank; ++k) {
        bl.push_back(gaussian(rng, n, n));
        br.push_back(gaussian(rng, n, n));
    }
    const ComplexMatrix cl = gaussian(rng, terms, rank);
    const ComplexMatrix cr = gaussian(rng, terms, rank);
    for (int i = 0; i < terms; ++i) {
        ComplexMatrix x = ComplexMatrix::Zero(n, n);
        ComplexMatrix y = ComplexMatrix::Zero(n, n);
        for (int k = 0; k < rank; ++k) {
            x += cl(i, k) * bl[static_cast<std::size_t>(k)];
            y += cr(i, k) * br[static_cast<std::size_t>(k)];
        }
        rep.left.push_back(std::move(x));
        rep.right.push_back(std::move(y));
    }
    return rep;
}

inline TensorRep min_rep(Rng& rng, const FamilyPtr& fam, int terms, bool real) {
    TensorRep rep;
    rep.space = MinSpace{fam};
    for (int i = 0; i < terms; ++i) {
        rep.left.push_back(gaussian(rng, fam->dim, 1, real));
        rep.right.push_back(gaussian(rng, fam->dim, 1, real));
    }
    return rep;
}

/// Random rep over the given space (matrix or Min).
inline TensorRep rep_for(Rng& rng, const Space& space, int terms, bool real = false) {
    if (const auto* m = std::get_if<MatrixAlgebra>(&space)) {
        return matrix_rep(rng, m->n, terms);
    }
    return min_rep(rng, std::get<MinSpace>(space).family, terms, real);
}

inline BilinearForm form(Rng& rng, const Space& space, bool real = false) {
    const Eigen::Index d = coord_dim(space);
    return BilinearForm{space, gaussian(rng, d, d, real)};
}

/// Per-case generator derived from a suite seed.
inline Rng case_rng(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(index)};
    return Rng(seq);
}

} // namespace nrh::gen
