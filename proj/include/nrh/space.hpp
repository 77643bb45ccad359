#pragma once

// Carrier spaces: the full matrix algebra M_n, and Min(X) for a
// finite-dimensional X described by a finite family of norming functionals.

#include "nrh/linalg.hpp"

#include <memory>
#include <numbers>
#include <sstream>
#include <variant>

namespace nrh {

/// Finite family of functionals f_k on X = C^dim, stored as the rows of an
/// evaluation matrix: f_k(x) = sum_j functionals(k, j) x_j (no conjugation).
struct FunctionalFamily {
    Eigen::Index dim = 0;
    ComplexMatrix functionals; // K x dim
    bool exact = true;         // rows are exactly the extreme points of the dual ball
    std::string name;          // builtin spec string, empty for custom families

    Eigen::Index size() const { return functionals.rows(); }

    /// Column of values f_k(x).
    ComplexVector evaluate(const ComplexVector& x) const { return functionals * x; }

    void validate() const {
        if (dim <= 0 || functionals.rows() == 0) {
            throw InvalidInput("functional family must be non-empty");
        }
        if (functionals.cols() != dim) {
            throw InvalidInput("functional family: functionals must have length dim");
        }
        if (!detail::all_finite(functionals)) {
            throw InvalidInput("functional family: non-finite entries");
        }
        Eigen::JacobiSVD<ComplexMatrix> svd(functionals);
        const auto& s = svd.singularValues();
        const Eigen::Index r = std::min(functionals.rows(), functionals.cols());
        if (r < dim || s(r - 1) <= 1e-12 * s(0)) {
            throw InvalidInput("functional family does not span the dual space");
        }
    }
};

using FamilyPtr = std::shared_ptr<const FunctionalFamily>;

/// Real l1_n: all 2^n sign vectors.
inline FamilyPtr family_l1(Eigen::Index n) {
    if (n < 1 || n > 10) {
        throw InvalidInput("l1 family: dimension must be in [1, 10]");
    }
    auto f = std::make_shared<FunctionalFamily>();
    f->dim = n;
    f->exact = true;
    f->name = "l1:" + std::to_string(n);
    const Eigen::Index k = Eigen::Index{1} << n;
    f->functionals = ComplexMatrix::Zero(k, n);
    for (Eigen::Index s = 0; s < k; ++s) {
        for (Eigen::Index j = 0; j < n; ++j) {
            f->functionals(s, j) = ((s >> j) & 1) ? -1.0 : 1.0;
        }
    }
    return f;
}

/// Real l-infinity_n: +-e_k.
inline FamilyPtr family_linf(Eigen::Index n) {
    if (n < 1 || n > 64) {
        throw InvalidInput("linf family: dimension must be in [1, 64]");
    }
    auto f = std::make_shared<FunctionalFamily>();
    f->dim = n;
    f->exact = true;
    f->name = "linf:" + std::to_string(n);
    f->functionals = ComplexMatrix::Zero(2 * n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        f->functionals(2 * j, j) = 1.0;
        f->functionals(2 * j + 1, j) = -1.0;
    }
    return f;
}

/// Complex l1_n: unimodular vectors with first entry 1 and the others on a
/// grid of `phases` roots of unity. Approximate (exact = false).
inline FamilyPtr family_l1c(Eigen::Index n, int phases) {
    if (n < 1 || phases < 1) {
        throw InvalidInput("l1c family: need n >= 1 and phases >= 1");
    }
    Eigen::Index k = 1;
    for (Eigen::Index j = 1; j < n; ++j) {
        k *= phases;
        if (k > 4096) {
            throw InvalidInput("l1c family: too many functionals");
        }
    }
    auto f = std::make_shared<FunctionalFamily>();
    f->dim = n;
    f->exact = false;
    f->name = "l1c:" + std::to_string(n) + ":" + std::to_string(phases);
    f->functionals = ComplexMatrix::Zero(k, n);
    for (Eigen::Index s = 0; s < k; ++s) {
        f->functionals(s, 0) = 1.0;
        Eigen::Index rest = s;
        for (Eigen::Index j = 1; j < n; ++j) {
            const auto digit = rest % phases;
            rest /= phases;
            f->functionals(s, j) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(digit) / phases);
        }
    }
    return f;
}

/// Parses "l1:3", "linf:4", "l1c:2:8".
inline FamilyPtr family_from_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        parts.push_back(item);
    }
    auto to_int = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const long v = std::stol(s, &pos);
            if (pos != s.size()) {
                throw InvalidInput("bad integer");
            }
            return v;
        } catch (const std::exception&) {
            throw InvalidInput("bad family spec '" + spec + "'");
        }
    };
    if (parts.size() == 2 && parts[0] == "l1") {
        return family_l1(to_int(parts[1]));
    }
    if (parts.size() == 2 && parts[0] == "linf") {
        return family_linf(to_int(parts[1]));
    }
    if ((parts.size() == 2 || parts.size() == 3) && parts[0] == "l1c") {
        const int g = parts.size() == 3 ? static_cast<int>(to_int(parts[2])) : 8;
        return family_l1c(to_int(parts[1]), g);
    }
    throw InvalidInput("unknown family spec '" + spec + "' (expected l1:n, linf:n or l1c:n:G)");
}

struct MatrixAlgebra {
    Eigen::Index n = 1;
};

struct MinSpace {
    FamilyPtr family;
};

using Space = std::variant<MatrixAlgebra, MinSpace>;

inline bool is_matrix(const Space& s) { return std::holds_alternative<MatrixAlgebra>(s); }

inline const FunctionalFamily& family_of(const Space& s) {
    const auto* m = std::get_if<MinSpace>(&s);
    if (m == nullptr || !m->family) {
        throw InvalidInput("expected a Min(X) space with an attached family");
    }
    return *m->family;
}

/// Shape of a carrier element: n x n matrices, or dim x 1 coordinate columns.
inline std::pair<Eigen::Index, Eigen::Index> element_shape(const Space& s) {
    if (const auto* m = std::get_if<MatrixAlgebra>(&s)) {
        return {m->n, m->n};
    }
    return {family_of(s).dim, 1};
}

/// Length of the coordinate vector of an element (n^2 or dim).
inline Eigen::Index coord_dim(const Space& s) {
    const auto [r, c] = element_shape(s);
    return r * c;
}

/// Real permutation S with vec(x^*) = S conj(vec(x)). For Min(X) the star is
/// coordinatewise conjugation, so S is the identity.
inline Eigen::MatrixXd star_permutation(const Space& s) {
    const Eigen::Index d = coord_dim(s);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, d);
    if (const auto* m = std::get_if<MatrixAlgebra>(&s)) {
        const Eigen::Index n = m->n;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                p(i * n + j, j * n + i) = 1.0;
            }
        }
    } else {
        p.setIdentity();
    }
    return p;
}

inline std::string space_label(const Space& s) {
    if (const auto* m = std::get_if<MatrixAlgebra>(&s)) {
        return "M_" + std::to_string(m->n);
    }
    const auto& f = family_of(s);
    return "Min(" + (f.name.empty() ? "custom:" + std::to_string(f.dim) : f.name) + ")";
}

} // namespace nrh
