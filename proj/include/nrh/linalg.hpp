#pragma once

// Dense complex linear algebra used throughout the library. Everything is
// built on Eigen's dynamic complex matrices; the helpers here pin down the
// conventions (row-major vec, eigenvector phase, PSD tolerances) the rest of
// the code relies on.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nrh {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTolPsd = 1e-8;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (shapes, signs, unknown names).
class InvalidInput : public Error {
public:
    using Error::Error;
};

class NotPSD : public Error {
public:
    explicit NotPSD(double lambda_min)
        : Error("matrix is not positive semidefinite (lambda_min = " + std::to_string(lambda_min) + ")"),
          lambda_min_(lambda_min) {}
    double lambda_min() const { return lambda_min_; }

private:
    double lambda_min_;
};

class NotConvergedError : public Error {
public:
    using Error::Error;
};

/// Hermitian matrix. Only the lower triangle of the source is read; the
/// upper triangle is its mirror, so entry(i,j) == conj(entry(j,i)) exactly.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(Eigen::Index dim) : m_(ComplexMatrix::Zero(dim, dim)) {}

    static HermitianMatrix from_lower(const ComplexMatrix& src) {
        if (src.rows() != src.cols()) {
            throw InvalidInput("HermitianMatrix: source must be square");
        }
        HermitianMatrix h(src.rows());
        for (Eigen::Index j = 0; j < src.cols(); ++j) {
            h.m_(j, j) = cplx(src(j, j).real(), 0.0);
            for (Eigen::Index i = j + 1; i < src.rows(); ++i) {
                h.m_(i, j) = src(i, j);
                h.m_(j, i) = std::conj(src(i, j));
            }
        }
        return h;
    }

    /// Hermitian part (M + M^dagger)/2, for matrices that are Hermitian up to rounding.
    static HermitianMatrix symmetrize(const ComplexMatrix& src) {
        if (src.rows() != src.cols()) {
            throw InvalidInput("HermitianMatrix: source must be square");
        }
        ComplexMatrix s = 0.5 * (src + src.adjoint());
        return from_lower(s);
    }

    static HermitianMatrix identity(Eigen::Index dim) {
        HermitianMatrix h(dim);
        h.m_.setIdentity();
        return h;
    }

    Eigen::Index dim() const { return m_.rows(); }
    cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
    const ComplexMatrix& matrix() const { return m_; }

private:
    ComplexMatrix m_;
};

struct EigenDecomposition {
    RealVector values;     // ascending
    ComplexMatrix vectors; // columns, unitary
};

namespace detail {

inline void normalize_phase(ComplexMatrix& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        const double scale = v.col(c).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            const cplx z = v(r, c);
            if (std::abs(z) > 1e-12 * std::max(scale, 1e-300)) {
                v.col(c) *= std::conj(z) / std::abs(z);
                v(r, c) = cplx(std::abs(z), 0.0);
                break;
            }
        }
    }
}

inline bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (!std::isfinite(m.data()[i].real()) || !std::isfinite(m.data()[i].imag())) {
            return false;
        }
    }
    return true;
}

} // namespace detail

/// Eigenvalues ascending; each eigenvector's first non-negligible component
/// is made real and positive so results are reproducible.
inline EigenDecomposition hermitian_eig(const HermitianMatrix& h) {
    if (h.dim() == 0) {
        return {RealVector(0), ComplexMatrix(0, 0)};
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw NotConvergedError("hermitian_eig: eigensolver did not converge");
    }
    EigenDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
    detail::normalize_phase(out.vectors);
    return out;
}

inline double lambda_min(const HermitianMatrix& h) {
    if (h.dim() == 0) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NotConvergedError("lambda_min: eigensolver did not converge");
    }
    return solver.eigenvalues()(0);
}

inline double lambda_max(const HermitianMatrix& h) {
    if (h.dim() == 0) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NotConvergedError("lambda_max: eigensolver did not converge");
    }
    return solver.eigenvalues()(h.dim() - 1);
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

/// Square root of a PSD matrix. Eigenvalues in [-tol_psd, 0) are clamped.
inline HermitianMatrix psd_sqrt(const HermitianMatrix& p, double tol_psd = kTolPsd) {
    if (p.dim() == 0) {
        return p;
    }
    const auto eig = hermitian_eig(p);
    if (eig.values(0) < -tol_psd) {
        throw NotPSD(eig.values(0));
    }
    RealVector root = eig.values.cwiseMax(0.0).cwiseSqrt();
    ComplexMatrix s = eig.vectors * root.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
    return HermitianMatrix::symmetrize(s);
}

/// Moore-Penrose pseudo-inverse; singular values below rel_tol * sigma_max are dropped.
inline ComplexMatrix pinv(const ComplexMatrix& m, double rel_tol = 1e-12) {
    if (m.size() == 0) {
        return ComplexMatrix::Zero(m.cols(), m.rows());
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    const double cut = rel_tol * (s.size() ? s(0) : 0.0);
    RealVector inv(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        inv(i) = (s(i) > cut && s(i) > 0.0) ? 1.0 / s(i) : 0.0;
    }
    return svd.matrixV() * inv.cast<cplx>().asDiagonal() * svd.matrixU().adjoint();
}

/// Row-major flattening: vec(x)[i * cols + j] = x(i, j).
inline ComplexVector vec(const ComplexMatrix& x) {
    ComplexVector v(x.size());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            v(i * x.cols() + j) = x(i, j);
        }
    }
    return v;
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw InvalidInput("unvec: size mismatch");
    }
    ComplexMatrix x(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            x(i, j) = v(i * cols + j);
        }
    }
    return x;
}

/// Kronecker product, consistent with the row-major vec: vec(A X B^T) = (A kron B) vec(X).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Real coordinates for n x n Hermitian matrices, orthonormal for Re tr(A B):
/// diagonal units, then (E_ij + E_ji)/sqrt2 and i(E_ij - E_ji)/sqrt2 for i < j.
inline std::vector<ComplexMatrix> hermitian_basis(Eigen::Index n) {
    std::vector<ComplexMatrix> basis;
    basis.reserve(static_cast<std::size_t>(n * n));
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        ComplexMatrix e = ComplexMatrix::Zero(n, n);
        e(i, i) = 1.0;
        basis.push_back(std::move(e));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            ComplexMatrix re = ComplexMatrix::Zero(n, n);
            re(i, j) = r;
            re(j, i) = r;
            basis.push_back(std::move(re));
            ComplexMatrix im = ComplexMatrix::Zero(n, n);
            im(i, j) = cplx(0.0, r);
            im(j, i) = cplx(0.0, -r);
            basis.push_back(std::move(im));
        }
    }
    return basis;
}

inline ComplexMatrix from_hermitian_coords(const RealVector& z, Eigen::Index n) {
    const auto basis = hermitian_basis(n);
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (std::size_t a = 0; a < basis.size(); ++a) {
        out += z(static_cast<Eigen::Index>(a)) * basis[a];
    }
    return out;
}

inline RealVector to_hermitian_coords(const ComplexMatrix& h) {
    const auto basis = hermitian_basis(h.rows());
    RealVector z(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a) {
        z(static_cast<Eigen::Index>(a)) = (basis[a].adjoint() * h).trace().real();
    }
    return z;
}

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace nrh
