#pragma once

// Small log-det barrier method for problems of the form
//
//     minimize  cost^T z   subject to  F_j(z) = F_j0 + sum_a z_a F_ja  >= 0 (PSD),
//                                      z_a > 0 for a in `nonneg`.
//
// Used by the Ando witness search, the state-domination dual norms and the
// Pietsch measure. All of those are tiny dense problems, so the Hessian is
// formed explicitly and solved with LDLT.

#include "nrh/linalg.hpp"

#include <limits>
#include <optional>

namespace nrh::detail {

struct LmiBlock {
    ComplexMatrix f0;
    std::vector<ComplexMatrix> fa; // one Hermitian matrix per variable (may be zero-sized to mean 0)
};

struct LmiProblem {
    RealVector cost;
    std::vector<LmiBlock> blocks;
    std::vector<Eigen::Index> nonneg;
};

struct BarrierOptions {
    double t0 = 1.0;
    double mu = 10.0;
    double gap_tol = 1e-9;
    double rel_gap_tol = 0.0; // converged when gap <= rel_gap_tol * |objective|
    double newton_tol = 1e-10; // on half the squared Newton decrement
    int max_newton_per_center = 200;
    int max_outer = 60;
    // Stop as soon as the certified lower bound on the optimum exceeds this.
    double stop_if_lower_above = std::numeric_limits<double>::infinity();
    // Stop as soon as the objective drops to this value.
    double stop_if_objective_below = -std::numeric_limits<double>::infinity();
};

struct BarrierResult {
    RealVector z;
    double t = 0.0;
    double objective = 0.0;
    double gap_bound = 0.0; // nu / t at the last centering
    bool converged = false;
    int newton_steps = 0;
    std::vector<ComplexMatrix> inverses; // F_j(z)^{-1} at the returned point
};

namespace barrier_impl {

inline ComplexMatrix assemble(const LmiBlock& b, const RealVector& z) {
    ComplexMatrix f = b.f0;
    for (std::size_t a = 0; a < b.fa.size(); ++a) {
        if (b.fa[a].size() != 0) {
            f += z(static_cast<Eigen::Index>(a)) * b.fa[a];
        }
    }
    return 0.5 * (f + f.adjoint());
}

// log det of a Hermitian PD matrix; nullopt when not PD.
inline std::optional<double> logdet_pd(const ComplexMatrix& f) {
    if (f.rows() == 0) {
        return 0.0;
    }
    Eigen::LLT<ComplexMatrix> llt(f);
    if (llt.info() != Eigen::Success) {
        return std::nullopt;
    }
    const auto& l = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        const double d = l(i, i).real();
        if (!(d > 0.0) || !std::isfinite(d)) {
            return std::nullopt;
        }
        s += std::log(d);
    }
    return 2.0 * s;
}

inline std::optional<double> barrier_value(const LmiProblem& p, const RealVector& z, double t) {
    double v = t * p.cost.dot(z);
    for (const auto& b : p.blocks) {
        auto ld = logdet_pd(assemble(b, z));
        if (!ld) {
            return std::nullopt;
        }
        v -= *ld;
    }
    for (auto a : p.nonneg) {
        if (!(z(a) > 0.0)) {
            return std::nullopt;
        }
        v -= std::log(z(a));
    }
    return v;
}

} // namespace barrier_impl

inline double barrier_degree(const LmiProblem& p) {
    double nu = static_cast<double>(p.nonneg.size());
    for (const auto& b : p.blocks) {
        nu += static_cast<double>(b.f0.rows());
    }
    return nu;
}

inline bool strictly_feasible(const LmiProblem& p, const RealVector& z) {
    return barrier_impl::barrier_value(p, z, 0.0).has_value();
}

/// Runs the barrier method from a strictly feasible z0.
inline BarrierResult barrier_minimize(const LmiProblem& p, RealVector z0, const BarrierOptions& opt = {}) {
    using namespace barrier_impl;
    const Eigen::Index m = p.cost.size();
    if (!strictly_feasible(p, z0)) {
        throw Error("barrier_minimize: starting point is not strictly feasible");
    }
    const double nu = barrier_degree(p);
    BarrierResult res;
    res.z = std::move(z0);
    double t = opt.t0;

    auto center = [&](double tt) {
        for (int it = 0; it < opt.max_newton_per_center; ++it) {
            RealVector grad = tt * p.cost;
            Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m, m);
            for (const auto& b : p.blocks) {
                const Eigen::Index n = b.f0.rows();
                const ComplexMatrix f = assemble(b, res.z);
                Eigen::LLT<ComplexMatrix> llt(f);
                const ComplexMatrix w = llt.solve(ComplexMatrix::Identity(n, n));
                // Y_a = W F_a, flattened; H_ab = Re tr(Y_a Y_b).
                ComplexMatrix ys = ComplexMatrix::Zero(n * n, m);
                ComplexMatrix yts = ComplexMatrix::Zero(n * n, m);
                for (Eigen::Index a = 0; a < m; ++a) {
                    const auto& fa = b.fa[static_cast<std::size_t>(a)];
                    if (fa.size() == 0) {
                        continue;
                    }
                    ComplexMatrix y = w * fa;
                    grad(a) -= y.trace().real();
                    ys.col(a) = Eigen::Map<const ComplexVector>(y.data(), n * n);
                    ComplexMatrix yt = y.transpose();
                    yts.col(a) = Eigen::Map<const ComplexVector>(yt.data(), n * n);
                }
                hess += (ys.transpose() * yts).real();
            }
            for (auto a : p.nonneg) {
                grad(a) -= 1.0 / res.z(a);
                hess(a, a) += 1.0 / (res.z(a) * res.z(a));
            }
            hess = 0.5 * (hess + hess.transpose()).eval();
            const double ridge = 1e-14 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
            hess.diagonal().array() += ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
            RealVector step = ldlt.solve(-grad);
            if (!step.allFinite()) {
                break;
            }
            const double dec2 = -grad.dot(step);
            ++res.newton_steps;
            if (dec2 / 2.0 <= opt.newton_tol) {
                break;
            }
            const double f0 = *barrier_value(p, res.z, tt);
            double s = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 80; ++ls, s *= 0.5) {
                RealVector trial = res.z + s * step;
                auto fv = barrier_value(p, trial, tt);
                if (fv && *fv <= f0 - 0.25 * s * dec2) {
                    res.z = std::move(trial);
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                break;
            }
        }
    };

    for (int outer = 0; outer < opt.max_outer; ++outer) {
        center(t);
        res.t = t;
        res.gap_bound = nu / t;
        res.objective = p.cost.dot(res.z);
        if (res.objective - res.gap_bound > opt.stop_if_lower_above) {
            break;
        }
        if (res.objective <= opt.stop_if_objective_below) {
            break;
        }
        if (res.gap_bound <= opt.gap_tol || res.gap_bound <= opt.rel_gap_tol * std::abs(res.objective)) {
            res.converged = true;
            break;
        }
        t *= opt.mu;
    }
    res.inverses.clear();
    for (const auto& b : p.blocks) {
        const ComplexMatrix f = assemble(b, res.z);
        Eigen::LLT<ComplexMatrix> llt(f);
        res.inverses.push_back(llt.solve(ComplexMatrix::Identity(f.rows(), f.cols())));
    }
    return res;
}

} // namespace nrh::detail
