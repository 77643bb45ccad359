#pragma once

// Numerical radius, Ando witnesses, and the scalar balancing identity
//   inf_{lambda > 0} (lambda a + b / lambda) / 2 = sqrt(ab).

#include "nrh/detail/barrier.hpp"
#include "nrh/linalg.hpp"

#include <array>
#include <numbers>
#include <optional>

namespace nrh {

namespace detail {

// lambda_max of Re(e^{i theta} alpha) = (e^{i theta} alpha + e^{-i theta} alpha^dagger) / 2.
inline double real_part_lambda_max(const ComplexMatrix& alpha, double theta) {
    const cplx ph = std::polar(1.0, theta);
    const ComplexMatrix h = 0.5 * (ph * alpha + std::conj(ph) * alpha.adjoint());
    return lambda_max(HermitianMatrix::symmetrize(h));
}

} // namespace detail

struct NumradOptions {
    int grid = 64;
    int refine_cells = 3;
    double theta_tol = 1e-10;
};

/// w(alpha) = max over theta of lambda_max(Re(e^{i theta} alpha)).
inline double numerical_radius(const ComplexMatrix& alpha, const NumradOptions& opt = {}) {
    if (alpha.rows() != alpha.cols()) {
        throw InvalidInput("numerical_radius: matrix must be square");
    }
    if (alpha.size() == 0) {
        return 0.0;
    }
    const double two_pi = 2.0 * std::numbers::pi;
    const double h = two_pi / opt.grid;
    std::vector<std::pair<double, double>> samples; // (value, theta)
    samples.reserve(static_cast<std::size_t>(opt.grid));
    for (int k = 0; k < opt.grid; ++k) {
        const double th = k * h;
        samples.emplace_back(detail::real_part_lambda_max(alpha, th), th);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        best = std::max(best, s.first);
    }
    std::vector<std::pair<double, double>> order = samples;
    std::partial_sort(order.begin(), order.begin() + std::min<int>(opt.refine_cells, opt.grid), order.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int c = 0; c < std::min(opt.refine_cells, opt.grid); ++c) {
        double lo = order[static_cast<std::size_t>(c)].second - h;
        double hi = order[static_cast<std::size_t>(c)].second + h;
        double x1 = hi - g * (hi - lo);
        double x2 = lo + g * (hi - lo);
        double f1 = detail::real_part_lambda_max(alpha, x1);
        double f2 = detail::real_part_lambda_max(alpha, x2);
        while (hi - lo > opt.theta_tol) {
            if (f1 >= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - g * (hi - lo);
                f1 = detail::real_part_lambda_max(alpha, x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (hi - lo);
                f2 = detail::real_part_lambda_max(alpha, x2);
            }
            best = std::max({best, f1, f2});
        }
    }
    return std::max(best, 0.0);
}

/// beta and P = [[1 + beta, alpha], [alpha^dagger, 1 - beta]] with lambda_min(P).
struct AndoWitness {
    HermitianMatrix beta;
    HermitianMatrix p;
    double lambda_min = 0.0;
};

enum class AndoVerdict { Witness, Infeasible };

struct AndoResult {
    AndoVerdict verdict = AndoVerdict::Infeasible;
    std::optional<AndoWitness> witness;
    HermitianMatrix best_beta;
    double best_lambda_min = 0.0;
    double lambda_min_upper = 0.0; // no beta can do better than this
    double w = 0.0;
};

class AmbiguousBoundary : public Error {
public:
    AmbiguousBoundary(std::string what, HermitianMatrix best_beta, double best_lambda_min, double w)
        : Error(std::move(what)), best_beta_(std::move(best_beta)), best_lambda_min_(best_lambda_min), w_(w) {}
    const HermitianMatrix& best_beta() const { return best_beta_; }
    double best_lambda_min() const { return best_lambda_min_; }
    double w() const { return w_; }

private:
    HermitianMatrix best_beta_;
    double best_lambda_min_;
    double w_;
};

struct AndoOptions {
    double tol = 1e-8;
    Eigen::Index max_dim = 16;
};

inline HermitianMatrix ando_block(const ComplexMatrix& alpha, const HermitianMatrix& beta) {
    const Eigen::Index n = alpha.rows();
    ComplexMatrix p(2 * n, 2 * n);
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    p.topLeftCorner(n, n) = id + beta.matrix();
    p.topRightCorner(n, n) = alpha;
    p.bottomLeftCorner(n, n) = alpha.adjoint();
    p.bottomRightCorner(n, n) = id - beta.matrix();
    return HermitianMatrix::from_lower(p);
}

/// Searches for a Hermitian beta making the Ando block PSD by maximizing
/// lambda_min(P(beta)), a concave function of beta. The maximization is a
/// barrier method on { (beta, s) : P(beta) - s I >= 0 }, maximize s.
inline AndoResult ando_witness(const ComplexMatrix& alpha, const AndoOptions& opt = {}) {
    if (alpha.rows() != alpha.cols()) {
        throw InvalidInput("ando_witness: matrix must be square");
    }
    const Eigen::Index n = alpha.rows();
    if (n > opt.max_dim) {
        throw InvalidInput("ando_witness: dimension exceeds cap " + std::to_string(opt.max_dim));
    }
    AndoResult res;
    res.w = numerical_radius(alpha);
    const auto finish_witness = [&](const HermitianMatrix& beta) {
        AndoWitness wit{beta, ando_block(alpha, beta), 0.0};
        wit.lambda_min = lambda_min(wit.p);
        res.best_beta = beta;
        res.best_lambda_min = wit.lambda_min;
        res.verdict = AndoVerdict::Witness;
        res.witness = std::move(wit);
    };
    if (n == 0 || max_abs(alpha) == 0.0) {
        finish_witness(HermitianMatrix(n));
        res.lambda_min_upper = 1.0;
        return res;
    }

    const auto basis = hermitian_basis(n);
    const Eigen::Index nb = static_cast<Eigen::Index>(basis.size());
    detail::LmiProblem prob;
    prob.cost = RealVector::Zero(nb + 1);
    prob.cost(nb) = -1.0;
    detail::LmiBlock blk;
    blk.f0 = ando_block(alpha, HermitianMatrix(n)).matrix();
    for (const auto& e : basis) {
        ComplexMatrix fa = ComplexMatrix::Zero(2 * n, 2 * n);
        fa.topLeftCorner(n, n) = e;
        fa.bottomRightCorner(n, n) = -e;
        blk.fa.push_back(std::move(fa));
    }
    blk.fa.push_back(-ComplexMatrix::Identity(2 * n, 2 * n));
    prob.blocks.push_back(std::move(blk));

    RealVector z0 = RealVector::Zero(nb + 1);
    z0(nb) = lambda_min(HermitianMatrix::from_lower(prob.blocks[0].f0)) - 1.0;

    detail::BarrierOptions bo;
    bo.gap_tol = 0.25 * opt.tol;
    // the objective is -s, so a lower bound above tol means s* < -tol
    bo.stop_if_lower_above = opt.tol;
    bo.t0 = 1.0;
    const auto br = detail::barrier_minimize(prob, z0, bo);

    const HermitianMatrix beta = HermitianMatrix::symmetrize(from_hermitian_coords(br.z.head(nb), n));
    const HermitianMatrix p = ando_block(alpha, beta);
    const double lmin = lambda_min(p);
    res.best_beta = beta;
    res.best_lambda_min = lmin;
    res.lambda_min_upper = -br.objective + br.gap_bound;

    if (lmin >= -opt.tol) {
        finish_witness(beta);
        return res;
    }
    if (res.lambda_min_upper < -opt.tol || res.w > 1.0 + 10.0 * opt.tol) {
        res.verdict = AndoVerdict::Infeasible;
        return res;
    }
    throw AmbiguousBoundary("ando_witness: could not decide feasibility near w(alpha) = 1", beta, lmin, res.w);
}

struct Balanced {
    double lambda = 1.0;
    double value = 0.0;
};

/// For a, b >= 0: value = sqrt(ab), attained by lambda = sqrt(b / a) in
/// (lambda a + b / lambda) / 2. lambda is 1 when ab = 0.
inline Balanced balance(double a, double b) {
    if (!(a >= 0.0) || !(b >= 0.0)) {
        throw InvalidInput("balance: inputs must be non-negative");
    }
    if (a * b == 0.0) {
        return {1.0, 0.0};
    }
    return {std::sqrt(b / a), std::sqrt(a * b)};
}

} // namespace nrh
