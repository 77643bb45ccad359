#pragma once

#include "nrh/random.hpp"

#include <gtest/gtest.h>

namespace nrh::fixture {

inline gen::Rng rng_for(std::uint64_t salt) { return gen::Rng(0x5eed0000ULL + salt); }

/// Brute-force numerical radius: max over a fine angle grid of lambda_max(Re(e^{it} A)).
inline double numrad_oracle(const ComplexMatrix& a, int grid = 20000) {
    double best = 0.0;
    for (int k = 0; k < grid; ++k) {
        const double t = 2.0 * 3.14159265358979323846 * k / grid;
        const ComplexMatrix r = 0.5 * (std::polar(1.0, t) * a + std::polar(1.0, -t) * a.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r);
        best = std::max(best, es.eigenvalues().maxCoeff());
    }
    return best;
}

/// Minimizes a unimodal function on [lo, hi] by a dense grid followed by golden section.
template <class F>
double minimize_1d(F f, double lo, double hi, int grid = 2000) {
    double best_x = lo;
    double best = f(lo);
    for (int k = 1; k <= grid; ++k) {
        const double x = lo + (hi - lo) * k / grid;
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    double a = std::max(lo, best_x - (hi - lo) / grid);
    double b = std::min(hi, best_x + (hi - lo) / grid);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double x1 = b - g * (b - a);
        const double x2 = a + g * (b - a);
        if (f(x1) <= f(x2)) {
            b = x2;
        } else {
            a = x1;
        }
    }
    return std::min(best, f(0.5 * (a + b)));
}

} // namespace nrh::fixture

namespace nrh::fixture {

/// Plain Nelder-Mead minimizer, used only as an independent oracle.
template <class F>
double nelder_mead(F f, RealVector x0, double step, int iters = 4000) {
    const Eigen::Index n = x0.size();
    std::vector<RealVector> s(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> v(static_cast<std::size_t>(n + 1));
    for (Eigen::Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i + 1)](i) += step;
    for (std::size_t i = 0; i < s.size(); ++i) v[i] = f(s[i]);
    for (int it = 0; it < iters; ++it) {
        std::vector<std::size_t> idx(s.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        const auto best = idx.front();
        const auto worst = idx.back();
        const auto second = idx[idx.size() - 2];
        RealVector c = RealVector::Zero(n);
        for (auto i : idx) if (i != worst) c += s[i];
        c /= static_cast<double>(n);
        const RealVector xr = c + (c - s[worst]);
        const double fr = f(xr);
        if (fr < v[best]) {
            const RealVector xe = c + 2.0 * (c - s[worst]);
            const double fe = f(xe);
            if (fe < fr) { s[worst] = xe; v[worst] = fe; } else { s[worst] = xr; v[worst] = fr; }
        } else if (fr < v[second]) {
            s[worst] = xr;
            v[worst] = fr;
        } else {
            const RealVector xc = c + 0.5 * (s[worst] - c);
            const double fc = f(xc);
            if (fc < v[worst]) {
                s[worst] = xc;
                v[worst] = fc;
            } else {
                for (auto i : idx) {
                    if (i == best) continue;
                    s[i] = s[best] + 0.5 * (s[i] - s[best]);
                    v[i] = f(s[i]);
                }
            }
        }
    }
    return *std::min_element(v.begin(), v.end());
}

} // namespace nrh::fixture
