#pragma once

// Property batteries, one per result. Each case draws its instance from a
// generator seeded by (suite seed, suite salt, case index), so a failure is
// reproduced by re-running the suite with the same seed and `only_case`.

#include "nrh/io.hpp"
#include "nrh/random.hpp"

#include <functional>
#include <map>

namespace nrh::verify {

using io::json;

struct VerifyConfig {
    std::uint64_t seed = 1;
    double tol = 1e-6;
    std::optional<int> only_case;
};

struct Failure {
    int case_index = 0;
    std::string check;
    double excess = 0.0;
    json instance;
};

struct SuiteReport {
    explicit SuiteReport(std::string name = {}) : suite(std::move(name)) {}

    std::string suite;
    int cases = 0;
    int checks = 0;
    std::vector<Failure> failures;
    double max_violation = 0.0;
    json notes = json::object();

    bool passed() const { return failures.empty(); }
};

inline json to_json(const SuiteReport& r) {
    json fails = json::array();
    for (const auto& f : r.failures) {
        fails.push_back({{"case", f.case_index}, {"check", f.check}, {"excess", f.excess}, {"instance", f.instance}});
    }
    return {{"suite", r.suite},           {"cases", r.cases},       {"checks", r.checks},
            {"failures", std::move(fails)}, {"max_violation", r.max_violation}, {"notes", r.notes}};
}

namespace detail {

// Records "lhs <= rhs" style checks for one case.
class Recorder {
public:
    Recorder(SuiteReport& report, int case_index) : report_(report), case_(case_index) {}

    void instance(json j) { instance_ = std::move(j); }

    bool leq(const std::string& what, double lhs, double rhs) {
        ++report_.checks;
        const double excess = lhs - rhs;
        if (std::isnan(lhs) || std::isnan(rhs) || excess > 0.0) {
            const double e = std::isnan(excess) ? std::numeric_limits<double>::infinity() : excess;
            report_.max_violation = std::max(report_.max_violation, e);
            report_.failures.push_back({case_, what, e, instance_});
            return false;
        }
        return true;
    }

    bool truth(const std::string& what, bool ok) { return leq(what, ok ? 0.0 : 1.0, 0.0); }

private:
    SuiteReport& report_;
    int case_;
    json instance_;
};

inline void run_cases(SuiteReport& report, const VerifyConfig& cfg, int count,
                      const std::function<void(int, Recorder&)>& body) {
    for (int i = 0; i < count; ++i) {
        if (cfg.only_case && *cfg.only_case != i) {
            continue;
        }
        ++report.cases;
        Recorder rec(report, i);
        try {
            body(i, rec);
        } catch (const std::exception& e) {
            rec.truth(std::string("no exception: ") + e.what(), false);
        }
    }
}

inline double scale_of(const ComplexMatrix& m) { return std::max(1.0, max_abs(m)); }

} // namespace detail

/// Rank reduction of representations, and the h / wh sandwich on rebalanced reps.
inline SuiteReport prop21(const VerifyConfig& cfg) {
    SuiteReport r{"prop21"};
    detail::run_cases(r, cfg, 300, [&](int i, detail::Recorder& rec) {
        auto rng = gen::case_rng(cfg.seed, 21, static_cast<std::uint64_t>(i));
        const Eigen::Index n = gen::uniform_int(rng, 1, 3);
        const int terms = gen::uniform_int(rng, 2, 6);
        const int rank = gen::uniform_int(rng, 1, terms);
        const auto rep = gen::dependent_rep(rng, n, terms, rank);
        rec.instance(io::to_json(rep));
        const auto red = minimal_representation(rep);
        const ComplexMatrix u = tensor_coefficients(rep);
        rec.leq("tensor preserved", max_abs(tensor_coefficients(red) - u), 1e-9 * detail::scale_of(u));
        rec.leq("block row norm non-increasing", block_row_norm(red), block_row_norm(rep) * (1.0 + 1e-12) + 1e-12);
        rec.truth("left family independent", family_rank(red.left) == static_cast<Eigen::Index>(red.size()));
        rec.truth("right family independent", family_rank(red.right) == static_cast<Eigen::Index>(red.size()));
        const auto bal = rebalance(gen::matrix_rep(rng, n, terms));
        const double h = h_upper(bal);
        const double wh = wh_upper(bal);
        rec.leq("h/2 <= wh", 0.5 * h - 1e-9, wh);
        rec.leq("wh <= h", wh, h + 1e-9);
    });
    return r;
}

/// Ando witnesses at w = 1, no false witnesses beyond, and the wh <-> Wh conversions.
inline SuiteReport thm22(const VerifyConfig& cfg) {
    SuiteReport r{"thm22"};
    int witnesses = 0;
    int rejected = 0;
    detail::run_cases(r, cfg, 700, [&](int i, detail::Recorder& rec) {
        auto rng = gen::case_rng(cfg.seed, 22, static_cast<std::uint64_t>(i));
        if (i < 200) {
            const auto alpha = gen::with_radius(rng, gen::uniform_int(rng, 1, 6), 1.0);
            rec.instance({{"alpha", io::to_json(alpha)}, {"w", 1.0}});
            const auto res = ando_witness(alpha);
            if (rec.truth("witness at w = 1", res.verdict == AndoVerdict::Witness && res.witness.has_value())) {
                rec.leq("witness lambda_min", -lambda_min(res.witness->p), 1e-6);
                ++witnesses;
            }
        } else if (i < 300) {
            const auto alpha = gen::with_radius(rng, gen::uniform_int(rng, 1, 6), 1.05);
            rec.instance({{"alpha", io::to_json(alpha)}, {"w", 1.05}});
            try {
                const auto res = ando_witness(alpha);
                if (res.verdict == AndoVerdict::Witness) {
                    rec.leq("no false witness", 0.0, -1e-6 - lambda_min(res.witness->p));
                } else {
                    ++rejected;
                }
            } catch (const AmbiguousBoundary&) {
                ++rejected;
            }
        } else if (i < 500) {
            const auto rep = gen::matrix_rep(rng, gen::uniform_int(rng, 1, 3), gen::uniform_int(rng, 1, 3));
            rec.instance(io::to_json(rep));
            const auto wrep = wh_to_Wh(rep);
            const ComplexMatrix u = tensor_coefficients(rep);
            rec.leq("Wh(wh_to_Wh) <= wh", Wh_upper(wrep), wh_upper(rep) + 1e-9 * std::max(1.0, wh_upper(rep)));
            rec.leq("wh_to_Wh tensor", max_abs(tensor_coefficients(wrep) - u), 1e-8 * detail::scale_of(u));
        } else {
            const Eigen::Index n = gen::uniform_int(rng, 1, 3);
            const int m = gen::uniform_int(rng, 1, 4);
            WhRep w;
            w.space = MatrixAlgebra{n};
            for (int k = 0; k < m; ++k) {
                w.xs.push_back(gen::gaussian(rng, n, n));
            }
            w.alpha = gen::gaussian(rng, m, m);
            rec.instance(io::to_json(w));
            const auto rep = Wh_to_wh(w);
            const ComplexMatrix u = tensor_coefficients(w);
            rec.leq("wh(Wh_to_wh) <= Wh", wh_upper(rep), Wh_upper(w) * (1.0 + 1e-6));
            rec.leq("Wh_to_wh tensor", max_abs(tensor_coefficients(rep) - u), 1e-8 * detail::scale_of(u));
        }
    });
    r.notes["witnesses_at_w1"] = witnesses;
    r.notes["rejected_at_w105"] = rejected;
    return r;
}

namespace detail {

inline void state_duality_case(const VerifyConfig& cfg, Variant variant, std::uint64_t salt, int i, Recorder& rec) {
    auto rng = gen::case_rng(cfg.seed, salt, static_cast<std::uint64_t>(i));
    const Eigen::Index n = i % 5 == 4 ? 3 : 2;
    const auto t = gen::form(rng, MatrixAlgebra{n});
    rec.instance(io::to_json(t));
    const auto cert = dual_norm(t, variant, DualOptions{cfg.tol});
    rec.truth("dual_norm converged", cert.status == CertStatus::Converged);
    rec.leq("certificate domination", -domination_check(t, cert.state, cert.value * (1.0 + cfg.tol), variant).lambda_min,
            kTolFeas);
    const auto f = gns_factorize(t, cert, cfg.tol);
    rec.leq("factorization residual", f.residual, 1e-6 * (1.0 + operator_norm(t.coeffs)));
    const auto vr = verify_factorization(t, f, cert.value);
    rec.truth("a_norm recomputed", vr.a_norm_recomputed);
    rec.leq("a_norm^2 b_norm <= c", vr.product, cert.value * (1.0 + 1e-4));
    for (int k = 0; k < 20; ++k) {
        const auto u = gen::matrix_rep(rng, n, gen::uniform_int(rng, 1, 4));
        const double bound = variant == Variant::wh ? wh_upper(u) : whp_upper(u);
        rec.leq("|T(u)| <= c * bound", std::abs(t.pair(u)), cert.value * bound * (1.0 + 1e-7));
    }
    const double c_lo = cert.value * (1.0 - 1e-3);
    rec.truth("monotone in c", !domination_check(t, cert.state, c_lo, variant).ok ||
                                   domination_check(t, cert.state, cert.value, variant).ok);
}

} // namespace detail

inline SuiteReport thm23(const VerifyConfig& cfg) {
    SuiteReport r{"thm23"};
    detail::run_cases(r, cfg, 30,
                      [&](int i, detail::Recorder& rec) { detail::state_duality_case(cfg, Variant::wh, 23, i, rec); });
    return r;
}

inline SuiteReport thm32(const VerifyConfig& cfg) {
    SuiteReport r{"thm32"};
    detail::run_cases(r, cfg, 30,
                      [&](int i, detail::Recorder& rec) { detail::state_duality_case(cfg, Variant::whp, 32, i, rec); });
    return r;
}

/// wh and wh' of the embedded rep agree with the wH bound on Min(l1_3).
inline SuiteReport prop41(const VerifyConfig& cfg) {
    SuiteReport r{"prop41"};
    const auto fam = family_l1(3);
    detail::run_cases(r, cfg, 200, [&](int i, detail::Recorder& rec) {
        auto rng = gen::case_rng(cfg.seed, 41, static_cast<std::uint64_t>(i));
        const auto rep = gen::min_rep(rng, fam, gen::uniform_int(rng, 1, 5), true);
        rec.instance(io::to_json(rep));
        const double wH = wH_upper(rep);
        const auto emb = rebalance(embed_min_rep(rep));
        rec.leq("|wh(embed) - wH|", std::abs(wh_upper(emb) - wH), 1e-9);
        rec.leq("|wh'(embed) - wH|", std::abs(whp_upper(emb) - wH), 1e-9);
    });
    return r;
}

/// pi_2 of the identity on l1_n, and column cb lower bounds against pi_2.
inline SuiteReport prop42(const VerifyConfig& cfg) {
    SuiteReport r{"prop42"};
    int equal = 0;
    int random_cases = 0;
    json gaps = json::array();
    detail::run_cases(r, cfg, 56, [&](int i, detail::Recorder& rec) {
        if (i < 6) {
            const Eigen::Index n = i + 1;
            const ComplexMatrix id = ComplexMatrix::Identity(n, n);
            rec.instance({{"n", n}});
            const auto p = pietsch_pi2(id, family_l1(n));
            rec.leq("|pi2(id) - 1|", std::abs(p.pi2 - 1.0), 1e-6);
            return;
        }
        auto rng = gen::case_rng(cfg.seed, 42, static_cast<std::uint64_t>(i));
        const Eigen::Index dim = gen::uniform_int(rng, 2, 4);
        const auto fam = family_l1(dim);
        const ComplexMatrix a = gen::gaussian(rng, gen::uniform_int(rng, 1, 4), dim, i % 2 == 0);
        rec.instance({{"a", io::to_json(a)}, {"family", fam->name}});
        const auto p = pietsch_pi2(a, fam);
        rec.leq("pi2 lower <= pi2", p.lower, p.pi2 * (1.0 + 1e-9));
        const ComplexMatrix gap = p.pi2 * p.pi2 * (fam->functionals.adjoint() * p.measure.p.cast<cplx>().asDiagonal() *
                                                   fam->functionals) - a.adjoint() * a;
        rec.leq("Pietsch certificate", -lambda_min(HermitianMatrix::symmetrize(gap)), 1e-8 * std::max(1.0, p.pi2 * p.pi2));
        const double cb = cb_lower_column(a, fam, static_cast<int>(dim), CbLowerOptions{8, 2000, cfg.seed + static_cast<std::uint64_t>(i)});
        rec.leq("cb_lower <= pi2", cb, p.pi2 + 1e-6);
        ++random_cases;
        if (cb >= p.pi2 * (1.0 - 1e-3)) {
            ++equal;
        } else {
            gaps.push_back({{"case", i}, {"cb_lower", cb}, {"pi2", p.pi2}});
        }
    });
    r.notes["equal_within_1e-3"] = equal;
    r.notes["random_cases"] = random_cases;
    r.notes["gap_instances"] = gaps;
    return r;
}

/// The Banach-space factorization pipeline on Min(l1_3).
inline SuiteReport cor43(const VerifyConfig& cfg) {
    SuiteReport r{"cor43"};
    const auto fam = family_l1(3);
    detail::run_cases(r, cfg, 30, [&](int i, detail::Recorder& rec) {
        auto rng = gen::case_rng(cfg.seed, 43, static_cast<std::uint64_t>(i));
        const auto t = gen::form(rng, MinSpace{fam}, true);
        rec.instance(io::to_json(t));
        const auto cert = dual_norm(t, Variant::wH, DualOptions{cfg.tol});
        rec.truth("dual_norm converged", cert.status == CertStatus::Converged);
        const auto f = banach_factorize(t, DualOptions{cfg.tol});
        rec.leq("factorization residual", f.residual, 1e-6 * (1.0 + operator_norm(t.coeffs)));
        rec.leq("pi2(a)^2 |b| <= c", f.bound(), cert.value * (1.0 + 1e-3));
        rec.leq("loop closure", std::abs(f.bound() - cert.value), 1e-3 * cert.value);
        for (int k = 0; k < 3; ++k) {
            const ComplexMatrix alpha = gen::gaussian(rng, 2, 2);
            const double lo = w_tensor_lower(t, alpha, WTensorOptions{40, cfg.seed + static_cast<std::uint64_t>(100 * i + k), 40});
            rec.leq("w_tensor_lower <= c", lo, cert.value + 1e-6);
        }
        for (int k = 0; k < 100; ++k) {
            const auto u = gen::min_rep(rng, fam, gen::uniform_int(rng, 1, 4), true);
            rec.leq("|T(u)| <= c wH(u)", std::abs(t.pair(u)), cert.value * wH_upper(u) * (1.0 + 1e-7));
        }
    });
    return r;
}

inline SuiteReport schur(const VerifyConfig& cfg) {
    SuiteReport r{"schur"};
    detail::run_cases(r, cfg, 56, [&](int i, detail::Recorder& rec) {
        auto rng = gen::case_rng(cfg.seed, 1, static_cast<std::uint64_t>(i));
        const DualOptions dopt{cfg.tol};
        if (i == 0 || i == 1) {
            const Eigen::Index n = 3;
            const ComplexMatrix a = i == 0 ? ComplexMatrix(ComplexMatrix::Identity(n, n)) : ComplexMatrix(ComplexMatrix::Ones(n, n));
            rec.instance({{"alpha", io::to_json(a)}});
            const SchurInstance inst{a};
            rec.leq("|upper - 1|", std::abs(schur_w_upper(inst, dopt).value - 1.0), 1e-3);
            rec.leq("|lower - 1|", std::abs(schur_w_lower(inst, 200, cfg.seed) - 1.0), 1e-3);
            return;
        }
        if (i == 2) {
            ComplexMatrix a = ComplexMatrix::Zero(2, 2);
            a(0, 1) = 2.0;
            rec.instance({{"alpha", io::to_json(a)}});
            const SchurInstance inst{a};
            const double lo = schur_w_lower(inst, 200, cfg.seed);
            rec.leq("lower >= 2", 2.0 - 1e-9, lo);
            rec.leq("upper >= lower", lo - 1e-3, schur_w_upper(inst, dopt).value);
            return;
        }
        if (i < 6) {
            // diagonal pattern and permutation covariance
            const Eigen::Index n = i;
            const ComplexMatrix d = gen::gaussian(rng, n, 1, true);
            const ComplexMatrix a = d.col(0).asDiagonal();
            rec.instance({{"alpha", io::to_json(a)}});
            const SchurInstance inst{a};
            const double target = d.cwiseAbs().maxCoeff();
            rec.leq("diagonal upper", std::abs(schur_w_upper(inst, dopt).value - target), 1e-3 * std::max(1.0, target));
            rec.leq("diagonal lower", std::abs(schur_w_lower(inst, 100, cfg.seed) - target), 1e-3 * std::max(1.0, target));
            return;
        }
        const Eigen::Index n = gen::uniform_int(rng, 2, 4);
        const ComplexMatrix a = gen::gaussian(rng, n, n, true);
        rec.instance({{"alpha", io::to_json(a)}});
        const SchurInstance inst{a};
        const double up = schur_w_upper(inst, dopt).value;
        const double lo = schur_w_lower(inst, 100, cfg.seed + static_cast<std::uint64_t>(i));
        rec.leq("lower <= upper", lo, up + 1e-3);
        if (i % 5 == 0) {
            Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
            p.setIdentity();
            std::shuffle(p.indices().data(), p.indices().data() + n, rng);
            const ComplexMatrix pa = p * a * p.transpose();
            rec.leq("permutation covariance", std::abs(schur_w_upper(SchurInstance{pa}, dopt).value - up), 1e-6 * std::max(1.0, up));
        }
    });
    return r;
}

inline const std::vector<std::pair<std::string, std::function<SuiteReport(const VerifyConfig&)>>>& suites() {
    static const std::vector<std::pair<std::string, std::function<SuiteReport(const VerifyConfig&)>>> all{
        {"prop21", prop21}, {"thm22", thm22},   {"thm23", thm23}, {"thm32", thm32},
        {"prop41", prop41}, {"prop42", prop42}, {"cor43", cor43}, {"schur", schur}};
    return all;
}

/// Runs one suite by name, or all of them for "all".
inline std::vector<SuiteReport> run(const std::string& name, const VerifyConfig& cfg) {
    std::vector<SuiteReport> out;
    for (const auto& [n, fn] : suites()) {
        if (name == "all" || name == n) {
            out.push_back(fn(cfg));
        }
    }
    if (out.empty()) {
        throw InvalidInput("unknown suite '" + name + "'");
    }
    return out;
}

} // namespace nrh::verify
