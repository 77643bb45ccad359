#pragma once

// Command-line front end. Every subcommand prints one JSON document.
// Exit codes: 0 ok, 1 internal error or failed verification, 2 invalid
// input, 3 not converged / ambiguous verdict.

#include "nrh/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace nrh::cli {

using io::json;

enum ExitCode : int { kOk = 0, kInternal = 1, kInvalid = 2, kNotConverged = 3 };

struct RunConfig {
    double tol = 1e-6;
    std::uint64_t seed = 1;
    int max_iter = 2000;
    std::string family = "l1:3";
    std::string output;
};

namespace detail {

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw InvalidInput(path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

// A map file is either a bare matrix or {"map": matrix}.
inline ComplexMatrix map_from_json(const json& j) {
    if (j.is_object() && j.contains("map")) {
        return io::matrix_from_json(j.at("map"));
    }
    return io::matrix_from_json(j);
}

inline bool inexact_min(const Space& s) { return !is_matrix(s) && !family_of(s).exact; }

} // namespace detail

/// Parses argv, runs the subcommand and writes its JSON result to `out`.
inline int run_command(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Numerical-radius Haagerup norms, dual norms and factorizations"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with defaults for tol, seed, max_iter, family, output");
    auto* out_opt = app.add_option("-o,--output", cfg.output, "write the result here instead of stdout");

    std::string matrix_path;
    std::string rep_path;
    std::string form_path;
    std::string alpha_path;
    std::string map_path;
    std::string kind = "wh";
    std::string variant = "wh";
    std::string field = "real";
    std::string suite = "all";
    bool minimize = false;
    int trials = 200;
    int schur_trials_n = 500;
    int level = 0;
    int only_case = -1;
    double ando_tol = 1e-8;

    auto* numrad = app.add_subcommand("numrad", "numerical radius of a square matrix");
    numrad->add_option("matrix", matrix_path, "matrix JSON")->required();

    auto* ando = app.add_subcommand("ando", "Ando witness beta for a square matrix");
    ando->add_option("matrix", matrix_path, "matrix JSON")->required();
    ando->add_option("--tol", ando_tol, "PSD tolerance on the witness");

    auto* norm = app.add_subcommand("norm", "representation upper bound for a tensor norm");
    norm->add_option("--kind", kind, "h, wh, whp, wH or Wh")->check(CLI::IsMember({"h", "wh", "whp", "wH", "Wh"}));
    norm->add_option("--rep", rep_path, "representation JSON")->required();
    norm->add_flag("--minimize", minimize, "reduce to a minimal representation and rebalance first");

    auto* dual = app.add_subcommand("dual", "dual norm of a bilinear form with a state certificate");
    dual->add_option("--form", form_path, "form JSON")->required();
    dual->add_option("--variant", variant, "wh, whp or wH")->check(CLI::IsMember({"wh", "whp", "wH"}));
    auto* dual_tol = dual->add_option("--tol", cfg.tol, "relative tolerance on the value");

    auto* wtensor = app.add_subcommand("wtensor", "sampled lower bound w(T (x) alpha) / w(alpha)");
    wtensor->add_option("--form", form_path, "form JSON")->required();
    wtensor->add_option("--alpha", alpha_path, "matrix JSON")->required();
    auto* wt_trials = wtensor->add_option("--trials", trials, "random starts");
    auto* wt_seed = wtensor->add_option("--seed", cfg.seed, "seed");

    auto* factorize = app.add_subcommand("factorize", "factorize a bilinear form through a Hilbert space");
    factorize->add_option("--form", form_path, "form JSON")->required();
    factorize->add_option("--variant", variant, "wh, whp or wH")->check(CLI::IsMember({"wh", "whp", "wH"}));
    auto* fac_tol = factorize->add_option("--tol", cfg.tol, "relative tolerance on the dual value");

    auto* pi2 = app.add_subcommand("pi2", "2-summing norm and Pietsch measure");
    pi2->add_option("--map", map_path, "matrix JSON of a : X -> l2_k")->required();
    auto* pi2_family = pi2->add_option("--family", cfg.family, "family spec (l1:n, linf:n, l1c:n:G) or family JSON file");
    pi2->add_option("--level", level, "also report the column cb lower bound at this matrix level");

    auto* schur = app.add_subcommand("schur", "w-norm of a Schur multiplier");
    schur->add_option("--alpha", alpha_path, "matrix JSON")->required();
    schur->add_option("--field", field, "real or complex")->check(CLI::IsMember({"real", "complex"}));
    auto* schur_trials = schur->add_option("--trials", schur_trials_n, "random samples for the lower bound");
    auto* schur_seed = schur->add_option("--seed", cfg.seed, "seed");
    auto* schur_tol = schur->add_option("--tol", cfg.tol, "relative tolerance on the upper bound");

    auto* verify = app.add_subcommand("verify", "run property suites");
    verify->add_option("--suite", suite, "prop21, thm22, thm23, thm32, prop41, prop42, cor43, schur or all");
    auto* verify_seed = verify->add_option("--seed", cfg.seed, "seed");
    verify->add_option("--case", only_case, "run a single case index");
    auto* verify_tol = verify->add_option("--tol", cfg.tol, "dual-norm tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInvalid;
    }

    auto emit = [&](const json& j) {
        const std::string text = j.dump(2) + "\n";
        if (cfg.output.empty()) {
            out << text;
        } else {
            std::ofstream f(cfg.output);
            if (!f) {
                throw InvalidInput("cannot write '" + cfg.output + "'");
            }
            f << text;
        }
    };

    try {
        // Config file values apply where no flag was given; NRH_SEED beats the config file.
        if (!config_path.empty()) {
            const json c = detail::read_json_file(config_path);
            if (!c.is_object()) {
                throw InvalidInput("config must be a JSON object");
            }
            const bool tol_flag = dual_tol->count() + fac_tol->count() + schur_tol->count() + verify_tol->count() > 0;
            const bool seed_flag = wt_seed->count() + schur_seed->count() + verify_seed->count() > 0;
            if (c.contains("tol") && !tol_flag) cfg.tol = c.at("tol").get<double>();
            if (c.contains("seed") && !seed_flag) cfg.seed = c.at("seed").get<std::uint64_t>();
            if (c.contains("max_iter")) cfg.max_iter = c.at("max_iter").get<int>();
            if (c.contains("family") && pi2_family->count() == 0) cfg.family = c.at("family").get<std::string>();
            if (c.contains("output") && out_opt->count() == 0) cfg.output = c.at("output").get<std::string>();
            if (c.contains("trials") && wt_trials->count() == 0) trials = c.at("trials").get<int>();
            if (c.contains("trials") && schur_trials->count() == 0) schur_trials_n = c.at("trials").get<int>();
        }
        if (const char* env = std::getenv("NRH_SEED"); env != nullptr && *env != '\0') {
            try {
                cfg.seed = std::stoull(env);
            } catch (const std::exception&) {
                throw InvalidInput("NRH_SEED must be a non-negative integer");
            }
        }
        if (!(cfg.tol > 0.0)) {
            throw InvalidInput("tol must be positive");
        }
        if (cfg.max_iter < 1) {
            throw InvalidInput("max_iter must be at least 1");
        }
        DualOptions dopt;
        dopt.tol = cfg.tol;
        dopt.inner_cap = cfg.max_iter;

        if (*numrad) {
            const ComplexMatrix m = io::matrix_from_json(detail::read_json_file(matrix_path));
            if (m.rows() != m.cols()) {
                throw InvalidInput("numrad: matrix must be square");
            }
            emit({{"w", numerical_radius(m)}});
            return kOk;
        }
        if (*ando) {
            const ComplexMatrix m = io::matrix_from_json(detail::read_json_file(matrix_path));
            try {
                emit(io::to_json(ando_witness(m, AndoOptions{ando_tol, 16})));
                return kOk;
            } catch (const AmbiguousBoundary& e) {
                emit({{"verdict", "ambiguous"},
                      {"w", e.w()},
                      {"lambda_min", e.best_lambda_min()},
                      {"beta", io::to_json(e.best_beta().matrix())}});
                return kNotConverged;
            }
        }
        if (*norm) {
            const json j = detail::read_json_file(rep_path);
            json res{{"kind", kind}};
            if (kind == "Wh") {
                res["value"] = Wh_upper(io::wh_rep_from_json(j));
                emit(res);
                return kOk;
            }
            TensorRep rep = io::rep_from_json(j);
            if (minimize) {
                rep = minimal_representation(rep);
                if (kind == "wh" || kind == "whp") {
                    rep = rebalance(rep);
                }
                res["terms"] = rep.size();
                if (rep.rank_warning) {
                    res["rank_warning"] = true;
                }
            }
            if (kind == "h") {
                res["value"] = h_upper(rep);
            } else if (kind == "wh") {
                res["value"] = wh_upper(rep);
            } else if (kind == "whp") {
                res["value"] = whp_upper(rep);
            } else {
                if (is_matrix(rep.space)) {
                    throw InvalidInput("norm --kind wH needs a rep over a Min(X) space");
                }
                res["value"] = wH_upper(rep);
            }
            if (rep.size() == 0) {
                res["value"] = 0;
            }
            if (detail::inexact_min(rep.space)) {
                res["note"] = "lower-approximation of the sup: the functional family discretizes the dual ball";
            }
            emit(res);
            return kOk;
        }
        if (*dual) {
            const auto t = io::form_from_json(detail::read_json_file(form_path));
            const auto cert = dual_norm(t, variant_from_string(variant), dopt);
            emit(io::to_json(cert));
            return cert.status == CertStatus::Converged ? kOk : kNotConverged;
        }
        if (*wtensor) {
            const auto t = io::form_from_json(detail::read_json_file(form_path));
            const ComplexMatrix alpha = io::matrix_from_json(detail::read_json_file(alpha_path));
            if (trials < 1) {
                throw InvalidInput("trials must be at least 1");
            }
            emit({{"lower", w_tensor_lower(t, alpha, WTensorOptions{trials, cfg.seed, 60})},
                  {"w_alpha", numerical_radius(alpha)}});
            return kOk;
        }
        if (*factorize) {
            const auto t = io::form_from_json(detail::read_json_file(form_path));
            const Variant v = variant_from_string(variant);
            Factorization f;
            DualCert cert;
            if (v == Variant::wH) {
                cert = dual_norm(t, v, dopt);
                f = banach_factorize(t, dopt);
            } else {
                cert = dual_norm(t, v, dopt);
                f = gns_factorize(t, cert, dopt.tol);
            }
            json res = io::to_json(f);
            res["value"] = cert.value;
            res["variant"] = to_string(v);
            emit(res);
            return cert.status == CertStatus::Converged ? kOk : kNotConverged;
        }
        if (*pi2) {
            const ComplexMatrix a = detail::map_from_json(detail::read_json_file(map_path));
            FamilyPtr fam;
            if (cfg.family.find(':') != std::string::npos && cfg.family.find('/') == std::string::npos &&
                cfg.family.find(".json") == std::string::npos) {
                fam = family_from_spec(cfg.family);
            } else {
                fam = io::family_from_json(detail::read_json_file(cfg.family));
            }
            const auto p = pietsch_pi2(a, fam, Pi2Options{cfg.tol});
            json res = io::to_json(p);
            if (level > 0 && p.bounded) {
                res["cb_lower_column"] = cb_lower_column(a, fam, level, CbLowerOptions{8, 2000, cfg.seed});
                res["level"] = level;
            }
            if (!fam->exact) {
                res["note"] = "lower-approximation of the sup: the functional family discretizes the dual ball";
            }
            emit(res);
            return kOk;
        }
        if (*schur) {
            SchurInstance inst{io::matrix_from_json(detail::read_json_file(alpha_path)), field_from_string(field)};
            if (schur_trials_n < 0) {
                throw InvalidInput("trials must be non-negative");
            }
            const auto up = schur_w_upper(inst, dopt);
            const double lo = schur_w_lower(inst, schur_trials_n, cfg.seed);
            json res{{"upper", up.value}, {"lower", lo}, {"gap", up.value - lo}, {"certificate", io::to_json(up)}};
            if (inst.field == Field::complex) {
                res["phases"] = inst.phases;
            }
            emit(res);
            return up.status == CertStatus::Converged ? kOk : kNotConverged;
        }
        if (*verify) {
            verify::VerifyConfig vc;
            vc.seed = cfg.seed;
            vc.tol = cfg.tol;
            if (only_case >= 0) {
                vc.only_case = only_case;
            }
            const auto reports = verify::run(suite, vc);
            json arr = json::array();
            bool ok = true;
            for (const auto& r : reports) {
                arr.push_back(verify::to_json(r));
                ok = ok && r.passed();
            }
            emit(reports.size() == 1 ? arr[0] : json{{"seed", cfg.seed}, {"suites", arr}});
            return ok ? kOk : kInternal;
        }
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << "\n";
        return kInvalid;
    } catch (const json::exception& e) {
        err << "invalid input: " << e.what() << "\n";
        return kInvalid;
    } catch (const NotConvergedError& e) {
        err << "not converged: " << e.what() << "\n";
        return kNotConverged;
    } catch (const AmbiguousBoundary& e) {
        err << "ambiguous: " << e.what() << "\n";
        return kNotConverged;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}

} // namespace nrh::cli
