#pragma once

// JSON encoding of matrices, spaces, representations, forms and results.
//
//   matrix   {"rows": r, "cols": c, "re": [[...]], "im": [[...]]}  (im optional)
//            or a bare nested array whose entries are numbers or [re, im] pairs
//   space    {"kind": "matrix", "n": 2}
//            {"kind": "min", "family": "l1:3"}  or  "family": {"dim", "functionals", "exact"}
//   rep      {"space": ..., "pairs": [{"x": matrix, "y": matrix}, ...]}
//   Wh rep   {"space": ..., "xs": [matrix, ...], "alpha": matrix}
//   form     {"space": ..., "coeffs": matrix}
// A flat array of numbers is read as a column, so Min(X) elements can be
// written as [1, 0, 2]. Nested arrays are always rows.

#include "nrh/factorize.hpp"
#include "nrh/schur.hpp"

#include <json.hpp>

namespace nrh::io {

using nlohmann::json;

namespace detail {

inline cplx scalar_from_json(const json& v) {
    if (v.is_number()) {
        return {v.get<double>(), 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw InvalidInput("expected a number or a [re, im] pair, got " + v.dump());
}

inline json real_rows(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd real_rows_from(const json& v, Eigen::Index r, Eigen::Index c, const char* what) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != r) {
        throw InvalidInput(std::string("matrix: '") + what + "' must have " + std::to_string(r) + " rows");
    }
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
            throw InvalidInput(std::string("matrix: row ") + std::to_string(i) + " of '" + what + "' must have " +
                               std::to_string(c) + " entries");
        }
        for (Eigen::Index j = 0; j < c; ++j) {
            const auto& e = row[static_cast<std::size_t>(j)];
            if (!e.is_number()) {
                throw InvalidInput(std::string("matrix: non-numeric entry in '") + what + "'");
            }
            m(i, j) = e.get<double>();
        }
    }
    return m;
}

} // namespace detail

inline json to_json(const ComplexMatrix& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["re"] = detail::real_rows(m.real());
    j["im"] = detail::real_rows(m.imag());
    return j;
}

inline json to_json(const RealVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v(i));
    }
    return a;
}

inline ComplexMatrix matrix_from_json(const json& j) {
    if (j.is_object()) {
        if (!j.contains("rows") || !j.contains("cols") || !j.contains("re")) {
            throw InvalidInput("matrix object needs rows, cols and re");
        }
        const auto r = j.at("rows").get<Eigen::Index>();
        const auto c = j.at("cols").get<Eigen::Index>();
        if (r < 0 || c < 0) {
            throw InvalidInput("matrix: negative shape");
        }
        ComplexMatrix m = detail::real_rows_from(j.at("re"), r, c, "re").cast<cplx>();
        if (j.contains("im")) {
            m.imag() = detail::real_rows_from(j.at("im"), r, c, "im");
        }
        return m;
    }
    if (j.is_array()) {
        const Eigen::Index r = static_cast<Eigen::Index>(j.size());
        if (r == 0) {
            return ComplexMatrix(0, 0);
        }
        if (j[0].is_number()) {
            // flat array: a column
            ComplexMatrix m(r, 1);
            for (Eigen::Index i = 0; i < r; ++i) {
                m(i, 0) = detail::scalar_from_json(j[static_cast<std::size_t>(i)]);
            }
            return m;
        }
        const Eigen::Index c = static_cast<Eigen::Index>(j[0].size());
        ComplexMatrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            const auto& row = j[static_cast<std::size_t>(i)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
                throw InvalidInput("matrix: ragged rows");
            }
            for (Eigen::Index k = 0; k < c; ++k) {
                m(i, k) = detail::scalar_from_json(row[static_cast<std::size_t>(k)]);
            }
        }
        return m;
    }
    throw InvalidInput("expected a matrix (object or nested array)");
}

inline json to_json(const FunctionalFamily& f) {
    if (!f.name.empty()) {
        return f.name;
    }
    json j;
    j["dim"] = f.dim;
    j["exact"] = f.exact;
    json rows = json::array();
    for (Eigen::Index k = 0; k < f.size(); ++k) {
        json row = json::array();
        for (Eigen::Index i = 0; i < f.dim; ++i) {
            const cplx z = f.functionals(k, i);
            if (z.imag() == 0.0) {
                row.push_back(z.real());
            } else {
                row.push_back(json::array({z.real(), z.imag()}));
            }
        }
        rows.push_back(std::move(row));
    }
    j["functionals"] = std::move(rows);
    return j;
}

inline FamilyPtr family_from_json(const json& j) {
    if (j.is_string()) {
        return family_from_spec(j.get<std::string>());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("functionals")) {
        throw InvalidInput("family must be a spec string or an object with dim and functionals");
    }
    auto f = std::make_shared<FunctionalFamily>();
    f->dim = j.at("dim").get<Eigen::Index>();
    f->exact = j.value("exact", true);
    const auto& rows = j.at("functionals");
    if (!rows.is_array() || rows.empty()) {
        throw InvalidInput("family: functionals must be a non-empty array");
    }
    f->functionals.resize(static_cast<Eigen::Index>(rows.size()), f->dim);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (!rows[k].is_array() || static_cast<Eigen::Index>(rows[k].size()) != f->dim) {
            throw InvalidInput("family: functional " + std::to_string(k) + " must have dim entries");
        }
        for (Eigen::Index i = 0; i < f->dim; ++i) {
            f->functionals(static_cast<Eigen::Index>(k), i) = detail::scalar_from_json(rows[k][static_cast<std::size_t>(i)]);
        }
    }
    f->validate();
    return f;
}

inline json to_json(const Space& s) {
    if (const auto* m = std::get_if<MatrixAlgebra>(&s)) {
        return {{"kind", "matrix"}, {"n", m->n}};
    }
    return {{"kind", "min"}, {"family", to_json(family_of(s))}};
}

inline Space space_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw InvalidInput("space must be an object with a kind");
    }
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "matrix") {
        const auto n = j.at("n").get<Eigen::Index>();
        if (n < 1) {
            throw InvalidInput("matrix space: n must be positive");
        }
        return MatrixAlgebra{n};
    }
    if (kind == "min") {
        if (!j.contains("family")) {
            throw InvalidInput("min space needs a family");
        }
        return MinSpace{family_from_json(j.at("family"))};
    }
    throw InvalidInput("unknown space kind '" + kind + "'");
}

inline ComplexMatrix element_from_json(const json& j, const Space& s) {
    ComplexMatrix m = matrix_from_json(j);
    const auto [r, c] = element_shape(s);
    if (!is_matrix(s) && m.rows() == 1 && m.cols() == r) {
        m.transposeInPlace();
    }
    if (m.rows() != r || m.cols() != c) {
        throw InvalidInput("element has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                           ", expected " + std::to_string(r) + "x" + std::to_string(c));
    }
    return m;
}

inline json to_json(const TensorRep& rep) {
    json pairs = json::array();
    for (std::size_t i = 0; i < rep.size(); ++i) {
        pairs.push_back({{"x", to_json(rep.left[i])}, {"y", to_json(rep.right[i])}});
    }
    json j{{"space", to_json(rep.space)}, {"pairs", std::move(pairs)}};
    if (rep.rank_warning) {
        j["rank_warning"] = true;
    }
    return j;
}

inline TensorRep rep_from_json(const json& j) {
    if (!j.is_object() || !j.contains("space")) {
        throw InvalidInput("rep must be an object with a space");
    }
    TensorRep rep;
    rep.space = space_from_json(j.at("space"));
    if (j.contains("pairs")) {
        for (const auto& p : j.at("pairs")) {
            rep.left.push_back(element_from_json(p.at("x"), rep.space));
            rep.right.push_back(element_from_json(p.at("y"), rep.space));
        }
    }
    validate(rep);
    return rep;
}

inline json to_json(const WhRep& rep) {
    json xs = json::array();
    for (const auto& x : rep.xs) {
        xs.push_back(to_json(x));
    }
    return {{"space", to_json(rep.space)}, {"xs", std::move(xs)}, {"alpha", to_json(rep.alpha)}};
}

inline WhRep wh_rep_from_json(const json& j) {
    WhRep rep;
    rep.space = space_from_json(j.at("space"));
    for (const auto& x : j.at("xs")) {
        rep.xs.push_back(element_from_json(x, rep.space));
    }
    rep.alpha = matrix_from_json(j.at("alpha"));
    validate(rep);
    return rep;
}

inline json to_json(const BilinearForm& t) { return {{"space", to_json(t.space)}, {"coeffs", to_json(t.coeffs)}}; }

inline BilinearForm form_from_json(const json& j) {
    BilinearForm t;
    t.space = space_from_json(j.at("space"));
    t.coeffs = matrix_from_json(j.at("coeffs"));
    t.validate();
    return t;
}

inline json to_json(const State& s) {
    if (const auto* dm = std::get_if<DensityMatrix>(&s)) {
        return {{"kind", "density_matrix"}, {"rho", to_json(dm->rho.matrix())}};
    }
    const auto& pv = std::get<ProbabilityVector>(s);
    return {{"kind", "probability_vector"}, {"p", to_json(pv.p)}};
}

inline std::string to_string(CertStatus s) { return s == CertStatus::Converged ? "converged" : "not_converged"; }

inline json to_json(const DualCert& c) {
    json j{{"value", c.value},
           {"lower", c.lower},
           {"variant", to_string(c.variant)},
           {"slack", c.slack},
           {"status", to_string(c.status)},
           {"state", to_json(c.state)}};
    if (c.approximate) {
        j["approximate"] = true;
        j["note"] = "upper-approximation: the functional family discretizes the dual ball";
    }
    return j;
}

inline json to_json(const Factorization& f) {
    return {{"kind", to_string(f.kind)}, {"a", to_json(f.a)},         {"b", to_json(f.b)},
            {"a_norm", f.a_norm},       {"b_norm", f.b_norm},     {"bound", f.bound()},
            {"residual", f.residual}};
}

inline json to_json(const Pi2Result& r) {
    if (!r.bounded) {
        return {{"pi2", nullptr}, {"status", "unbounded"}};
    }
    return {{"pi2", r.pi2}, {"lower", r.lower}, {"status", "bounded"}, {"measure", to_json(r.measure.p)}};
}

inline json to_json(const AndoResult& r) {
    json j{{"w", r.w},
           {"verdict", r.verdict == AndoVerdict::Witness ? "witness" : "infeasible"},
           {"lambda_min", r.best_lambda_min},
           {"lambda_min_upper", r.lambda_min_upper}};
    if (r.witness) {
        j["beta"] = to_json(r.witness->beta.matrix());
    }
    return j;
}

} // namespace nrh::io
