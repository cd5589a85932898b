#include "qbounds/conic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "qbounds/errors.hpp"
#include "qbounds/serialize.hpp"
#include "dictionary_map.hpp"

namespace qbounds {

RealMatrix ConicProblem::F(int i) const {
    RealMatrix ci = RealMatrix::Zero(q(), q());
    for (const auto& e : coeffs.at(i)) ci(e.row, e.col) += e.value;
    return dictionary * ci * dictionary.transpose();
}

RealMatrix ConicProblem::apply(const RealVector& v) const {
    return detail::DictionaryMap(coeffs, q()).apply(dictionary, v);
}

RealVector ConicProblem::adjoint(const RealMatrix& z) const {
    return detail::DictionaryMap(coeffs, q()).adjoint(dictionary, z);
}

void ConicProblem::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::DimensionMismatch, what); };
    if (k < 1 || m < 1) fail("conic problem needs k >= 1 and m >= 1");
    if (c.size() != k) fail("c must have k entries");
    if (static_cast<int>(coeffs.size()) != k) fail("one coefficient matrix per variable is required");
    if (dictionary.rows() != m || dictionary.cols() < 1) fail("dictionary must have m rows");
    if (G.rows() != m || G.cols() != m) fail("G must be m x m");
    if (A.cols() != k && A.rows() > 0) fail("A must have k columns");
    if (b.size() != A.rows()) fail("b must have one entry per row of A");
    if (max_abs(G - G.transpose()) > 1e-12 * std::max(1.0, max_abs(G)))
        throw Error(ErrorKind::InvalidArgument, "G is not symmetric");
    for (int i = 0; i < k; ++i) {
        std::vector<std::pair<std::pair<int, int>, double>> sorted;
        for (const auto& e : coeffs[i]) {
            if (e.row < 0 || e.col < 0 || e.row >= q() || e.col >= q()) fail("coefficient index out of range");
            sorted.push_back({{std::min(e.row, e.col), std::max(e.row, e.col)}, e.row <= e.col ? e.value : -e.value});
        }
        // Off-diagonal pairs must cancel under the sign flip above.
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t a = 0; a < sorted.size();) {
            std::size_t b2 = a;
            double acc = 0.0, scale = 0.0;
            while (b2 < sorted.size() && sorted[b2].first == sorted[a].first) {
                acc += sorted[b2].second;
                scale += std::abs(sorted[b2].second);
                ++b2;
            }
            if (sorted[a].first.first != sorted[a].first.second && std::abs(acc) > 1e-12 * std::max(1.0, scale))
                throw Error(ErrorKind::InvalidArgument, "F_" + std::to_string(i) + " is not symmetric");
            a = b2;
        }
    }
}

ConicProblem ConicProblem::from_dense(RealVector c, const std::vector<RealMatrix>& F, RealMatrix G, RealMatrix A,
                                      RealVector b) {
    ConicProblem p;
    p.k = static_cast<int>(F.size());
    p.m = static_cast<int>(G.rows());
    p.c = std::move(c);
    p.dictionary = RealMatrix::Identity(p.m, p.m);
    p.G = std::move(G);
    p.A = A.size() == 0 ? RealMatrix(0, p.k) : std::move(A);
    p.b = b.size() == 0 ? RealVector(0) : std::move(b);
    for (int i = 0; i < p.k; ++i) {
        const RealMatrix& fi = F[i];
        if (fi.rows() != p.m || fi.cols() != p.m)
            throw Error(ErrorKind::DimensionMismatch, "F_" + std::to_string(i) + " must be m x m");
        if (max_abs(fi - fi.transpose()) > 1e-12 * std::max(1.0, max_abs(fi)))
            throw Error(ErrorKind::InvalidArgument, "F_" + std::to_string(i) + " is not symmetric");
        std::vector<SymEntry> entries;
        for (int r = 0; r < p.m; ++r)
            for (int s = 0; s < p.m; ++s)
                if (fi(r, s) != 0.0) entries.push_back({r, s, 0.5 * (fi(r, s) + fi(s, r))});
        p.coeffs.push_back(std::move(entries));
    }
    p.validate();
    return p;
}

std::string_view to_string(ConicStatus s) {
    switch (s) {
        case ConicStatus::Optimal: return "optimal";
        case ConicStatus::Infeasible: return "infeasible";
        case ConicStatus::Unbounded: return "unbounded";
        case ConicStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

std::string_view to_string(ConicBackend b) {
    switch (b) {
        case ConicBackend::Factored: return "factored";
        case ConicBackend::DenseReference: return "sparse-reference";
    }
    return "unknown";
}

ConicBackend default_backend() {
    const char* env = std::getenv("QBOUNDS_SOLVER");
    if (env == nullptr) return ConicBackend::Factored;
    const std::string v(env);
    if (v == "sparse-reference" || v == "dense-reference" || v == "reference") return ConicBackend::DenseReference;
    return ConicBackend::Factored;
}

bool CertificateReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CertificateCheck& c) { return c.pass; });
}

CertificateReport validate_certificates(const ConicProblem& problem, const ConicSolution& sol,
                                        const ConicOptions& options) {
    CertificateReport rep;
    auto add = [&](std::string name, double value, double tol) {
        rep.checks.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
    };
    if (sol.v.size() != problem.k) {
        add("solution_dimension", 1.0, 0.0);
        return rep;
    }
    const double eq = problem.n_eq() ? (problem.A * sol.v - problem.b).cwiseAbs().maxCoeff() : 0.0;
    add("equality_residual", eq, options.eq_tol);

    const RealMatrix lmi = problem.apply(sol.v) + problem.G;
    add("psd_residual", std::max(0.0, max_eigenvalue(RealMatrix(0.5 * (lmi + lmi.transpose())))), options.psd_tol);

    const double pcost = problem.c.dot(sol.v);
    if (sol.Z.rows() == problem.m && sol.Z.cols() == problem.m &&
        (problem.n_eq() == 0 || sol.y.size() == problem.n_eq())) {
        RealVector rd = problem.adjoint(sol.Z) + problem.c;
        if (problem.n_eq()) rd += problem.A.transpose() * sol.y;
        add("dual_residual", rd.cwiseAbs().maxCoeff() / (1.0 + problem.c.cwiseAbs().maxCoeff()), options.dual_tol);
        const RealMatrix zs = 0.5 * (sol.Z + sol.Z.transpose());
        add("dual_psd_residual", std::max(0.0, -min_eigenvalue(zs)), options.psd_tol);
        double dcost = (problem.G.array() * zs.array()).sum();
        if (problem.n_eq()) dcost -= problem.b.dot(sol.y);
        add("relative_gap", std::abs(pcost - dcost) / (1.0 + std::abs(pcost) + std::abs(dcost)), options.gap_tol);
    } else {
        add("dual_certificate_present", 1.0, 0.0);
    }
    return rep;
}

std::string conic_to_json(const ConicProblem& p) {
    std::ostringstream os;
    os << "{\"k\": " << p.k << ", \"m\": " << p.m << ", \"c\": ";
    write_json_vector(os, p.c);
    os << ", \"F\": [";
    for (int i = 0; i < p.k; ++i) {
        if (i) os << ", ";
        write_json_matrix(os, p.F(i));
    }
    os << "], \"G\": ";
    write_json_matrix(os, p.G);
    os << ", \"A\": ";
    write_json_matrix(os, p.A);
    os << ", \"b\": ";
    write_json_vector(os, p.b);
    os << "}\n";
    return os.str();
}

namespace {

RealMatrix json_matrix(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw Error(ErrorKind::ParseError, name + ": wrong number of rows");
    RealMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<Eigen::Index>(j[r].size()) != cols)
            throw Error(ErrorKind::ParseError, name + ": wrong number of columns");
        for (Eigen::Index c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) throw Error(ErrorKind::ParseError, name + ": non-numeric entry");
            m(r, c) = j[r][c].get<double>();
        }
    }
    return m;
}

RealVector json_vector(const nlohmann::json& j, Eigen::Index n, const std::string& name) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n)
        throw Error(ErrorKind::ParseError, name + ": wrong length");
    RealVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!j[i].is_number()) throw Error(ErrorKind::ParseError, name + ": non-numeric entry");
        v(i) = j[i].get<double>();
    }
    return v;
}

}  // namespace

ConicProblem conic_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    for (const char* key : {"k", "m", "c", "F", "G", "A", "b"})
        if (!j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing key '") + key + "'");
    const int k = j["k"].get<int>();
    const int m = j["m"].get<int>();
    if (k < 1 || m < 1) throw Error(ErrorKind::ParseError, "k and m must be positive");
    RealVector c = json_vector(j["c"], k, "c");
    if (!j["F"].is_array() || static_cast<int>(j["F"].size()) != k)
        throw Error(ErrorKind::ParseError, "F must hold k matrices");
    std::vector<RealMatrix> F;
    for (int i = 0; i < k; ++i) F.push_back(json_matrix(j["F"][i], m, m, "F"));
    RealMatrix G = json_matrix(j["G"], m, m, "G");
    const auto p = static_cast<Eigen::Index>(j["A"].size());
    RealMatrix A = p ? json_matrix(j["A"], p, k, "A") : RealMatrix(0, k);
    RealVector b = json_vector(j["b"], p, "b");
    return ConicProblem::from_dense(std::move(c), F, std::move(G), std::move(A), std::move(b));
}

}  // namespace qbounds
