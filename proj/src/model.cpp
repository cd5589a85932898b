#include "qbounds/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qbounds/errors.hpp"
#include "qbounds/serialize.hpp"
#include "json_io.hpp"

namespace qbounds {

namespace {

std::string fmt_residual(const std::string& what, double residual) {
    std::ostringstream os;
    os.precision(3);
    os << what << " (residual " << std::scientific << residual << ")";
    return os.str();
}

}  // namespace

std::vector<std::string> model_violations(const QuantumModel& model, const ModelTolerances& tol) {
    std::vector<std::string> out;
    const int d = model.dim();
    if (model.rho.rows() != model.rho.cols() || d == 0) {
        out.push_back("rho shape");
        return out;
    }
    if (model.theta.size() != model.n_params()) out.push_back("theta length");

    const double herm = hermiticity_residual(model.rho);
    if (herm > tol.herm_tol) out.push_back(fmt_residual("rho hermiticity", herm));
    const double trace_err = std::abs(model.rho.trace() - Complex(1.0, 0.0));
    if (trace_err > tol.trace_tol) out.push_back(fmt_residual("trace", trace_err));
    if (herm <= tol.herm_tol) {
        const double lmin = min_eigenvalue(hermitian_part(model.rho));
        if (lmin < -tol.psd_tol) out.push_back(fmt_residual("rho positivity", -lmin));
    }

    for (int i = 0; i < model.n_params(); ++i) {
        const ComplexMatrix& dr = model.drho[i];
        const std::string tag = "drho[" + std::to_string(i) + "]";
        if (dr.rows() != d || dr.cols() != d) {
            out.push_back(tag + " shape");
            continue;
        }
        const double h = hermiticity_residual(dr);
        if (h > tol.herm_tol) out.push_back(fmt_residual("drho hermiticity " + tag, h));
        const double t = std::abs(dr.trace());
        if (t > tol.trace_tol) out.push_back(fmt_residual("drho trace " + tag, t));
    }

    const int n = model.n_params();
    if (model.weight.rows() != n || model.weight.cols() != n) {
        out.push_back("weight shape");
    } else if (n > 0) {
        const double asym = max_abs(model.weight - model.weight.transpose());
        if (asym > tol.herm_tol) out.push_back(fmt_residual("weight symmetry", asym));
        const double lmin = min_eigenvalue(RealMatrix(0.5 * (model.weight + model.weight.transpose())));
        if (!(lmin > 0.0)) out.push_back(fmt_residual("weight positive definiteness", lmin));
    }
    return out;
}

QuantumModel make_model(RealVector theta, ComplexMatrix rho, std::vector<ComplexMatrix> drho, RealMatrix weight) {
    QuantumModel m;
    const auto n = static_cast<Eigen::Index>(drho.size());
    m.theta = std::move(theta);
    m.rho = std::move(rho);
    m.drho = std::move(drho);
    m.weight = weight.size() == 0 ? RealMatrix(RealMatrix::Identity(n, n)) : std::move(weight);
    const auto violations = model_violations(m);
    if (!violations.empty()) {
        std::string msg;
        for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
        throw Error(ErrorKind::InvariantViolation, msg);
    }
    return m;
}

QuantumModel parse_model(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
    for (const char* key : {"dim", "n_params", "theta", "rho", "drho"})
        if (!j.contains(key)) throw Error(ErrorKind::ParseError, std::string("missing key '") + key + "'");
    if (!j["dim"].is_number_integer() || !j["n_params"].is_number_integer())
        throw Error(ErrorKind::ParseError, "dim and n_params must be integers");

    const int dim = j["dim"].get<int>();
    const int n = j["n_params"].get<int>();
    if (dim < 1 || n < 1) throw Error(ErrorKind::ParseError, "dim and n_params must be positive");

    if (!j["theta"].is_array() || static_cast<int>(j["theta"].size()) != n)
        throw Error(ErrorKind::ParseError, "theta must hold n_params numbers");
    RealVector theta(n);
    for (int i = 0; i < n; ++i) {
        if (!j["theta"][i].is_number()) throw Error(ErrorKind::ParseError, "theta entries must be numbers");
        theta(i) = j["theta"][i].get<double>();
    }

    ComplexMatrix rho = detail::complex_matrix_from_json(j["rho"], "rho");
    if (rho.rows() != dim || rho.cols() != dim) throw Error(ErrorKind::ParseError, "rho must be dim x dim");

    if (!j["drho"].is_array() || static_cast<int>(j["drho"].size()) != n)
        throw Error(ErrorKind::ParseError, "drho must hold n_params matrices");
    std::vector<ComplexMatrix> drho;
    for (int i = 0; i < n; ++i) {
        drho.push_back(detail::complex_matrix_from_json(j["drho"][i], "drho[" + std::to_string(i) + "]"));
        if (drho.back().rows() != dim || drho.back().cols() != dim)
            throw Error(ErrorKind::ParseError, "drho matrices must be dim x dim");
    }

    RealMatrix weight;
    if (j.contains("weight") && !j["weight"].is_null()) {
        weight = detail::real_matrix_from_json(j["weight"], "weight");
        if (weight.rows() != n || weight.cols() != n) throw Error(ErrorKind::ParseError, "weight must be n x n");
    }
    return make_model(std::move(theta), std::move(rho), std::move(drho), std::move(weight));
}

QuantumModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string model_to_json(const QuantumModel& model) {
    std::ostringstream os;
    os << "{\"dim\": " << model.dim() << ", \"n_params\": " << model.n_params() << ", \"theta\": ";
    write_json_vector(os, model.theta);
    os << ", \"rho\": ";
    write_json_complex_matrix(os, model.rho);
    os << ", \"drho\": [";
    for (int i = 0; i < model.n_params(); ++i) {
        if (i) os << ", ";
        write_json_complex_matrix(os, model.drho[i]);
    }
    os << "], \"weight\": ";
    write_json_matrix(os, model.weight);
    os << "}\n";
    return os.str();
}

void save_model(const QuantumModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
    out << model_to_json(model);
}

std::vector<ComplexMatrix> finite_difference_derivatives(const StateFunction& state_fn, const RealVector& theta,
                                                         double step) {
    if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
    std::vector<ComplexMatrix> out;
    out.reserve(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        RealVector plus = theta, minus = theta;
        plus(i) += step;
        minus(i) -= step;
        const ComplexMatrix diff = (state_fn(plus) - state_fn(minus)) / (2.0 * step);
        out.push_back(hermitian_part(diff));
    }
    return out;
}

}  // namespace qbounds
