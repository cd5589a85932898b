#include "qbounds/report.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qbounds/errors.hpp"
#include "qbounds/interferometer.hpp"
#include "qbounds/magnetometry.hpp"
#include "qbounds/serialize.hpp"
#include "json_io.hpp"
#include "parallel.hpp"

namespace qbounds {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

nlohmann::json parse_json(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size() || !std::isfinite(v))
        throw Error(ErrorKind::InvalidArgument, what + ": '" + s + "' is not a finite number");
    return v;
}

std::optional<double> tr_weighted_inverse(const RealMatrix& f, const RealMatrix& w) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (f + f.transpose()));
    const RealVector& ev = es.eigenvalues();
    if (!(ev.maxCoeff() > 0.0) || ev.minCoeff() <= 1e-10 * ev.maxCoeff()) return std::nullopt;
    const RealMatrix inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    return (w * inv).trace();
}

void write_opt(std::ostream& os, const std::optional<double>& v) {
    if (v)
        write_json_number(os, *v);
    else
        os << "null";
}

void write_csv_opt(std::ostream& os, const std::optional<double>& v) {
    if (v && std::isfinite(*v)) write_json_number(os, *v);
}

void record_error(BoundsReport& r, const Error& e) {
    if (!r.ok()) return;
    r.status = std::string(to_string(e.kind()));
    r.message = e.what();
}

}  // namespace

QuantumModel build_builtin(const BuiltinSpec& s) {
    if (s.kind == "interferometer") {
        ProbeSpec probe;
        if (s.input == "hb") {
            probe = holland_burnett(s.photons);
        } else if (s.input == "onephoton") {
            if (!(s.c1sq > 0.0 && s.c1sq < 1.0)) throw Error(ErrorKind::InvalidArgument, "c1sq must lie in (0, 1)");
            ComplexVector c(2);
            c << std::sqrt(1.0 - s.c1sq), std::sqrt(s.c1sq);
            probe = make_probe(c);
        } else {
            throw Error(ErrorKind::InvalidArgument, "unknown input state '" + s.input + "' (hb, onephoton)");
        }
        return evolve(probe, s.phase, s.eta);
    }
    if (s.kind == "magnetometry") {
        MagnetometrySpec m;
        m.M = s.qubits;
        m.gamma = s.gamma;
        m.phi = s.phi;
        return encode_and_dephase(m);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown built-in model '" + s.kind + "' (interferometer, magnetometry)");
}

std::string describe(const BuiltinSpec& s) {
    std::ostringstream os;
    os.precision(17);
    if (s.kind == "interferometer") {
        os << "interferometer input=" << s.input;
        if (s.input == "onephoton")
            os << " c1sq=" << s.c1sq;
        else
            os << " photons=" << s.photons;
        os << " eta=" << s.eta << " phase=" << s.phase;
    } else {
        os << s.kind << " qubits=" << s.qubits << " gamma=" << s.gamma << " phi=" << s.phi[0] << ',' << s.phi[1]
           << ',' << s.phi[2];
    }
    return os.str();
}

void set_builtin_param(BuiltinSpec& s, const std::string& name, double v) {
    if (s.kind == "interferometer") {
        if (name == "eta") return void(s.eta = v);
        if (name == "phase") return void(s.phase = v);
        if (name == "c1sq") return void(s.c1sq = v);
    } else if (s.kind == "magnetometry") {
        if (name == "gamma") return void(s.gamma = v);
        if (name == "phi") return void(s.phi = {v, v, v});
        if (name == "phi1") return void(s.phi[0] = v);
        if (name == "phi2") return void(s.phi[1] = v);
        if (name == "phi3") return void(s.phi[2] = v);
    }
    throw Error(ErrorKind::InvalidArgument, "parameter '" + name + "' cannot be swept for " + s.kind);
}

Povm parse_povm(const std::string& text) {
    const auto j = parse_json(text);
    if (!j.is_object() || !j.contains("elements") || !j["elements"].is_array() || j["elements"].empty())
        throw Error(ErrorKind::ParseError, "POVM file needs a non-empty 'elements' array");
    Povm p;
    for (std::size_t i = 0; i < j["elements"].size(); ++i)
        p.elements.push_back(detail::complex_matrix_from_json(j["elements"][i], "elements[" + std::to_string(i) + "]"));
    return p;
}

PovmChoice parse_povm_choice(const std::string& text) {
    PovmChoice c;
    if (text == "none") return c;
    if (text.rfind("sld:", 0) == 0) {
        const double v = parse_double(text.substr(4), "--povm");
        if (v < 0 || v != std::floor(v)) throw Error(ErrorKind::InvalidArgument, "--povm sld:<i> needs an index");
        c.kind = PovmChoice::Kind::SldEigenbasis;
        c.parameter = static_cast<int>(v);
        return c;
    }
    c.kind = PovmChoice::Kind::Explicit;
    c.povm = parse_povm(read_file(text));
    return c;
}

QuantumModel with_weight_file(const QuantumModel& model, const std::string& path) {
    const RealMatrix w = detail::real_matrix_from_json(parse_json(read_file(path)), "weight");
    if (w.rows() != model.n_params() || w.cols() != model.n_params())
        throw Error(ErrorKind::DimensionMismatch, "weight must be n_params x n_params");
    return make_model(model.theta, model.rho, model.drho, w);
}

std::optional<double> BoundsReport::reldiff_sld() const {
    if (!C_H || !C_S || *C_H == 0.0) return std::nullopt;
    return 1.0 - *C_S / *C_H;
}

std::optional<double> BoundsReport::reldiff_classical() const {
    if (!C_H || !C_classical || *C_classical == 0.0) return std::nullopt;
    return 1.0 - *C_H / *C_classical;
}

BoundsReport compute_bounds(const QuantumModel& model, const std::string& descriptor, const PovmChoice& povm,
                            const HcrbOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    BoundsReport r;
    r.descriptor = descriptor;
    r.theta = model.theta;

    std::optional<SldSet> slds;
    try {
        slds = compute_slds(model);
        const auto wc = weak_commutativity(*slds);
        r.D = wc.D;
        r.D_fro = wc.frobenius;
        r.C_S = sld_bound(*slds, model.weight);
    } catch (const Error& e) {
        record_error(r, e);
    }
    try {
        r.C_R = rld_limit_bound(compute_rlds(model), model.weight);
    } catch (const Error&) {
        r.C_R.reset();
    }
    try {
        if (povm.kind == PovmChoice::Kind::Explicit) {
            r.C_classical = tr_weighted_inverse(classical_fim(model, povm.povm), model.weight);
        } else if (povm.kind == PovmChoice::Kind::SldEigenbasis && slds) {
            const Povm p = sld_eigenbasis_povm(*slds, povm.parameter, model.rho);
            r.C_classical = tr_weighted_inverse(classical_fim(model, p), model.weight);
        }
    } catch (const Error& e) {
        // A bad POVM file is an input error; an ill-conditioned outcome only drops the column.
        if (e.kind() == ErrorKind::InvariantViolation || e.kind() == ErrorKind::DimensionMismatch ||
            e.kind() == ErrorKind::InvalidArgument)
            record_error(r, e);
        r.C_classical.reset();
    }
    if (r.ok()) {
        try {
            const HcrbResult h = solve_hcrb(model, options);
            r.C_H = h.value;
            r.gap = h.gap;
            r.iterations = h.iterations;
        } catch (const Error& e) {
            record_error(r, e);
        }
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string bounds_report_json(const BoundsReport& r) {
    std::ostringstream os;
    os << "{\"model\": " << nlohmann::json(r.descriptor).dump() << ", \"theta\": ";
    write_json_vector(os, r.theta);
    os << ", \"n_params\": " << r.theta.size() << ", \"C_H\": ";
    write_opt(os, r.C_H);
    os << ", \"C_S\": ";
    write_opt(os, r.C_S);
    os << ", \"C_R\": ";
    write_opt(os, r.C_R);
    os << ", \"C_classical\": ";
    write_opt(os, r.C_classical);
    os << ", \"D\": ";
    if (r.D.size())
        write_json_matrix(os, r.D);
    else
        os << "null";
    os << ", \"D_fro\": ";
    write_opt(os, r.D_fro);
    os << ", \"reldiff_SLD\": ";
    write_opt(os, r.reldiff_sld());
    os << ", \"reldiff_classical\": ";
    write_opt(os, r.reldiff_classical());
    os << ", \"gap\": ";
    write_json_number(os, r.gap);
    os << ", \"status\": " << nlohmann::json(r.status).dump();
    if (!r.message.empty()) os << ", \"message\": " << nlohmann::json(r.message).dump();
    os << ", \"iterations\": " << r.iterations << ", \"wall_ms\": ";
    write_json_number(os, r.wall_ms);
    os << '}';
    return os.str();
}

std::vector<double> SweepSpec::grid() const {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = points == 1 ? start : start + (stop - start) * i / (points - 1);
    return g;
}

SweepSpec parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 4 || parts[0].empty())
        throw Error(ErrorKind::InvalidArgument, "sweep must look like <param>:<start>:<stop>:<points>");
    SweepSpec s;
    s.param = parts[0];
    s.start = parse_double(parts[1], "sweep start");
    s.stop = parse_double(parts[2], "sweep stop");
    const double n = parse_double(parts[3], "sweep points");
    if (n < 1 || n != std::floor(n) || n > 100000)
        throw Error(ErrorKind::InvalidArgument, "sweep needs a positive integer number of points");
    s.points = static_cast<int>(n);
    return s;
}

std::vector<SweepRow> run_sweep(const BuiltinSpec& base, const SweepSpec& sweep, const PovmChoice& povm,
                                const HcrbOptions& options, int jobs) {
    {
        BuiltinSpec probe = base;
        set_builtin_param(probe, sweep.param, sweep.start);  // rejects unknown names up front
    }
    const auto grid = sweep.grid();
    std::vector<SweepRow> rows(grid.size());
    detail::parallel_for(static_cast<int>(grid.size()), jobs, [&](int i) {
        SweepRow& row = rows[i];
        row.param_name = sweep.param;
        row.param_value = grid[i];
        BuiltinSpec spec = base;
        set_builtin_param(spec, sweep.param, grid[i]);
        try {
            row.report = compute_bounds(build_builtin(spec), describe(spec), povm, options);
        } catch (const Error& e) {
            row.report.descriptor = describe(spec);
            record_error(row.report, e);
        }
    });
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << kSweepHeader << '\n';
    for (const auto& row : rows) {
        const BoundsReport& r = row.report;
        os << row.param_name << ',';
        write_json_number(os, row.param_value);
        for (const auto& v : {r.C_H, r.C_S, r.C_R, r.C_classical, r.D_fro, r.reldiff_sld(), r.reldiff_classical()}) {
            os << ',';
            write_csv_opt(os, v);
        }
        os << ',';
        write_json_number(os, r.gap);
        os << ',' << r.status << ',' << r.iterations << ',';
        write_json_number(os, r.wall_ms);
        os << '\n';
    }
    return os.str();
}

}  // namespace qbounds
