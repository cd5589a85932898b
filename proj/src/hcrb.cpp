#include "qbounds/hcrb.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qbounds/errors.hpp"

namespace qbounds {

int HcrbProgram::v_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    return b * (b + 1) / 2 + a;
}

RealMatrix HcrbProgram::unpack_v(const RealVector& v) const {
    RealMatrix V(n, n);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a <= b; ++a) V(a, b) = V(b, a) = v(v_index(a, b));
    return V;
}

RealMatrix HcrbProgram::unpack_x(const RealVector& v) const {
    RealMatrix X(dt, n);
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < dt; ++a) X(a, j) = v(x_index(a, j));
    return X;
}

RealVector HcrbProgram::pack(const RealMatrix& V, const RealMatrix& X) const {
    RealVector v(conic.k);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a <= b; ++a) v(v_index(a, b)) = 0.5 * (V(a, b) + V(b, a));
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < dt; ++a) v(x_index(a, j)) = X(a, j);
    return v;
}

RealMatrix HcrbProgram::lmi(const RealVector& v) const { return -(conic.apply(v) + conic.G); }

HcrbProgram assemble_hcrb(const QuantumModel& model, const QuotientFrame& frame, const ComplexMatrix& R,
                          const RealMatrix& weight) {
    const int n = model.n_params();
    if (weight.rows() != n || weight.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "weight matrix must be n x n");
    if (R.cols() != frame.dt) throw Error(ErrorKind::DimensionMismatch, "Gram factor does not match the frame");

    HcrbProgram p;
    p.n = n;
    p.dt = frame.dt;
    p.rt = static_cast<int>(R.rows());
    p.frame = frame;
    p.R = R;
    p.W = weight;
    p.dS.resize(p.dt, n);
    for (int i = 0; i < n; ++i) p.dS.col(i) = vectorize(model.drho[i], frame);

    const int dt = p.dt, rt = p.rt, nv = p.n_v();
    const int m = 2 * (n + rt);
    const int k = nv + n * dt;
    ConicProblem& c = p.conic;
    c.k = k;
    c.m = m;

    // Dictionary columns: e_j in the first diagonal block, e_j in the third,
    // then g_a and h_a carrying column a of R into the off-diagonal blocks.
    const int q = 2 * n + 2 * dt;
    c.dictionary = RealMatrix::Zero(m, q);
    for (int j = 0; j < n; ++j) {
        c.dictionary(j, j) = 1.0;
        c.dictionary(n + rt + j, n + j) = 1.0;
    }
    const RealMatrix re = R.real(), im = R.imag();
    for (int a = 0; a < dt; ++a) {
        c.dictionary.block(n, 2 * n + a, rt, 1) = re.col(a);
        c.dictionary.block(2 * n + rt, 2 * n + a, rt, 1) = im.col(a);
        c.dictionary.block(n, 2 * n + dt + a, rt, 1) = -im.col(a);
        c.dictionary.block(2 * n + rt, 2 * n + dt + a, rt, 1) = re.col(a);
    }

    c.coeffs.assign(k, {});
    c.c = RealVector::Zero(k);
    for (int b = 0; b < n; ++b)
        for (int a = 0; a <= b; ++a) {
            auto& e = c.coeffs[p.v_index(a, b)];
            if (a == b) {
                e = {{a, a, -1.0}, {n + a, n + a, -1.0}};
                c.c(p.v_index(a, b)) = weight(a, a);
            } else {
                e = {{a, b, -1.0}, {b, a, -1.0}, {n + a, n + b, -1.0}, {n + b, n + a, -1.0}};
                c.c(p.v_index(a, b)) = weight(a, b) + weight(b, a);
            }
        }
    for (int j = 0; j < n; ++j)
        for (int a = 0; a < dt; ++a) {
            const int g = 2 * n + a, h = 2 * n + dt + a;
            c.coeffs[p.x_index(a, j)] = {{j, g, -1.0}, {g, j, -1.0}, {n + j, h, -1.0}, {h, n + j, -1.0}};
        }

    c.G = RealMatrix::Zero(m, m);
    for (int t = 0; t < rt; ++t) {
        c.G(n + t, n + t) = -1.0;
        c.G(2 * n + rt + t, 2 * n + rt + t) = -1.0;
    }

    // Coordinates with a zero Gram column (kernel-kernel operators in a frame
    // with forced rank) are invisible to rho. Their dS entries are round-off,
    // so they are pinned to zero to keep the program bounded.
    std::vector<int> dead;
    const double rscale = std::max(1.0, R.cwiseAbs().maxCoeff());
    for (int a = 0; a < dt; ++a)
        if (R.col(a).norm() <= 1e-12 * rscale) {
            dead.push_back(a);
            p.dS.row(a).setZero();
        }

    const int ndead = static_cast<int>(dead.size());
    c.A = RealMatrix::Zero(n * n + n * ndead, k);
    c.b = RealVector::Zero(n * n + n * ndead);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            const int row = j * n + l;
            for (int a = 0; a < dt; ++a) c.A(row, p.x_index(a, j)) = p.dS(a, l);
            c.b(row) = j == l ? 1.0 : 0.0;
        }
    for (int j = 0; j < n; ++j)
        for (int t = 0; t < ndead; ++t) c.A(n * n + j * ndead + t, p.x_index(dead[t], j)) = 1.0;
    return p;
}

namespace {

void require_regular(const QuantumModel& model, const SpectralData& sp) {
    const SldSet slds = compute_slds(model, sp);
    if (is_singular_qfim(slds.J))
        throw Error(ErrorKind::SingularModel, "quantum Fisher information is singular (no strictly feasible point)");
}

std::string sci(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

}  // namespace

HcrbProgram assemble_hcrb(const QuantumModel& model, const HcrbOptions& options) {
    const SpectralData sp = eigendecompose(model.rho, options.rank_tol);
    require_regular(model, sp);
    const QuotientFrame frame = build_frame(options.full_space ? with_forced_rank(sp, sp.dim()) : sp);
    const ComplexMatrix S = build_gram(frame, model.rho);
    HcrbProgram p = assemble_hcrb(model, frame, factor_gram(S), model.weight);
    p.S = S;
    return p;
}

ComplexMatrix holevo_z(const std::vector<ComplexMatrix>& X, const ComplexMatrix& rho) {
    const auto n = static_cast<Eigen::Index>(X.size());
    ComplexMatrix z(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const ComplexMatrix xr = X[i];
        for (Eigen::Index j = 0; j < n; ++j) z(i, j) = trace_product(xr * X[j], rho);
    }
    return hermitian_part(z);
}

double holevo_value(const ComplexMatrix& Z, const RealMatrix& weight) {
    const RealMatrix sw = symmetric_sqrt(weight);
    const RealMatrix im = 0.5 * (Z.imag() - Z.imag().transpose());
    return (weight * Z.real()).trace() + trace_norm(sw * im * sw);
}

double holevo_function(const std::vector<ComplexMatrix>& X, const QuantumModel& model, const RealMatrix& weight) {
    return holevo_value(holevo_z(X, model.rho), weight);
}

HcrbResult solve_hcrb(const HcrbProgram& p, const HcrbOptions& options) {
    const ConicSolution sol = solve_conic(p.conic, options.conic);
    HcrbResult res;
    res.status = sol.status;
    res.iterations = sol.iterations;
    res.gap = sol.rel_gap;
    res.dt = p.dt;
    res.rt = p.rt;
    if (sol.status != ConicStatus::Optimal)
        throw Error(ErrorKind::SolverFailure, std::string("conic solver returned ") + std::string(to_string(sol.status)) +
                                                  (sol.message.empty() ? "" : " (" + sol.message + ")"));
    res.certificates = validate_certificates(p.conic, sol, options.conic);
    for (const auto& chk : res.certificates.checks) {
        if (chk.pass) continue;
        const ErrorKind kind = chk.name == "relative_gap" ? ErrorKind::GapTooLarge : ErrorKind::SolverFailure;
        throw Error(kind, "certificate " + chk.name + " = " + sci(chk.value) + " exceeds " + sci(chk.tolerance));
    }

    res.value = sol.objective;
    res.V = p.unpack_v(sol.v);
    res.Xvec = p.unpack_x(sol.v);
    for (int i = 0; i < p.n; ++i) res.X.push_back(devectorize(res.Xvec.col(i), p.frame));
    const ComplexMatrix S = p.S.size() ? p.S : ComplexMatrix(p.R.adjoint() * p.R);
    const ComplexMatrix xc = res.Xvec.cast<Complex>();
    res.Z = hermitian_part(xc.transpose() * S * xc);
    res.h_at_opt = holevo_value(res.Z, p.W);
    return res;
}

HcrbResult solve_hcrb(const QuantumModel& model, const HcrbOptions& options) {
    return solve_hcrb(assemble_hcrb(model, options), options);
}

FeasibleStart feasible_start(const HcrbProgram& p, const QuantumModel& model) {
    const SldSet slds = compute_slds(model);
    if (is_singular_qfim(slds.J)) throw Error(ErrorKind::SingularModel, "quantum Fisher information is singular");
    const int n = p.n;
    const RealMatrix jinv = slds.J.ldlt().solve(RealMatrix::Identity(n, n));
    FeasibleStart fs;
    fs.V = jinv + RealMatrix::Identity(n, n);
    RealMatrix lvec(p.dt, n);
    for (int i = 0; i < n; ++i) lvec.col(i) = vectorize(slds.L[i], p.frame);
    fs.Xvec = lvec * jinv;
    for (int i = 0; i < n; ++i) fs.X.push_back(devectorize(fs.Xvec.col(i), p.frame));
    fs.margin = min_eigenvalue(p.lmi(p.pack(fs.V, fs.Xvec)));
    return fs;
}

FeasibleStart feasible_start(const QuantumModel& model) { return feasible_start(assemble_hcrb(model), model); }

}  // namespace qbounds
